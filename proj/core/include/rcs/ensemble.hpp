#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rcs {

enum class EnsembleKind { IidGaussian, Projector, Tabulated };

// Gramian-spectrum ensemble of the sampling matrix: which law the
// eigenvalues of A^T A follow, parameterized by the compression rate r
// (source dimension over measurement count).
struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::IidGaussian;
    double r = 1.0;
    // Tabulated only: atomic spectrum as (eigenvalue, mass) pairs.
    std::vector<std::pair<double, double>> spectrum;

    static EnsembleSpec iid(double r);
    static EnsembleSpec projector(double r);
    static EnsembleSpec tabulated(double r, std::vector<std::pair<double, double>> atoms);

    void validate() const;  // throws DomainError on bad r / masses
};

// R-transform of the ensemble's limiting spectrum, R(w) = G^{-1}(-w) - 1/w
// with G the Stieltjes transform. Closed forms for IidGaussian (Marchenko-
// Pastur) and Projector; numeric Stieltjes inversion for Tabulated.
// Throws DomainError outside the real-analytic domain; all solver paths
// pass w <= 0 (plus small positive probes from difference stencils), which
// is safe for every supported spectrum.
double r_transform(const EnsembleSpec& spec, double omega);

// Integral of R(-w/lambda) dw over [a, b]; closed form for IidGaussian,
// adaptive quadrature (relative 1e-10) otherwise.
double r_integral(const EnsembleSpec& spec, double lambda, double a, double b);

// R-transform of an empirical eigenvalue sample, via root-finding on the
// empirical Stieltjes transform. Validation oracle for r_transform.
double empirical_r_transform(std::span<const double> eigenvalues, double omega);

// Two-column CSV (eigenvalue, mass), header row required.
EnsembleSpec load_spectrum_csv(const std::string& path, double r);

}  // namespace rcs
