#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "rcs/ensemble.hpp"
#include "rcs/scalar_channel.hpp"

namespace rcs {

// One scalar-channel problem instance: ensemble + penalty + prior + the
// tuning factor lambda and noise variance lambda0. The distortion metric
// d(xhat; x) defaults to squared error when empty.
struct SystemConfig {
    EnsembleSpec ensemble;
    PenaltySpec penalty;
    SourcePrior prior;
    double lambda = 1.0;
    double lambda0 = 0.01;
    std::function<double(double, double)> distortion;  // d(xhat, x); empty = squared error
    int quadrature_n = 96;

    void validate() const;
    double distort(double xhat, double x) const {
        if (distortion) return distortion(xhat, x);
        double e = xhat - x;
        return e * e;
    }
};

enum class SolveStatus {
    Converged,
    NoSolution,
    InvalidNegativeDiscriminant,
    MaxItersExceeded,
    MuRootNotBracketed,
};
const char* to_string(SolveStatus s);

struct RsSolution {
    double chi = 0.0, q = 0.0;
    double xi = 0.0, f = 0.0;
    double D = 0.0;
    SolveStatus status = SolveStatus::MaxItersExceeded;
    int iterations = 0;
    double residual = 0.0;
};

struct RsOptions {
    double damping = 0.5;
    double tol = 1e-10;
    int max_iters = 10000;
    double chi0 = 0.1, q0 = 0.1;  // user-supplied first start
    // additional starts, e.g. warm continuation along a sweep
    std::vector<std::pair<double, double>> extra_starts;
};

// Effective parameters (xi, f) of the symmetric ansatz at (chi, q).
// Throws NegativeDiscriminantError when the expression under f's square
// root is negative (the ansatz-invalidity signal; solvers catch it).
std::pair<double, double> rs_effective_params(const SystemConfig& cfg, double chi, double q);

// One application of the fixed-point map (chi, q) -> (chi', q').
std::pair<double, double> rs_iterate(const SystemConfig& cfg, double chi, double q);

// Damped multi-start fixed-point solve. Returns all distinct converged
// solutions sorted by predicted distortion; if no start converges, returns
// a single best-effort entry (the minimum-residual state, refined by a
// deterministic direct search on the residual) carrying the failure status.
std::vector<RsSolution> solve_rs(const SystemConfig& cfg, const RsOptions& opts = {});

// Recompute the predicted distortion from a converged solution's (chi, q).
// Throws StateError if the solution is not converged.
double rs_distortion(const SystemConfig& cfg, const RsSolution& sol);

}  // namespace rcs
