#include "rcs/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rcs/errors.hpp"

namespace rcs {

EnsembleSpec EnsembleSpec::iid(double r) {
    EnsembleSpec s;
    s.kind = EnsembleKind::IidGaussian;
    s.r = r;
    s.validate();
    return s;
}

EnsembleSpec EnsembleSpec::projector(double r) {
    EnsembleSpec s;
    s.kind = EnsembleKind::Projector;
    s.r = r;
    s.validate();
    return s;
}

EnsembleSpec EnsembleSpec::tabulated(double r, std::vector<std::pair<double, double>> atoms) {
    EnsembleSpec s;
    s.kind = EnsembleKind::Tabulated;
    s.r = r;
    s.spectrum = std::move(atoms);
    s.validate();
    return s;
}

void EnsembleSpec::validate() const {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("ensemble rate must be positive and finite");
    if (kind == EnsembleKind::Tabulated) {
        if (spectrum.empty()) throw DomainError("tabulated spectrum is empty");
        double total = 0.0;
        for (auto& [t, m] : spectrum) {
            if (m < 0.0) throw DomainError("tabulated spectrum has a negative mass");
            (void)t;
            total += m;
        }
        if (std::abs(total - 1.0) > 1e-12) throw DomainError("tabulated spectrum masses do not sum to 1");
    }
}

// Stieltjes transform of an atomic spectrum and its inversion: solve
// G(s) = -w on the branch left of the support (w < 0) or right of it
// (w > 0), then R = s - 1/w.
namespace {

double atomic_stieltjes(std::span<const std::pair<double, double>> atoms, double s) {
    double g = 0.0;
    for (auto& [t, m] : atoms) g += m / (t - s);
    return g;
}

double invert_stieltjes(std::span<const std::pair<double, double>> atoms, double omega) {
    double tmin = std::numeric_limits<double>::infinity();
    double tmax = -tmin;
    for (auto& [t, m] : atoms) {
        (void)m;
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
    }
    double target = -omega;
    double lo, hi;  // bracket with G(lo) < target < G(hi), G increasing on each branch
    if (omega < 0.0) {
        // branch s < tmin: G decreases to 0+ as s -> -inf, blows up at tmin
        hi = tmin - 1e-300;
        double step = 1.0;
        lo = tmin - step;
        while (atomic_stieltjes(atoms, lo) > target) {
            step *= 2.0;
            lo = tmin - step;
            if (step > 1e12) throw ConvergenceError("stieltjes inversion bracket expansion failed");
        }
        hi = tmin - 1e-14 * std::max(1.0, std::abs(tmin));
        if (atomic_stieltjes(atoms, hi) < target) hi = std::nextafter(tmin, lo);
    } else {
        // branch s > tmax: G increases from -inf toward 0-
        double step = 1.0;
        hi = tmax + step;
        while (atomic_stieltjes(atoms, hi) < target) {
            step *= 2.0;
            hi = tmax + step;
            if (step > 1e12) throw ConvergenceError("stieltjes inversion bracket expansion failed");
        }
        lo = tmax + 1e-14 * std::max(1.0, std::abs(tmax));
        if (atomic_stieltjes(atoms, lo) > target) lo = std::nextafter(tmax, hi);
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (hi - lo < 1e-15 * std::max(1.0, std::abs(mid))) return mid;
        if (atomic_stieltjes(atoms, mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double tabulated_r(std::span<const std::pair<double, double>> atoms, double omega) {
    if (omega == 0.0) {
        double mean = 0.0;
        for (auto& [t, m] : atoms) mean += t * m;
        return mean;
    }
    return invert_stieltjes(atoms, omega) - 1.0 / omega;
}

}  // namespace

double r_transform(const EnsembleSpec& spec, double omega) {
    switch (spec.kind) {
        case EnsembleKind::IidGaussian: {
            // Marchenko-Pastur: R(w) = 1/(1 - r w), pole at w = 1/r
            double d = 1.0 - spec.r * omega;
            if (d <= 0.0) throw DomainError("R-transform argument at or beyond the Marchenko-Pastur pole");
            return 1.0 / d;
        }
        case EnsembleKind::Projector: {
            // two-atom spectrum (1/r) at r, (1-1/r) at 0; rationalized so the
            // small-omega branch is cancellation-free
            if (spec.r == 1.0) return 1.0;  // Gramian is the identity
            double a = 1.0 - spec.r * omega;
            double disc = a * a + 4.0 * omega;
            if (disc < 0.0) throw DomainError("negative discriminant in projector R-transform");
            return 2.0 / (a + std::sqrt(disc));
        }
        case EnsembleKind::Tabulated:
            return tabulated_r(spec.spectrum, omega);
    }
    throw DomainError("unknown ensemble kind");
}

namespace {

// adaptive Simpson, relative tolerance on the whole integral
double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adapt(F& f, double a, double m, double b, double fa, double fm, double fb,
             double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(fa, flm, fm, a, m);
    double right = simpson(fm, frm, fb, m, b);
    double delta = left + right - whole;
    if (depth > 50 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           adapt(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double r_integral(const EnsembleSpec& spec, double lambda, double a, double b) {
    if (a == b) return 0.0;
    if (spec.kind == EnsembleKind::IidGaussian) {
        double rr = spec.r;
        return (lambda / rr) * (std::log1p(rr * b / lambda) - std::log1p(rr * a / lambda));
    }
    auto f = [&](double w) { return r_transform(spec, -w / lambda); };
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = simpson(fa, fm, fb, a, b);
    double scale = std::max(std::abs(whole), 1e-30);
    return adapt(f, a, m, b, fa, fm, fb, whole, 1e-10 * scale, 0);
}

double empirical_r_transform(std::span<const double> eigenvalues, double omega) {
    if (eigenvalues.empty()) throw DomainError("empty eigenvalue list");
    std::vector<std::pair<double, double>> atoms;
    atoms.reserve(eigenvalues.size());
    double m = 1.0 / double(eigenvalues.size());
    for (double t : eigenvalues) atoms.emplace_back(t, m);
    return tabulated_r(atoms, omega);
}

EnsembleSpec load_spectrum_csv(const std::string& path, double r) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spectrum file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("spectrum file is empty: " + path);
    std::vector<std::pair<double, double>> atoms;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        double vals[2];
        for (int i = 0; i < 2; ++i) {
            if (!std::getline(ss, tok, ',')) throw ConfigError("spectrum file: bad row at line " + std::to_string(lineno));
            try {
                vals[i] = std::stod(tok);
            } catch (const std::exception&) {
                throw ConfigError("spectrum file: non-numeric field at line " + std::to_string(lineno));
            }
        }
        atoms.emplace_back(vals[0], vals[1]);
    }
    return EnsembleSpec::tabulated(r, std::move(atoms));
}

}  // namespace rcs
