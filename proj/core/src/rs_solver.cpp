#include "rcs/rs_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "rcs/errors.hpp"
#include "rs_internal.hpp"

namespace rcs {

void SystemConfig::validate() const {
    ensemble.validate();
    prior.validate();
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive");
    if (!(lambda0 >= 0.0) || !std::isfinite(lambda0)) throw DomainError("lambda0 must be non-negative");
    if (quadrature_n < 8) throw DomainError("quadrature node budget too small");
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "Converged";
        case SolveStatus::NoSolution: return "NoSolution";
        case SolveStatus::InvalidNegativeDiscriminant: return "InvalidNegativeDiscriminant";
        case SolveStatus::MaxItersExceeded: return "MaxItersExceeded";
        case SolveStatus::MuRootNotBracketed: return "MuRootNotBracketed";
    }
    return "?";
}

std::pair<double, double> rs_effective_params(const SystemConfig& cfg, double chi, double q) {
    double lam = cfg.lambda, lam0 = cfg.lambda0;
    double R = r_transform(cfg.ensemble, -chi / lam);
    double xi = lam / R;
    double f2;
    if (cfg.ensemble.kind == EnsembleKind::IidGaussian) {
        f2 = lam0 + cfg.ensemble.r * q;
    } else {
        // f^2 = (1/R^2) d/dchi [(lam0 chi - lam q) R(-chi/lam)]
        double h = std::max(1e-6, 1e-6 * chi);
        auto H = [&](double c) { return (lam0 * c - lam * q) * r_transform(cfg.ensemble, -c / lam); };
        f2 = (H(chi + h) - H(chi - h)) / (2.0 * h) / (R * R);
    }
    if (f2 < 0.0) throw NegativeDiscriminantError("negative discriminant in effective noise amplitude");
    return {xi, std::sqrt(f2)};
}

namespace detail {

// One pass of the fixed-point map; optionally accumulates the distortion.
RsMoments rs_pass(const SystemConfig& cfg, RsWork& work, double chi, double q, bool want_D) {
    auto [xi, f] = rs_effective_params(cfg, chi, q);
    std::array<double, 2> th{};
    int nth = prox_thresholds(cfg.penalty, xi, th);
    double s = cfg.prior.s;

    if (f < 1e-14) {
        // z drops out: g = prox(x, xi); the chi-map integrand is odd in z
        work.zrule.rebuild(std::span<const double>(th.data(), nth));  // x-axis kinks
        auto moment = [&](auto&& h) {
            double atom = h(0.0);
            double tail = s > 0.0 ? gauss_expect(work.zrule, h) : 0.0;
            return (1.0 - s) * atom + s * tail;
        };
        double qn = moment([&](double x) {
            double g = prox(cfg.penalty, x, xi);
            return (g - x) * (g - x);
        });
        double D = want_D ? moment([&](double x) { return cfg.distort(prox(cfg.penalty, x, xi), x); })
                          : qn;
        return {0.0, qn, D};
    }

    double acc_chi = 0.0, acc_q = 0.0, acc_D = 0.0;
    std::array<double, 2> bp{};
    auto one_x = [&](double x, double wx) {
        for (int i = 0; i < nth; ++i) bp[i] = (th[i] - x) / f;
        work.zrule.rebuild(std::span<const double>(bp.data(), nth));
        double m1 = 0.0, m2 = 0.0, mD = 0.0;
        auto zs = work.zrule.nodes();
        auto ws = work.zrule.weights();
        for (size_t i = 0; i < zs.size(); ++i) {
            double z = zs[i], wt = ws[i];
            double g = prox(cfg.penalty, x + f * z, xi);
            double d = g - x;
            m1 += wt * d * z;
            m2 += wt * d * d;
            if (want_D) mD += wt * cfg.distort(g, x);
        }
        acc_chi += wx * m1;
        acc_q += wx * m2;
        acc_D += wx * mD;
    };
    one_x(0.0, 1.0 - s);
    if (s > 0.0) {
        // the slab integrand has prox-transition features of width ~f at the
        // thresholds; cutting the x-axis there lets the panel rule resolve
        // them at any node budget
        work.xrule.rebuild(std::span<const double>(th.data(), size_t(nth)));
        auto xs = work.xrule.nodes();
        auto xw = work.xrule.weights();
        for (size_t i = 0; i < xs.size(); ++i) one_x(xs[i], s * xw[i]);
    }

    double chi_new = xi / f * acc_chi;
    if (!std::isfinite(chi_new) || !std::isfinite(acc_q)) throw NonFiniteError("fixed-point map produced non-finite value");
    return {chi_new, acc_q, want_D ? acc_D : acc_q};
}

}  // namespace detail

namespace {

using detail::RsMoments;
using detail::RsWork;
using detail::rs_pass;

struct StartResult {
    SolveStatus status = SolveStatus::MaxItersExceeded;
    double chi = 0.0, q = 0.0;
    double best_chi = 0.0, best_q = 0.0, best_res = 1e300;
    int iterations = 0;
};

StartResult run_start(const SystemConfig& cfg, RsWork& work, const RsOptions& opts,
                      double chi, double q) {
    StartResult out;
    out.best_chi = chi;
    out.best_q = q;
    double alpha = opts.damping;
    double prev_dchi = 0.0, prev_dq = 0.0;
    int alternations = 0;
    int since_best = 0;
    for (int it = 0; it < opts.max_iters; ++it) {
        out.iterations = it + 1;
        RsMoments m;
        try {
            m = rs_pass(cfg, work, chi, q, false);
        } catch (const NegativeDiscriminantError&) {
            out.status = SolveStatus::InvalidNegativeDiscriminant;
            return out;
        } catch (const DomainError&) {
            out.status = SolveStatus::NoSolution;
            return out;
        } catch (const NonFiniteError&) {
            out.status = SolveStatus::NoSolution;
            return out;
        }
        double dchi = m.chi - chi, dq = m.q - q;
        double res = std::max(std::abs(dchi), std::abs(dq));
        if (res < out.best_res) {
            out.best_res = res;
            out.best_chi = chi;
            out.best_q = q;
            since_best = 0;
        } else {
            ++since_best;
        }
        if (res < opts.tol) {
            chi = m.chi;
            q = m.q;
            if (chi < -1e-12 || q < -1e-12) {
                out.status = SolveStatus::NoSolution;  // converged to an unphysical point
                return out;
            }
            out.status = SolveStatus::Converged;
            out.chi = std::max(chi, 0.0);
            out.q = std::max(q, 0.0);
            return out;
        }
        if (dchi * prev_dchi < 0.0 || dq * prev_dq < 0.0) {
            if (++alternations >= 6) {
                alpha = std::max(alpha * 0.5, 1.0 / 64.0);
                alternations = 0;
            }
        } else {
            alternations = 0;
        }
        prev_dchi = dchi;
        prev_dq = dq;
        chi += alpha * dchi;
        q += alpha * dq;
        if (std::abs(chi) > 1e8 || std::abs(q) > 1e8) {
            out.status = SolveStatus::NoSolution;
            return out;
        }
        if (alpha <= 1.0 / 64.0 + 1e-15 && since_best > 1500) break;  // stagnated
    }
    out.status = SolveStatus::MaxItersExceeded;
    out.chi = chi;
    out.q = q;
    return out;
}

double residual_at(const SystemConfig& cfg, RsWork& work, double chi, double q) {
    if (chi < 0.0 || q < 0.0) return 1e300;
    try {
        RsMoments m = rs_pass(cfg, work, chi, q, false);
        return std::max(std::abs(m.chi - chi), std::abs(m.q - q));
    } catch (const std::runtime_error&) {
        return 1e300;
    }
}

// deterministic compass search refining the minimum-residual state
void polish(const SystemConfig& cfg, RsWork& work, double& chi, double& q, double& res) {
    double step = 0.05;
    int evals = 0;
    while (step > 1e-8 && evals < 600) {
        bool improved = false;
        const double dir[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (auto& d : dir) {
            double c2 = chi + step * d[0], q2 = q + step * d[1];
            double r2 = residual_at(cfg, work, c2, q2);
            ++evals;
            if (r2 < res) {
                chi = c2;
                q = q2;
                res = r2;
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
}

}  // namespace

std::pair<double, double> rs_iterate(const SystemConfig& cfg, double chi, double q) {
    RsWork work(cfg.quadrature_n);
    RsMoments m = rs_pass(cfg, work, chi, q, false);
    return {m.chi, m.q};
}

std::vector<RsSolution> solve_rs(const SystemConfig& cfg, const RsOptions& opts) {
    cfg.validate();
    RsWork work(cfg.quadrature_n);

    std::vector<std::pair<double, double>> starts{
        {opts.chi0, opts.q0}, {0.1, 0.1}, {1.0, 1.0}, {1e-3, cfg.prior.s}};
    starts.insert(starts.end(), opts.extra_starts.begin(), opts.extra_starts.end());
    starts.erase(std::unique(starts.begin(), starts.end(),
                             [](auto& a, auto& b) {
                                 return std::abs(a.first - b.first) < 1e-12 &&
                                        std::abs(a.second - b.second) < 1e-12;
                             }),
                 starts.end());

    std::vector<RsSolution> converged;
    StartResult best_fail;
    bool have_fail = false;
    for (auto& [c0, q0] : starts) {
        StartResult r = run_start(cfg, work, opts, c0, q0);
        if (r.status == SolveStatus::Converged) {
            bool dup = false;
            for (auto& s : converged)
                if (std::max(std::abs(s.chi - r.chi), std::abs(s.q - r.q)) <= 1e-6) dup = true;
            if (dup) continue;
            RsSolution sol;
            sol.chi = r.chi;
            sol.q = r.q;
            sol.status = SolveStatus::Converged;
            sol.iterations = r.iterations;
            try {
                RsMoments m = rs_pass(cfg, work, r.chi, r.q, true);
                sol.D = m.D;
                sol.residual = std::max(std::abs(m.chi - r.chi), std::abs(m.q - r.q));
            } catch (const std::runtime_error&) {
                sol.D = r.q;
                sol.residual = 0.0;
            }
            auto [xi, f] = rs_effective_params(cfg, r.chi, r.q);
            sol.xi = xi;
            sol.f = f;
            converged.push_back(sol);
        } else if (!have_fail || r.best_res < best_fail.best_res) {
            best_fail = r;
            have_fail = true;
        }
    }

    if (!converged.empty()) {
        std::sort(converged.begin(), converged.end(),
                  [](const RsSolution& a, const RsSolution& b) { return a.D < b.D; });
        return converged;
    }

    // no start converged: report the best-effort quasi-state with its status
    RsSolution sol;
    sol.status = best_fail.status;
    sol.iterations = best_fail.iterations;
    double chi = best_fail.best_chi, q = best_fail.best_q, res = best_fail.best_res;
    polish(cfg, work, chi, q, res);
    sol.chi = chi;
    sol.q = q;
    sol.residual = res;
    try {
        RsMoments m = rs_pass(cfg, work, chi, q, true);
        sol.D = m.D;
        auto [xi, f] = rs_effective_params(cfg, chi, q);
        sol.xi = xi;
        sol.f = f;
    } catch (const std::runtime_error&) {
        sol.D = q;
        sol.xi = 0.0;
        sol.f = 0.0;
    }
    return {sol};
}

double rs_distortion(const SystemConfig& cfg, const RsSolution& sol) {
    if (sol.status != SolveStatus::Converged)
        throw StateError("distortion of a non-converged solution is undefined");
    RsWork work(cfg.quadrature_n);
    return rs_pass(cfg, work, sol.chi, sol.q, true).D;
}

}  // namespace rcs
