#include "rcs/rsb_solver.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "rcs/errors.hpp"
#include "rs_internal.hpp"

namespace rcs {

RsbEffective rsb_effective_params(const SystemConfig& cfg, double chi, double q, double p, double mu) {
    double lam = cfg.lambda, lam0 = cfg.lambda0;
    double rho = chi + mu * p;
    double Rchi = r_transform(cfg.ensemble, -chi / lam);
    double xi = lam / Rchi;
    double f2, w2;
    if (cfg.ensemble.kind == EnsembleKind::IidGaussian) {
        double rr = cfg.ensemble.r;
        double ratio = (lam + rr * chi) / (lam + rr * rho);
        f2 = (lam0 + rr * (q - p)) * ratio * ratio;
        w2 = rr * p * (lam + rr * chi) / (lam + rr * rho);
    } else {
        double Rrho = r_transform(cfg.ensemble, -rho / lam);
        double h = std::max(1e-6, 1e-6 * rho);
        auto H = [&](double v) {
            return (lam0 * v + lam * p - lam * q) * r_transform(cfg.ensemble, -v / lam);
        };
        f2 = (H(rho + h) - H(rho - h)) / (2.0 * h) / (Rchi * Rchi);
        w2 = (lam / mu) * (Rchi - Rrho) / (Rchi * Rchi);
        if (w2 < 0.0 && w2 > -1e-15) w2 = 0.0;  // roundoff at p ~ 0
    }
    if (f2 < 0.0 || w2 < 0.0)
        throw NegativeDiscriminantError("negative discriminant in breaking-mode effective amplitudes");
    return {xi, std::sqrt(f2), std::sqrt(w2), rho};
}

namespace {

struct RsbWork {
    SegmentedRule xrule, zrule, yrule;
    Eigen::ArrayXd t, g, u, K, e, dv, dist;
    detail::RsWork rs;
    explicit RsbWork(int n) : xrule(n), zrule(n), yrule(n), rs(n) {}
};

struct RsbPass {
    double A1 = 0.0;      // E[(g-x) z I]
    double A2 = 0.0;      // E[(g-x) y I]
    double A3 = 0.0;      // E[(g-x)^2 I]
    double EIlogI = 0.0;  // E[I log I]
    double D = 0.0;       // E[d(g;x) I]
};

// Full sweep over (x, z, y) at the given state and effective parameters.
// The y-axis is cut at the prox thresholds per (x, z); the tilted weight is
// stabilized by subtracting the minimum of the inner objective on the node
// set.
RsbPass rsb_pass(const SystemConfig& cfg, RsbWork& work, double mu, const RsbEffective& eff,
                 bool want_moments, bool want_D) {
    double xi = eff.xi, f = eff.f, w = eff.w;
    std::array<double, 2> th{};
    int nth = prox_thresholds(cfg.penalty, xi, th);
    double s = cfg.prior.s;
    bool squared = !cfg.distortion;

    RsbPass out;
    std::array<double, 2> bp{};
    auto one_xz = [&](double x, double z, double wt_xz) {
        double base = x + f * z;
        for (int i = 0; i < nth; ++i) bp[i] = (th[i] - base) / w;
        work.yrule.rebuild(std::span<const double>(bp.data(), size_t(nth)));
        auto ny = Eigen::Index(work.yrule.nodes().size());
        Eigen::Map<const Eigen::ArrayXd> yv(work.yrule.nodes().data(), ny);
        Eigen::Map<const Eigen::ArrayXd> wv(work.yrule.weights().data(), ny);

        work.t = base + w * yv;
        prox_array(cfg.penalty, work.t, xi, work.g);
        value_array(cfg.penalty, work.g, work.u);
        // K(v) = (1/2 xi)[(x-v)^2 + 2(x-v)(f z + w y)] + u(v) at v = g
        work.dv = work.g - x;
        work.K = (0.5 / xi) * (work.dv.square() - 2.0 * work.dv * (f * z + w * yv)) + work.u;
        double Kmin = work.K.minCoeff();
        if (!std::isfinite(Kmin)) throw NonFiniteError("inner objective non-finite");
        work.e = wv * (-mu * (work.K - Kmin)).exp();
        double Z = work.e.sum();
        if (!(Z > 0.0) || !std::isfinite(Z)) throw NonFiniteError("tilted normalizer degenerate");
        double lnZ = std::log(Z);
        // E[I log I] with I = e^{-mu(K-Kmin)}/Z: weights e/Z against log I
        out.EIlogI += wt_xz * ((work.e * (-mu * (work.K - Kmin) - lnZ)).sum() / Z);
        if (want_moments) {
            out.A1 += wt_xz * z * (work.e * work.dv).sum() / Z;
            out.A2 += wt_xz * (work.e * work.dv * yv).sum() / Z;
            out.A3 += wt_xz * (work.e * work.dv.square()).sum() / Z;
        }
        if (want_D) {
            if (squared) {
                out.D += wt_xz * (work.e * work.dv.square()).sum() / Z;
            } else {
                work.dist.resize(ny);
                for (Eigen::Index i = 0; i < ny; ++i)
                    work.dist[i] = cfg.distortion(work.g[i], x);
                out.D += wt_xz * (work.e * work.dist).sum() / Z;
            }
        }
    };

    // like the y-axis, the z- and x-axes carry prox-transition features (of
    // width ~w/f and ~f); each axis is cut at the thresholds mapped into its
    // own coordinates so the panel rules resolve them
    std::array<double, 2> zb{};
    auto one_x = [&](double x, double wx) {
        int nzb = 0;
        if (f > 1e-14)
            for (; nzb < nth; ++nzb) zb[nzb] = (th[nzb] - x) / f;
        work.zrule.rebuild(std::span<const double>(zb.data(), size_t(nzb)));
        auto zs = work.zrule.nodes();
        auto zw = work.zrule.weights();
        for (size_t i = 0; i < zs.size(); ++i) one_xz(x, zs[i], wx * zw[i]);
    };
    one_x(0.0, 1.0 - s);
    if (s > 0.0) {
        work.xrule.rebuild(std::span<const double>(th.data(), size_t(nth)));
        auto xs = work.xrule.nodes();
        auto xw = work.xrule.weights();
        for (size_t i = 0; i < xs.size(); ++i) one_x(xs[i], s * xw[i]);
    }
    return out;
}

// closed-form part of the stationarity right-hand side; EIlogI is added by
// the caller from a pass
double mu_rhs_closed(const SystemConfig& cfg, const RsbEffective& eff, double chi, double q,
                     double p, double mu) {
    double rint = r_integral(cfg.ensemble, cfg.lambda, chi, eff.rho);
    return rint / (2.0 * cfg.lambda) +
           mu * mu * eff.w * eff.w / (2.0 * eff.xi * eff.xi) * (p - q);
}

// residual of the scalar stationarity equation (RHS - LHS)
double mu_residual(const SystemConfig& cfg, RsbWork& work, double chi, double q, double p,
                   double mu) {
    RsbEffective eff = rsb_effective_params(cfg, chi, q, p, mu);
    double rhs = mu_rhs_closed(cfg, eff, chi, q, p, mu);
    if (eff.w > 1e-12) rhs += rsb_pass(cfg, work, mu, eff, false, false).EIlogI;
    return rhs - mu * p / (2.0 * eff.xi);
}

struct Bracket {
    double a, b, fa, fb;
};

// Ridders' method, bracket-preserving
template <class F>
double ridders(F&& fn, Bracket br, double rel_tol) {
    double a = br.a, b = br.b, fa = br.fa, fb = br.fb;
    for (int it = 0; it < 80; ++it) {
        double m = 0.5 * (a + b);
        if (b - a < rel_tol * std::abs(m)) return m;
        double fm = fn(m);
        if (fm == 0.0) return m;
        double s2 = fm * fm - fa * fb;
        if (s2 <= 0.0) {  // degenerate: plain bisection step
            if (fa * fm < 0.0) {
                b = m;
                fb = fm;
            } else {
                a = m;
                fa = fm;
            }
            continue;
        }
        double x = m + (m - a) * ((fa >= fb ? 1.0 : -1.0) * fm / std::sqrt(s2));
        double fx = fn(x);
        if (fx == 0.0) return x;
        if (fm * fx < 0.0) {
            a = std::min(m, x);
            b = std::max(m, x);
            fa = m < x ? fm : fx;
            fb = m < x ? fx : fm;
        } else if (fa * fx < 0.0) {
            b = x;
            fb = fx;
        } else {
            a = x;
            fa = fx;
        }
    }
    return 0.5 * (a + b);
}

constexpr double kMuLo = 1e-4, kMuHi = 1e4;
constexpr int kMuGrid = 64;

// full log-grid scan collecting every bracketing interval; the stationarity
// equation can have several roots and each is a candidate branch
void mu_grid_scan_all(const SystemConfig& cfg, RsbWork& work, double chi, double q, double p,
                      std::vector<Bracket>& out, int& sign_changes) {
    double ratio = std::pow(kMuHi / kMuLo, 1.0 / (kMuGrid - 1));
    double prev_mu = 0.0, prev_f = 0.0;
    bool have_prev = false;
    out.clear();
    sign_changes = 0;
    double m = kMuLo;
    for (int i = 0; i < kMuGrid; ++i, m *= ratio) {
        double fv;
        try {
            fv = mu_residual(cfg, work, chi, q, p, m);
        } catch (const std::runtime_error&) {
            have_prev = false;
            continue;
        }
        if (!std::isfinite(fv)) {
            have_prev = false;
            continue;
        }
        if (have_prev && prev_f * fv < 0.0) {
            ++sign_changes;
            out.push_back({prev_mu, m, prev_f, fv});
        }
        prev_mu = m;
        prev_f = fv;
        have_prev = true;
    }
}

bool mu_grid_scan(const SystemConfig& cfg, RsbWork& work, double chi, double q, double p,
                  Bracket& out, int& sign_changes) {
    std::vector<Bracket> all;
    mu_grid_scan_all(cfg, work, chi, q, p, all, sign_changes);
    if (all.empty()) return false;
    out = all.front();
    return true;
}

template <class F>
double bisect(F&& fn, Bracket br, double rel_tol) {
    double a = br.a, b = br.b, fa = br.fa;
    for (int i = 0; i < 200 && (b - a) > rel_tol * std::max(1.0, std::abs(a)); ++i) {
        double m = 0.5 * (a + b);
        double fm = fn(m);
        if (fm == 0.0) return m;
        if (fa * fm < 0.0) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    return 0.5 * (a + b);
}

struct MuState {
    double mu = 0.0;  // 0 = nothing solved yet
    int sign_changes = 0;
};

// solve the stationarity equation near a previous root, widening the
// bracket geometrically; full grid scan as a fallback. False when no sign
// change exists anywhere on the mu grid.
bool warm_mu(const SystemConfig& cfg, RsbWork& work, double chi, double q, double p, MuState& ms) {
    auto fn = [&](double m) { return mu_residual(cfg, work, chi, q, p, m); };
    if (ms.mu > 0.0) {
        double lo = std::max(ms.mu / 1.5, kMuLo), hi = std::min(ms.mu * 1.5, kMuHi);
        try {
            double flo = fn(lo), fhi = fn(hi);
            for (int grow = 0; grow < 6 && flo * fhi > 0.0; ++grow) {
                if (std::abs(flo) < std::abs(fhi)) {
                    lo = std::max(lo * 0.5, kMuLo);
                    flo = fn(lo);
                } else {
                    hi = std::min(hi * 2.0, kMuHi);
                    fhi = fn(hi);
                }
            }
            if (flo * fhi < 0.0 && std::isfinite(flo) && std::isfinite(fhi)) {
                ms.mu = ridders(fn, {lo, hi, flo, fhi}, 1e-10);
                return true;
            }
        } catch (const std::runtime_error&) {
            // fall through to the full scan
        }
    }
    Bracket br;
    if (!mu_grid_scan(cfg, work, chi, q, p, br, ms.sign_changes)) return false;
    ms.mu = ridders(fn, br, 1e-10);
    return true;
}

struct RsbState {
    double chi, q, p, mu;
};

struct RsbStartResult {
    SolveStatus status = SolveStatus::MaxItersExceeded;
    RsbState state{0, 0, 0, 1};
    RsbState best{0, 0, 0, 1};
    double best_res = 1e300;
    int iterations = 0;
    int mu_sign_changes = 0;
};

// Damped outer iteration on (chi, q, p) with the scalar stationarity
// equation re-solved for mu after every update (root continuation from the
// previous mu; the equation can have several roots and jumping between them
// destabilizes the outer map). Cold starts are seeded by the caller with a
// root found at the start state. A slowly creeping iteration that stops
// making real progress is cut off by an improvement-window check.
RsbStartResult run_rsb_start(const SystemConfig& cfg, RsbWork& work, const RsbOptions& opts,
                             RsbStart start) {
    constexpr int kWindow = 250;
    RsbStartResult out;
    double chi = start.chi, q = start.q, p = std::max(start.p, 0.0), mu = 1.0;
    MuState ms;
    if (p >= 1e-14) {
        if (start.mu > 0.0) {
            mu = std::clamp(start.mu, kMuLo, kMuHi);
            ms.mu = mu;
        } else {
            if (!warm_mu(cfg, work, chi, q, p, ms)) {
                out.status = SolveStatus::MuRootNotBracketed;
                out.mu_sign_changes = ms.sign_changes;
                out.best = {chi, q, p, 1.0};
                return out;
            }
            mu = ms.mu;
        }
    }
    double alpha = opts.damping;
    double prev_d[3] = {0, 0, 0};
    int alternations = 0;
    double window_best = 1e300;
    out.best = {chi, q, p, mu};
    static const bool trace = std::getenv("RCS_RSB_TRACE") != nullptr;
    for (int it = 0; it < opts.max_iters; ++it) {
        out.iterations = it + 1;
        double cn, qn, pn;
        bool breaking = false;
        try {
            if (p < 1e-14) {
                p = 0.0;
                mu = 1.0;
                detail::RsMoments m = detail::rs_pass(cfg, work.rs, chi, q, false);
                cn = m.chi;
                qn = m.q;
                pn = 0.0;
            } else {
                RsbEffective eff = rsb_effective_params(cfg, chi, q, p, mu);
                if (eff.w < 1e-12) {
                    detail::RsMoments m = detail::rs_pass(cfg, work.rs, chi, q, false);
                    cn = m.chi;
                    qn = m.q;
                    pn = 0.0;
                } else {
                    breaking = true;
                    RsbPass pass = rsb_pass(cfg, work, mu, eff, true, false);
                    qn = pass.A3;
                    double rho_n = eff.xi / eff.f * pass.A1;
                    double chimuq_n = eff.xi / eff.w * pass.A2;
                    cn = chimuq_n - mu * qn;
                    pn = (rho_n - cn) / mu;
                    if (pn < 1e-14) pn = 0.0;
                }
            }
        } catch (const NegativeDiscriminantError&) {
            out.status = SolveStatus::InvalidNegativeDiscriminant;
            out.mu_sign_changes = ms.sign_changes;
            return out;
        } catch (const std::runtime_error&) {
            out.status = SolveStatus::NoSolution;
            out.mu_sign_changes = ms.sign_changes;
            return out;
        }
        double d[3] = {cn - chi, qn - q, pn - p};
        double res = std::max({std::abs(d[0]), std::abs(d[1]), std::abs(d[2])});
        if (trace && (it < 30 || it % 100 == 0))
            std::fprintf(stderr, "[rsb] it=%d chi=%.8g q=%.8g p=%.8g mu=%.8g res=%.3g alpha=%.4g\n",
                         it, chi, q, p, mu, res, alpha);
        if (res < out.best_res) {
            out.best_res = res;
            out.best = {chi, q, p, mu};
        }
        if (res < opts.tol) {
            if (cn < -1e-12 || qn < -1e-12) {
                out.status = SolveStatus::NoSolution;
                out.mu_sign_changes = ms.sign_changes;
                return out;
            }
            chi = std::max(cn, 0.0);
            q = std::max(qn, 0.0);
            p = pn;
            if (p >= 1e-14) {
                // close the stationarity equation at the accepted state
                if (!warm_mu(cfg, work, chi, q, p, ms)) {
                    out.status = SolveStatus::MuRootNotBracketed;
                    out.mu_sign_changes = ms.sign_changes;
                    return out;
                }
                mu = ms.mu;
                // closing the root at the accepted state can shift it;
                // confirm the map is still a fixed point there
                try {
                    RsbEffective eff = rsb_effective_params(cfg, chi, q, p, mu);
                    if (eff.w >= 1e-12) {
                        RsbPass pass = rsb_pass(cfg, work, mu, eff, true, false);
                        double qn2 = pass.A3;
                        double rho2 = eff.xi / eff.f * pass.A1;
                        double cn2 = eff.xi / eff.w * pass.A2 - mu * qn2;
                        double pn2 = std::max((rho2 - cn2) / mu, 0.0);
                        double res2 =
                            std::max({std::abs(cn2 - chi), std::abs(qn2 - q), std::abs(pn2 - p)});
                        if (res2 >= opts.tol)
                            continue;  // not closed yet: keep iterating at the exact root
                    }
                } catch (const NegativeDiscriminantError&) {
                    out.status = SolveStatus::InvalidNegativeDiscriminant;
                    out.mu_sign_changes = ms.sign_changes;
                    return out;
                } catch (const std::runtime_error&) {
                    out.status = SolveStatus::NoSolution;
                    out.mu_sign_changes = ms.sign_changes;
                    return out;
                }
            } else {
                p = 0.0;
                mu = 1.0;
            }
            out.status = SolveStatus::Converged;
            out.state = {chi, q, p, mu};
            out.mu_sign_changes = ms.sign_changes;
            return out;
        }
        bool flipped = false;
        for (int i = 0; i < 3; ++i) flipped = flipped || d[i] * prev_d[i] < 0.0;
        if (flipped) {
            if (++alternations >= 6) {
                alpha = std::max(alpha * 0.5, 1.0 / 64.0);
                alternations = 0;
            }
        } else {
            alternations = 0;
        }
        for (int i = 0; i < 3; ++i) prev_d[i] = d[i];
        chi += alpha * d[0];
        q += alpha * d[1];
        p += alpha * d[2];
        if (p < 0.0) p = 0.0;
        if (breaking && p >= 1e-14) {
            // the root moves with the state, and jumping between the
            // equation's several roots destabilizes the outer map, so it is
            // re-solved by continuation after every accepted update
            if (!warm_mu(cfg, work, chi, q, p, ms)) {
                out.status = SolveStatus::MuRootNotBracketed;
                out.mu_sign_changes = ms.sign_changes;
                return out;
            }
            mu = ms.mu;
        }
        if (std::abs(chi) > 1e8 || std::abs(q) > 1e8) {
            out.status = SolveStatus::NoSolution;
            out.mu_sign_changes = ms.sign_changes;
            return out;
        }
        if ((it + 1) % kWindow == 0) {
            if (out.best_res > 0.9 * window_best) break;  // stalled: <10% per window
            window_best = out.best_res;
        }
    }
    out.status = SolveStatus::MaxItersExceeded;
    out.state = {chi, q, std::max(p, 0.0), mu};
    out.mu_sign_changes = ms.sign_changes;
    return out;
}

RsbSolution finish_solution(const SystemConfig& cfg, RsbWork& work, const RsbStartResult& r) {
    RsbSolution sol;
    sol.status = r.status;
    sol.iterations = r.iterations;
    sol.mu_sign_changes = r.mu_sign_changes;
    const RsbState& st = r.status == SolveStatus::Converged ? r.state : r.best;
    sol.chi = st.chi;
    sol.q = st.q;
    sol.p = st.p;
    sol.mu = st.p > 0.0 ? st.mu : 1.0;
    sol.residual = r.status == SolveStatus::Converged ? 0.0 : r.best_res;
    sol.rho = sol.chi + sol.mu * sol.p;
    try {
        if (sol.p < 1e-14) {
            auto [xi, f] = rs_effective_params(cfg, sol.chi, sol.q);
            sol.xi = xi;
            sol.f = f;
            sol.w = 0.0;
            detail::RsMoments m = detail::rs_pass(cfg, work.rs, sol.chi, sol.q, true);
            sol.D = m.D;
            if (r.status == SolveStatus::Converged)
                sol.residual = std::max(std::abs(m.chi - sol.chi), std::abs(m.q - sol.q));
        } else {
            RsbEffective eff = rsb_effective_params(cfg, sol.chi, sol.q, sol.p, sol.mu);
            sol.xi = eff.xi;
            sol.f = eff.f;
            sol.w = eff.w;
            RsbPass pass = rsb_pass(cfg, work, sol.mu, eff, true, true);
            sol.D = pass.D;
            if (r.status == SolveStatus::Converged) {
                double qn = pass.A3;
                double rho_n = eff.xi / eff.f * pass.A1;
                double cn = eff.xi / eff.w * pass.A2 - sol.mu * qn;
                double pn = std::max((rho_n - cn) / sol.mu, 0.0);
                sol.residual = std::max(
                    {std::abs(cn - sol.chi), std::abs(qn - sol.q), std::abs(pn - sol.p)});
            }
        }
    } catch (const std::runtime_error&) {
        sol.D = sol.q;  // best effort for non-evaluable quasi-states
    }
    return sol;
}

void collect_result(const SystemConfig& cfg, RsbWork& work, const RsbStartResult& r,
                    std::vector<RsbSolution>& converged, bool& have_breaking,
                    RsbStartResult& best_fail, bool& have_fail) {
    if (r.status == SolveStatus::Converged) {
        for (auto& s : converged)
            if (std::max({std::abs(s.chi - r.state.chi), std::abs(s.q - r.state.q),
                          std::abs(s.p - r.state.p)}) <= 1e-6)
                return;
        converged.push_back(finish_solution(cfg, work, r));
        if (r.state.p > 0.0) have_breaking = true;
    } else if (!have_fail || r.best_res < best_fail.best_res) {
        best_fail = r;
        have_fail = true;
    }
}

}  // namespace

double tilted_measure_weight(const SystemConfig& cfg, const ChannelParams& params, double mu,
                             double x, double z, double y) {
    SegmentedRule yrule(cfg.quadrature_n);
    std::array<double, 2> th{};
    int nth = prox_thresholds(cfg.penalty, params.xi, th);
    double base = x + params.f * z;
    std::array<double, 2> bp{};
    if (params.w > 0.0) {
        for (int i = 0; i < nth; ++i) bp[i] = (th[i] - base) / params.w;
        yrule.rebuild(std::span<const double>(bp.data(), size_t(nth)));
    } else {
        yrule.rebuild({});
    }
    auto Lof = [&](double yy) { return rsb_minimize(cfg.penalty, x, z, yy, params).L; };
    auto ys = yrule.nodes();
    auto ws = yrule.weights();
    double Lmin = Lof(y);
    for (size_t i = 0; i < ys.size(); ++i) Lmin = std::min(Lmin, Lof(ys[i]));
    double Z = 0.0;
    for (size_t i = 0; i < ys.size(); ++i) Z += ws[i] * std::exp(-mu * (Lof(ys[i]) - Lmin));
    if (!(Z > 0.0) || !std::isfinite(Z)) throw NonFiniteError("tilted-measure normalizer degenerate");
    return std::exp(-mu * (Lof(y) - Lmin)) / Z;
}

std::array<double, 3> rsb_iterate(const SystemConfig& cfg, double chi, double q, double p,
                                  double mu) {
    RsbWork work(cfg.quadrature_n);
    RsbEffective eff = rsb_effective_params(cfg, chi, q, p, mu);
    if (eff.w < 1e-12) {
        detail::RsMoments m = detail::rs_pass(cfg, work.rs, chi, q, false);
        return {m.chi, m.q, 0.0};
    }
    RsbPass pass = rsb_pass(cfg, work, mu, eff, true, false);
    double qn = pass.A3;
    double rho_n = eff.xi / eff.f * pass.A1;
    double cn = eff.xi / eff.w * pass.A2 - mu * qn;
    double pn = std::max((rho_n - cn) / mu, 0.0);
    if (pn < 1e-14) pn = 0.0;
    return {cn, qn, pn};
}

MuSolve solve_mu(const SystemConfig& cfg, double chi, double q, double p) {
    if (p < 1e-14) return {1.0, 0, true};  // measure collapses; conventional value
    RsbWork work(cfg.quadrature_n);
    Bracket br;
    int sc = 0;
    if (!mu_grid_scan(cfg, work, chi, q, p, br, sc)) return {1.0, sc, false};
    auto fn = [&](double m) { return mu_residual(cfg, work, chi, q, p, m); };
    return {bisect(fn, br, 1e-10), sc, true};
}

std::vector<RsbSolution> solve_1rsb(const SystemConfig& cfg, const RsbOptions& opts) {
    cfg.validate();
    RsbWork work(cfg.quadrature_n);

    std::vector<RsbStart> starts;
    if (opts.use_rs_embedding) {
        auto rs = solve_rs(cfg);
        if (!rs.empty() && rs[0].status == SolveStatus::Converged) {
            starts.push_back({rs[0].chi, rs[0].q, 0.5 * rs[0].q, 0.0});
            starts.push_back({rs[0].chi, rs[0].q, 0.0, 0.0});
        }
    }
    starts.insert(starts.end(), opts.extra_starts.begin(), opts.extra_starts.end());
    size_t flat_from = starts.size();
    if (opts.flat_probes) {
        starts.push_back({0.1, 0.1, 0.05, 0.0});
        starts.push_back({1.0, 1.0, 0.5, 0.0});
    }

    std::vector<RsbSolution> converged;
    bool have_breaking = false;
    RsbStartResult best_fail;
    bool have_fail = false;
    for (size_t si = 0; si < starts.size(); ++si) {
        // flat probes exist to find a breaking solution; once one is in
        // hand they only repeat work
        if (si >= flat_from && have_breaking) break;
        const RsbStart& st = starts[si];
        bool dup_start = false;
        for (auto& s : converged)
            if (std::max({std::abs(s.chi - st.chi), std::abs(s.q - st.q), std::abs(s.p - st.p)}) <=
                1e-9)
                dup_start = true;
        if (dup_start) continue;

        // a cold start is run once per stationarity root at its state: the
        // equation is multi-rooted and each root seeds a distinct branch
        std::vector<RsbStart> seeded;
        int seed_sc = 0;
        if (st.p >= 1e-14 && st.mu <= 0.0) {
            std::vector<Bracket> brs;
            mu_grid_scan_all(cfg, work, st.chi, st.q, st.p, brs, seed_sc);
            if (brs.size() > 4) brs.resize(4);
            auto fn = [&](double m) { return mu_residual(cfg, work, st.chi, st.q, st.p, m); };
            for (auto& br : brs) {
                try {
                    seeded.push_back({st.chi, st.q, st.p, ridders(fn, br, 1e-10)});
                } catch (const std::runtime_error&) {
                }
            }
            if (seeded.empty()) {
                RsbStartResult r;
                r.status = SolveStatus::MuRootNotBracketed;
                r.mu_sign_changes = seed_sc;
                r.best = {st.chi, st.q, st.p, 1.0};
                if (!have_fail) {
                    best_fail = r;
                    have_fail = true;
                }
                continue;
            }
        } else {
            seeded.push_back(st);
        }
        for (const RsbStart& seed : seeded) {
            RsbStartResult r = run_rsb_start(cfg, work, opts, seed);
            if (r.mu_sign_changes == 0) r.mu_sign_changes = seed_sc;
            collect_result(cfg, work, r, converged, have_breaking, best_fail, have_fail);
        }
    }
    if (!converged.empty()) {
        // a genuine breaking solution supersedes the replica-symmetric
        // collapse: the p = 0 point always solves these equations, so it is
        // only the prediction when nothing else does
        std::sort(converged.begin(), converged.end(), [](const RsbSolution& a, const RsbSolution& b) {
            bool ba = a.p > 0.0, bb = b.p > 0.0;
            if (ba != bb) return ba;
            return a.D < b.D;
        });
        return converged;
    }
    return {finish_solution(cfg, work, best_fail)};
}

}  // namespace rcs
