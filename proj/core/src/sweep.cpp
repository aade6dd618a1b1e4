#include "rcs/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "rcs/errors.hpp"
#include "rcs/rsb_solver.hpp"

namespace rcs {

double to_db(double D, double prior_s) {
    if (!(D > 0.0) || !(prior_s > 0.0)) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(D / prior_s);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SweepRow rs_row(const SystemConfig& sys, const RsSolution& s) {
    SweepRow r;
    r.solver = "rs";
    r.lambda = sys.lambda;
    r.rate = sys.ensemble.r;
    r.chi = s.chi;
    r.q = s.q;
    r.p = 0.0;
    r.mu = 1.0;
    r.xi = s.xi;
    r.f = s.f;
    r.w = 0.0;
    r.D = s.D;
    r.D_dB = to_db(s.D, sys.prior.s);
    r.status = s.status;
    r.iterations = s.iterations;
    return r;
}

SweepRow rsb_row(const SystemConfig& sys, const RsbSolution& s) {
    SweepRow r;
    r.solver = "rsb1";
    r.lambda = sys.lambda;
    r.rate = sys.ensemble.r;
    r.chi = s.chi;
    r.q = s.q;
    r.p = s.p;
    r.mu = s.mu;
    r.xi = s.xi;
    r.f = s.f;
    r.w = s.w;
    r.D = s.D;
    r.D_dB = to_db(s.D, sys.prior.s);
    r.status = s.status;
    r.iterations = s.iterations;
    return r;
}

bool usable(const SweepRow& r, bool converged_only) {
    if (converged_only && r.status != SolveStatus::Converged) return false;
    return std::isfinite(r.D) && r.D >= 0.0;
}

// tracks the best usable row over a 1-D lambda search
struct BestRow {
    SweepRow row;
    double obj = kInf;
    bool any = false;
    void offer(const SweepRow& r, bool converged_only) {
        double o = usable(r, converged_only) ? r.D : kInf;
        if (!any || o < obj) {
            row = r;
            obj = o;
            any = true;
        }
    }
};

template <class Eval>
void golden_refine(BestRow& best, double a, double b, int iters, Eval&& eval, bool converged_only) {
    if (!(b > a) || iters <= 0) return;
    constexpr double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    SweepRow rc = eval(c), rd = eval(d);
    best.offer(rc, converged_only);
    best.offer(rd, converged_only);
    double fc = usable(rc, converged_only) ? rc.D : kInf;
    double fd = usable(rd, converged_only) ? rd.D : kInf;
    for (int it = 2; it < iters; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            rc = eval(c);
            best.offer(rc, converged_only);
            fc = usable(rc, converged_only) ? rc.D : kInf;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            rd = eval(d);
            best.offer(rd, converged_only);
            fd = usable(rd, converged_only) ? rd.D : kInf;
        }
    }
}

SweepRow minimize_rs(const SystemConfig& base, const SweepSpec::LambdaMinimize& mini,
                     bool restricted) {
    auto eval = [&](double lam) {
        SystemConfig sys = base;
        sys.lambda = lam;
        return rs_row(sys, solve_rs(sys)[0]);
    };
    const auto& grid = mini.grid;
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (double lam : grid) rows.push_back(eval(lam));

    BestRow best;
    int arg = -1;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (!usable(rows[i], restricted)) continue;
        if (arg < 0 || rows[i].D < best.obj) arg = int(i);
        best.offer(rows[i], restricted);
    }
    if (arg < 0) {  // nothing usable anywhere: report the least-bad row as-is
        for (const auto& r : rows) best.offer(r, false);
        return best.any ? best.row : rows.front();
    }
    double a = grid[size_t(std::max(arg - 1, 0))];
    double b = grid[std::min(size_t(arg + 1), grid.size() - 1)];
    golden_refine(best, a, b, mini.refine_iters, eval, restricted);
    return best.row;
}

SweepRow minimize_rsb(const SystemConfig& base, const SweepSpec::LambdaMinimize& mini) {
    const auto& grid = mini.grid;
    std::vector<SweepRow> rows(grid.size());
    RsbStart warm{0, 0, 0};
    bool have_warm = false;
    int dead_rows = 0;  // consecutive full cold hunts that found no breaking
    // descend in lambda: the large-lambda end converges easily and seeds
    // continuation into the hard region
    for (size_t ii = grid.size(); ii-- > 0;) {
        SystemConfig sys = base;
        sys.lambda = grid[ii];
        RsbSolution s;
        bool hunted_cold = false;
        if (dead_rows >= 2) {
            // breaking is exhausted at larger lambda; the prediction below
            // is the symmetric collapse, reachable from its own start alone
            RsSolution rs = solve_rs(sys)[0];
            RsbOptions cheap;
            cheap.use_rs_embedding = false;
            cheap.flat_probes = false;
            cheap.extra_starts.push_back({rs.chi, rs.q, 0.0, 0.0});
            s = solve_1rsb(sys, cheap)[0];
        } else {
            RsbOptions opts;
            if (have_warm) {
                // a live breaking chain makes the full cold multistart redundant
                opts.extra_starts.push_back(warm);
                opts.use_rs_embedding = false;
            } else {
                hunted_cold = true;
            }
            s = solve_1rsb(sys, opts)[0];
            if (have_warm && !(s.status == SolveStatus::Converged && s.p > 0.0)) {
                RsbSolution cold = solve_1rsb(sys)[0];  // chain broke: retry cold
                hunted_cold = true;
                if (cold.status == SolveStatus::Converged) s = cold;
            }
        }
        rows[ii] = rsb_row(sys, s);
        if (s.status == SolveStatus::Converged && s.p > 0.0) {
            warm = {s.chi, s.q, s.p, s.mu};
            have_warm = true;
            dead_rows = 0;
        } else {
            have_warm = false;  // a p = 0 start can never regrow breaking
            if (hunted_cold) ++dead_rows;
        }
    }
    BestRow best;
    int arg = -1;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (!usable(rows[i], true)) continue;
        if (arg < 0 || rows[i].D < best.obj) arg = int(i);
        best.offer(rows[i], true);
    }
    if (arg < 0) {
        for (const auto& r : rows) best.offer(r, false);
        return best.any ? best.row : rows.front();
    }
    RsbStart seed{best.row.chi, best.row.q, best.row.p, best.row.mu};
    auto eval = [&](double lam) {
        SystemConfig sys = base;
        sys.lambda = lam;
        RsbOptions opts;
        if (seed.p > 0.0) {
            opts.extra_starts.push_back(seed);
            opts.use_rs_embedding = false;
        }
        return rsb_row(sys, solve_1rsb(sys, opts)[0]);
    };
    double a = grid[size_t(std::max(arg - 1, 0))];
    double b = grid[std::min(size_t(arg + 1), grid.size() - 1)];
    golden_refine(best, a, b, mini.refine_iters, eval, true);
    return best.row;
}

SweepRow sim_row(const RunConfig& cfg, const SystemConfig& sys) {
    SimConfig sc = cfg.make_sim_config();
    sc.ensemble = sys.ensemble;
    sc.lambda = sys.lambda;
    sc.lambda0 = sys.lambda0;
    SimReport rep = run_sim(sc, 1);
    SweepRow r;
    r.solver = "sim";
    r.lambda = sys.lambda;
    r.rate = sys.ensemble.r;
    r.mu = 1.0;
    r.D = rep.mean;
    r.D_dB = to_db(rep.mean, sys.prior.s);
    r.status = rep.max_iterations >= 100000 ? SolveStatus::MaxItersExceeded : SolveStatus::Converged;
    r.iterations = int(std::lround(rep.mean_iterations));
    return r;
}

SweepRow error_row(const RunConfig& cfg, SolverChoice c, const SystemConfig& sys) {
    SweepRow r;
    r.solver = solver_name(c);
    r.lambda = sys.lambda;
    r.rate = sys.ensemble.r;
    r.status = SolveStatus::NoSolution;
    r.D = std::numeric_limits<double>::quiet_NaN();
    r.D_dB = to_db(r.D, cfg.system.prior.s);
    return r;
}

}  // namespace

std::vector<SweepRow> predict_rows(const RunConfig& cfg) {
    std::vector<SweepRow> rows;
    for (SolverChoice c : cfg.solvers) {
        if (c == SolverChoice::Rs) {
            for (const RsSolution& s : solve_rs(cfg.system)) rows.push_back(rs_row(cfg.system, s));
        } else if (c == SolverChoice::Rsb1) {
            for (const RsbSolution& s : solve_1rsb(cfg.system)) rows.push_back(rsb_row(cfg.system, s));
        }
    }
    return rows;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg, const SweepOptions& opts) {
    if (!cfg.sweep) throw ConfigError("config has no \"sweep\" block");
    const SweepSpec& sp = *cfg.sweep;
    bool want_sim = std::count(cfg.solvers.begin(), cfg.solvers.end(), SolverChoice::Sim) > 0;
    if (want_sim && !cfg.sim)
        throw ConfigError("sweep includes the sim solver but config has no \"sim\" block");

    size_t npoints = sp.grid.size();
    std::vector<std::vector<SweepRow>> buf(npoints);
    auto one_point = [&](size_t i) {
        SystemConfig sys = cfg.system;
        if (sp.variable == SweepSpec::Variable::Rate)
            sys.ensemble.r = sp.grid[i];
        else
            sys.lambda = sp.grid[i];
        for (SolverChoice c : cfg.solvers) {
            try {
                switch (c) {
                    case SolverChoice::Rs:
                        if (sp.lambda_minimize)
                            buf[i].push_back(minimize_rs(sys, *sp.lambda_minimize, opts.restricted_rs));
                        else
                            buf[i].push_back(rs_row(sys, solve_rs(sys)[0]));
                        break;
                    case SolverChoice::Rsb1:
                        if (sp.lambda_minimize)
                            buf[i].push_back(minimize_rsb(sys, *sp.lambda_minimize));
                        else
                            buf[i].push_back(rsb_row(sys, solve_1rsb(sys)[0]));
                        break;
                    case SolverChoice::Sim:
                        buf[i].push_back(sim_row(cfg, sys));
                        break;
                }
            } catch (const std::exception&) {
                buf[i].push_back(error_row(cfg, c, sys));
            }
        }
    };

    int jobs = std::clamp(opts.jobs, 1, int(npoints));
    if (jobs == 1) {
        for (size_t i = 0; i < npoints; ++i) one_point(i);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&, w] {
                for (size_t i = size_t(w); i < npoints; i += size_t(jobs)) one_point(i);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<SweepRow> rows;
    for (auto& b : buf)
        for (auto& r : b) rows.push_back(std::move(r));
    return rows;
}

bool any_nonconverged(const std::vector<SweepRow>& rows) {
    for (const auto& r : rows)
        if (r.status != SolveStatus::Converged) return true;
    return false;
}

}  // namespace rcs
