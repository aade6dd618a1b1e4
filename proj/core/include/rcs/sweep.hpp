#pragma once

#include <string>
#include <vector>

#include "rcs/config.hpp"

namespace rcs {

struct SweepRow {
    std::string solver;
    double lambda = 0.0, rate = 0.0;
    double chi = 0.0, q = 0.0, p = 0.0, mu = 1.0, xi = 0.0, f = 0.0, w = 0.0;
    double D = 0.0, D_dB = 0.0;
    SolveStatus status = SolveStatus::NoSolution;
    int iterations = 0;
};

struct SweepOptions {
    int jobs = 1;
    bool restricted_rs = false;
};

double to_db(double D, double prior_s);

// Single-point prediction at the config's system settings: every returned
// fixed point of each requested symmetric/breaking solver becomes a row
// (coexisting solutions are all reported). The sim solver is ignored here.
std::vector<SweepRow> predict_rows(const RunConfig& cfg);

// One row per grid point per requested solver, in grid-then-solver order
// independent of the job count. Rate sweeps with an inner lambda grid put
// the minimizing lambda in the lambda column; with restricted_rs the
// symmetric solver minimizes over converged points only. Monte Carlo rows
// always use the config's fixed lambda.
std::vector<SweepRow> run_sweep(const RunConfig& cfg, const SweepOptions& opts);

bool any_nonconverged(const std::vector<SweepRow>& rows);

}  // namespace rcs
