#pragma once

#include <array>
#include <vector>

#include "rcs/rs_solver.hpp"

namespace rcs {

struct RsbSolution {
    double chi = 0.0, q = 0.0, p = 0.0, mu = 1.0;
    double rho = 0.0;  // chi + mu p
    double xi = 0.0, f = 0.0, w = 0.0;
    double D = 0.0;
    SolveStatus status = SolveStatus::MaxItersExceeded;
    int iterations = 0;
    double residual = 0.0;
    int mu_sign_changes = 0;  // sign changes seen on the last full mu grid scan
};

struct RsbStart {
    double chi, q, p;
    double mu = 0.0;  // 0: solve the stationarity equation cold at the start point
};

struct RsbOptions {
    double damping = 0.5;
    double tol = 1e-8;
    int max_iters = 10000;
    // default starts: the RS solution embedded with p = q/2, plus flat starts
    bool use_rs_embedding = true;
    bool flat_probes = true;  // off: only the embedding / extra_starts run
    std::vector<RsbStart> extra_starts;  // e.g. warm continuation along a sweep
};

struct RsbEffective {
    double xi, f, w, rho;
};

// Effective parameters of the one-step-breaking ansatz at (chi, q, p, mu).
// Throws NegativeDiscriminantError when either square root turns negative.
RsbEffective rsb_effective_params(const SystemConfig& cfg, double chi, double q, double p, double mu);

// Tilted weight I(x,z,y) = exp(-mu L) / E_y[exp(-mu L)], normalized over
// the inner Gaussian field on the solver's quadrature node set.
double tilted_measure_weight(const SystemConfig& cfg, const ChannelParams& params, double mu,
                             double x, double z, double y);

// One application of the outer fixed-point map at fixed mu.
std::array<double, 3> rsb_iterate(const SystemConfig& cfg, double chi, double q, double p, double mu);

struct MuSolve {
    double mu = 1.0;
    int sign_changes = 0;
    bool bracketed = true;
};

// Root of the scalar stationarity equation for mu at a fixed state,
// bracketed on a 64-point log grid over [1e-4, 1e4]; the smallest root is
// returned and every sign change is counted. At p = 0 the equation is
// vacuous and mu = 1 is returned by convention.
MuSolve solve_mu(const SystemConfig& cfg, double chi, double q, double p);

// Damped outer iteration on (chi, q, p) with mu re-solved every sweep.
// Returns all distinct converged solutions — breaking (p > 0) solutions
// first since the p = 0 collapse is only the prediction when no breaking
// solution exists — or a single best-effort entry carrying the failure
// status.
std::vector<RsbSolution> solve_1rsb(const SystemConfig& cfg, const RsbOptions& opts = {});

}  // namespace rcs
