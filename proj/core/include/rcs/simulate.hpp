#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "rcs/ensemble.hpp"
#include "rcs/scalar_channel.hpp"

namespace rcs {

// Finite-size Monte Carlo of the sampling system y = A x + z and its
// regularized least-squares reconstruction.
struct SimConfig {
    int n = 0;
    EnsembleSpec ensemble;  // IidGaussian or Projector; r sets k = round(n/r)
    PenaltySpec penalty;
    SourcePrior prior;
    double lambda = 1.0;
    double lambda0 = 0.01;
    int trials = 1;
    std::uint64_t seed = 0;
    std::function<double(double, double)> distortion;  // empty: squared error

    int k() const;
    void validate() const;
    double distort(double xhat, double x) const;
};

struct SimReport {
    double mean = 0.0;       // average per-entry distortion over trials
    double std_error = 0.0;  // sample std / sqrt(trials); 0 for a single trial
    std::vector<double> per_trial;
    std::vector<int> iterations;  // reconstruction iterations per trial (0 for direct solves)
    double mean_iterations = 0.0;
    int max_iterations = 0;
};

// Draw one system realization. Streams: x = 0, A = 1, z = 2, so the signal
// and noise realizations are identical across ensemble choices at the same
// (seed, trial).
void sample_system(const SimConfig& cfg, int trial_index, Eigen::MatrixXd& A, Eigen::VectorXd& x,
                   Eigen::VectorXd& y);

// argmin over v of (1/2 lambda) ||y - A v||^2 + sum_j u(v_j).
// L2: exact linear solve. L1: accelerated proximal gradient with adaptive
// restart, relative objective tolerance 1e-10, at most 1e5 iterations.
// L0: exhaustive support search, cols(A) <= 20 required, ties toward the
// smaller support.
Eigen::VectorXd reconstruct(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                            const PenaltySpec& penalty, double lambda, int* iterations = nullptr);

// trials independent systems; per-trial distortion (1/n) sum_j d(xhat_j; x_j),
// aggregated in trial order regardless of jobs.
SimReport run_sim(const SimConfig& cfg, int jobs = 1);

}  // namespace rcs
