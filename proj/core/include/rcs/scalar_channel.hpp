#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>

#include "rcs/quadrature.hpp"

namespace rcs {

// Sparse-Gaussian source: zero with probability 1-s, else standard normal.
struct SourcePrior {
    double s = 0.1;

    void validate() const {
        if (!(s >= 0.0 && s <= 1.0)) throw DomainError("sparsity must lie in [0,1]");
    }
    double second_moment() const { return s; }
};

enum class PenaltyKind { L2, L1, L0, Custom };

// Scalar penalty u(.) of the reconstruction objective. Custom penalties
// carry an arbitrary scalar function with u(0)=0, lower-bounded so that
// minimizers exist.
struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::L2;
    std::function<double(double)> custom_u;

    static PenaltySpec l2() { return {PenaltyKind::L2, {}}; }
    static PenaltySpec l1() { return {PenaltyKind::L1, {}}; }
    static PenaltySpec l0() { return {PenaltyKind::L0, {}}; }
    static PenaltySpec custom(std::function<double(double)> u) {
        return {PenaltyKind::Custom, std::move(u)};
    }

    double value(double v) const;  // u(v)
};

// Effective scalar-channel parameters: xi (effective tuning), f (effective
// noise amplitude), w (second noise amplitude in one-step-breaking mode;
// 0 in the symmetric mode).
struct ChannelParams {
    double xi = 1.0;
    double f = 0.0;
    double w = 0.0;
};

// Global minimizer of (1/2 xi)(y-v)^2 + u(v). Closed forms for the three
// built-ins; multi-start golden-section for Custom.
double prox(const PenaltySpec& penalty, double y, double xi);

// Kink/jump locations of v -> prox(penalty, y0 + t, xi) as thresholds on the
// prox input: |input| = xi for L1, sqrt(2 xi) for L0. Returns the number of
// thresholds written to out (0, or 2 as {+th, -th}).
int prox_thresholds(const PenaltySpec& penalty, double xi, std::array<double, 2>& out);

// Batched prox / penalty evaluation for the inner-loop hot path. Built-in
// penalties vectorize; Custom falls back to per-entry calls.
void prox_array(const PenaltySpec& penalty, const Eigen::ArrayXd& y, double xi, Eigen::ArrayXd& out);
void value_array(const PenaltySpec& penalty, const Eigen::ArrayXd& v, Eigen::ArrayXd& out);

// The one-step-breaking inner objective
//   K(v) = (1/2 xi)[(x-v)^2 + 2(x-v)(f z + w y)] + u(v),
// kept in this exact form: it differs from the completed-square prox
// objective by a y-dependent constant that must survive into the tilted
// measure.
double rsb_objective(const PenaltySpec& penalty, double x, double z, double y,
                     const ChannelParams& params, double v);

struct MinResult {
    double L;  // min_v K(v)
    double g;  // argmin
};

// min and argmin of K: g = prox(x + f z + w y, xi) by completing the
// square, L evaluated through rsb_objective at g.
MinResult rsb_minimize(const PenaltySpec& penalty, double x, double z, double y,
                       const ChannelParams& params);

// E_x[h(x)] under the sparse-Gaussian prior: (1-s) h(0) + s E[h(g)], the
// Gaussian part integrated by the supplied rule.
template <class H>
double prior_average(const SourcePrior& prior, const GaussRule& rule, H&& h) {
    double tail = prior.s > 0.0 ? gauss_expect(rule, h) : 0.0;
    return (1.0 - prior.s) * h(0.0) + prior.s * tail;
}

}  // namespace rcs
