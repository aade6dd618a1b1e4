#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "rcs/errors.hpp"

namespace rcs {

inline double normal_pdf(double z) {
    return 0.3989422804014326779 * std::exp(-0.5 * z * z);
}
inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * 0.7071067811865475244);
}

// Plain nodes/weights pair. For the Hermite rule the weights represent the
// standard normal measure (they sum to 1); for Legendre the weights are the
// usual [-1,1] ones (summing to 2).
struct GaussRule {
    std::vector<double> x, w;
    int n() const { return static_cast<int>(x.size()); }
};

GaussRule hermite_rule(int n);
GaussRule legendre_rule(int n);

// Kinks further than this many sigmas from the origin carry negligible mass
// and are ignored; Hermite tail nodes cover everything beyond the window.
inline constexpr double kWindow = 10.0;
// Stretches between kinks are subdivided into panels no longer than this:
// mapped Gauss-Legendre resolves the normal density only when a panel spans
// a couple of its unit scales.
inline constexpr double kMaxPanel = 2.0;
inline constexpr int kMinPanelNodes = 6;

// Node set for E[h(z)], z ~ N(0,1), with h smooth except at a few known
// breakpoints. The node budget n is split over the segments of [-W, W] cut
// at the breakpoints, proportionally to Gaussian mass (at least a floor per
// segment), each segment integrated by mapped Gauss-Legendre against the
// normal density. Hermite nodes outside the window handle the tails.
// rebuild() is cheap and allocation-free after the first few calls.
class SegmentedRule {
  public:
    explicit SegmentedRule(int n);

    void rebuild(std::span<const double> breakpoints);

    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }
    int budget() const { return n_; }

  private:
    const GaussRule& gl(int m);

    int n_;
    std::vector<double> tail_x_, tail_w_;
    std::vector<GaussRule> gl_cache_;
    std::vector<double> nodes_, weights_, bounds_, panels_, mass_;
};

namespace detail {
inline void check_finite(double v) {
    if (!std::isfinite(v)) throw NonFiniteError("integrand non-finite at quadrature node");
}
}  // namespace detail

template <class F>
double gauss_expect(const GaussRule& r, F&& h) {
    double acc = 0.0;
    for (int i = 0; i < r.n(); ++i) {
        double v = h(r.x[i]);
        detail::check_finite(v);
        acc += r.w[i] * v;
    }
    return acc;
}

template <class F>
double gauss_expect(const SegmentedRule& r, F&& h) {
    auto xs = r.nodes();
    auto ws = r.weights();
    double acc = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double v = h(xs[i]);
        detail::check_finite(v);
        acc += ws[i] * v;
    }
    return acc;
}

// Tensor-product E[h(z,y)] with inner-axis breakpoints depending on the
// outer variable: breaks(z, out) fills out with the y-kinks at that z.
template <class FBreaks, class F>
double gauss_expect_2d(const GaussRule& rz, SegmentedRule& ry, FBreaks&& breaks, F&& h) {
    std::vector<double> bp;
    double acc = 0.0;
    for (int i = 0; i < rz.n(); ++i) {
        double z = rz.x[i];
        bp.clear();
        breaks(z, bp);
        ry.rebuild(bp);
        acc += rz.w[i] * gauss_expect(ry, [&](double y) { return h(z, y); });
    }
    return acc;
}

template <class F>
double gauss_expect_2d(const GaussRule& rz, const GaussRule& ry, F&& h) {
    double acc = 0.0;
    for (int i = 0; i < rz.n(); ++i) {
        double z = rz.x[i];
        acc += rz.w[i] * gauss_expect(ry, [&](double y) { return h(z, y); });
    }
    return acc;
}

}  // namespace rcs
