#include "rcs/scalar_channel.hpp"

#include <algorithm>
#include <cmath>

#include "rcs/errors.hpp"

namespace rcs {

double PenaltySpec::value(double v) const {
    switch (kind) {
        case PenaltyKind::L2:
            return 0.5 * v * v;
        case PenaltyKind::L1:
            return std::abs(v);
        case PenaltyKind::L0:
            return v != 0.0 ? 1.0 : 0.0;
        case PenaltyKind::Custom:
            return custom_u(v);
    }
    return 0.0;
}

namespace {

// golden-section on [a,b] for a unimodal section of phi
template <class F>
double golden(F& phi, double a, double b) {
    constexpr double inv = 0.6180339887498949;  // 1/golden ratio
    double c = b - inv * (b - a);
    double d = a + inv * (b - a);
    double fc = phi(c), fd = phi(d);
    while (b - a > 1e-10) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv * (b - a);
            fd = phi(d);
        }
    }
    return 0.5 * (a + b);
}

double custom_prox(const PenaltySpec& penalty, double y, double xi) {
    auto phi = [&](double v) { return 0.5 / xi * (y - v) * (y - v) + penalty.value(v); };
    double half = 6.0 * std::sqrt(xi);
    constexpr int kStarts = 33;
    double best_v = y, best = phi(y);
    double lo = y - half, step = 2.0 * half / (kStarts - 1);
    for (int i = 0; i < kStarts; ++i) {
        double v = lo + i * step;
        double p = phi(v);
        if (p < best) {
            best = p;
            best_v = v;
        }
    }
    // unbounded-below guard: strictly improving beyond the probed range
    if ((best_v <= lo + 1e-12 && phi(lo - half) < best) ||
        (best_v >= lo + (kStarts - 1) * step - 1e-12 && phi(y + 2.0 * half) < best))
        throw NoMinimizerError("custom penalty appears unbounded below");
    double g = golden(phi, best_v - step, best_v + step);
    return phi(g) <= best ? g : best_v;
}

}  // namespace

double prox(const PenaltySpec& penalty, double y, double xi) {
    switch (penalty.kind) {
        case PenaltyKind::L2:
            return y / (1.0 + xi);
        case PenaltyKind::L1: {
            double m = std::abs(y) - xi;
            return m > 0.0 ? std::copysign(m, y) : 0.0;
        }
        case PenaltyKind::L0:
            // tie at |y| = sqrt(2 xi) resolved toward 0 (the sparser point)
            return std::abs(y) > std::sqrt(2.0 * xi) ? y : 0.0;
        case PenaltyKind::Custom:
            return custom_prox(penalty, y, xi);
    }
    return y;
}

void prox_array(const PenaltySpec& penalty, const Eigen::ArrayXd& y, double xi,
                Eigen::ArrayXd& out) {
    switch (penalty.kind) {
        case PenaltyKind::L2:
            out = y / (1.0 + xi);
            return;
        case PenaltyKind::L1:
            out = y.sign() * (y.abs() - xi).max(0.0);
            return;
        case PenaltyKind::L0:
            out = (y.abs() > std::sqrt(2.0 * xi)).select(y, 0.0);
            return;
        case PenaltyKind::Custom:
            out.resize(y.size());
            for (Eigen::Index i = 0; i < y.size(); ++i) out[i] = custom_prox(penalty, y[i], xi);
            return;
    }
}

void value_array(const PenaltySpec& penalty, const Eigen::ArrayXd& v, Eigen::ArrayXd& out) {
    switch (penalty.kind) {
        case PenaltyKind::L2:
            out = 0.5 * v.square();
            return;
        case PenaltyKind::L1:
            out = v.abs();
            return;
        case PenaltyKind::L0:
            out = (v != 0.0).cast<double>();
            return;
        case PenaltyKind::Custom:
            out.resize(v.size());
            for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = penalty.custom_u(v[i]);
            return;
    }
}

int prox_thresholds(const PenaltySpec& penalty, double xi, std::array<double, 2>& out) {
    switch (penalty.kind) {
        case PenaltyKind::L1:
            out = {xi, -xi};
            return 2;
        case PenaltyKind::L0: {
            double th = std::sqrt(2.0 * xi);
            out = {th, -th};
            return 2;
        }
        default:
            return 0;
    }
}

double rsb_objective(const PenaltySpec& penalty, double x, double z, double y,
                     const ChannelParams& params, double v) {
    double c = params.f * z + params.w * y;
    double d = x - v;
    return 0.5 / params.xi * (d * d + 2.0 * d * c) + penalty.value(v);
}

MinResult rsb_minimize(const PenaltySpec& penalty, double x, double z, double y,
                       const ChannelParams& params) {
    double g = prox(penalty, x + params.f * z + params.w * y, params.xi);
    return {rsb_objective(penalty, x, z, y, params, g), g};
}

}  // namespace rcs
