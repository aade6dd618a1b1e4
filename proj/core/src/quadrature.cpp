#include "rcs/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace rcs {

// Golub-Welsch: nodes are the eigenvalues of the symmetric tridiagonal
// Jacobi matrix of the orthogonal-polynomial recurrence, weights come from
// the first components of the eigenvectors.
static GaussRule golub_welsch(int n, double total_weight,
                              double (*offdiag)(int)) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        double b = offdiag(i);
        J(i, i - 1) = b;
        J(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        r.x[i] = es.eigenvalues()(i);
        double v0 = es.eigenvectors()(0, i);
        r.w[i] = total_weight * v0 * v0;
    }
    return r;
}

GaussRule hermite_rule(int n) {
    // probabilists' Hermite: b_i = sqrt(i); weight normalized to E[.]=1
    return golub_welsch(n, 1.0, [](int i) { return std::sqrt(double(i)); });
}

GaussRule legendre_rule(int n) {
    return golub_welsch(n, 2.0, [](int i) { return i / std::sqrt(4.0 * i * i - 1.0); });
}

SegmentedRule::SegmentedRule(int n) : n_(n) {
    GaussRule h = hermite_rule(n);
    for (int i = 0; i < h.n(); ++i) {
        if (std::abs(h.x[i]) > kWindow) {
            tail_x_.push_back(h.x[i]);
            tail_w_.push_back(h.w[i]);
        }
    }
    rebuild({});
}

const GaussRule& SegmentedRule::gl(int m) {
    if (m >= static_cast<int>(gl_cache_.size())) gl_cache_.resize(m + 1);
    if (gl_cache_[m].n() != m) gl_cache_[m] = legendre_rule(m);
    return gl_cache_[m];
}

void SegmentedRule::rebuild(std::span<const double> breakpoints) {
    bounds_.clear();
    bounds_.push_back(-kWindow);
    for (double b : breakpoints)
        if (b > -kWindow && b < kWindow) bounds_.push_back(b);
    std::sort(bounds_.begin() + 1, bounds_.end());
    bounds_.erase(std::unique(bounds_.begin(), bounds_.end(),
                              [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                  bounds_.end());
    bounds_.push_back(kWindow);

    // cut long kink-free stretches into short panels (see kMaxPanel)
    panels_.clear();
    panels_.push_back(bounds_.front());
    for (size_t i = 0; i + 1 < bounds_.size(); ++i) {
        double a = bounds_[i], b = bounds_[i + 1];
        int np = std::max(1, static_cast<int>(std::ceil((b - a) / kMaxPanel - 1e-12)));
        for (int j = 1; j <= np; ++j) panels_.push_back(a + (b - a) * j / np);
    }

    int nseg = static_cast<int>(panels_.size()) - 1;
    mass_.resize(nseg);
    double total = 0.0;
    for (int i = 0; i < nseg; ++i) {
        mass_[i] = normal_cdf(panels_[i + 1]) - normal_cdf(panels_[i]);
        total += mass_[i];
    }

    // budget split: a floor per panel, the rest proportional to mass
    int base = std::min(kMinPanelNodes, std::max(2, n_ / nseg));
    int extra = std::max(0, n_ - base * nseg);
    std::vector<int> counts(nseg, base);
    int used = 0;
    int largest = 0;
    for (int i = 0; i < nseg; ++i) {
        int e = static_cast<int>(extra * (mass_[i] / total));
        counts[i] += e;
        used += e;
        if (mass_[i] > mass_[largest]) largest = i;
    }
    counts[largest] += extra - used;

    nodes_.clear();
    weights_.clear();
    for (int i = 0; i < nseg; ++i) {
        double a = panels_[i], b = panels_[i + 1];
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        const GaussRule& g = gl(counts[i]);
        for (int j = 0; j < g.n(); ++j) {
            nodes_.push_back(mid + half * g.x[j]);
            weights_.push_back(half * g.w[j]);  // density applied below in one sweep
        }
    }
    auto m = Eigen::Index(nodes_.size());
    Eigen::Map<Eigen::ArrayXd> wz(weights_.data(), m);
    Eigen::Map<const Eigen::ArrayXd> nz(nodes_.data(), m);
    wz *= (-0.5 * nz.square()).exp() * 0.3989422804014326779;
    nodes_.insert(nodes_.end(), tail_x_.begin(), tail_x_.end());
    weights_.insert(weights_.end(), tail_w_.begin(), tail_w_.end());
}

}  // namespace rcs
