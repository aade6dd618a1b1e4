#include "rcs/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "rcs/errors.hpp"
#include "rcs/rng.hpp"

namespace rcs {

namespace {
constexpr std::uint32_t kStreamX = 0, kStreamA = 1, kStreamZ = 2;
}

int SimConfig::k() const {
    return int(std::lround(double(n) / ensemble.r));
}

void SimConfig::validate() const {
    ensemble.validate();
    prior.validate();
    if (n <= 0) throw DomainError("n must be positive");
    if (k() < 1) throw DomainError("k = round(n/r) must be at least 1");
    if (trials < 1) throw DomainError("trials must be at least 1");
    if (!(lambda > 0.0) || !(lambda0 >= 0.0)) throw DomainError("lambda > 0 and lambda0 >= 0 required");
    if (ensemble.kind == EnsembleKind::Tabulated)
        throw DomainError("tabulated spectra cannot be sampled at finite size");
    if (penalty.kind == PenaltyKind::L0 && n > 20)
        throw SizeError("exhaustive support search requires n <= 20");
}

double SimConfig::distort(double xhat, double x) const {
    if (distortion) return distortion(xhat, x);
    double d = xhat - x;
    return d * d;
}

void sample_system(const SimConfig& cfg, int trial_index, Eigen::MatrixXd& A, Eigen::VectorXd& x,
                   Eigen::VectorXd& y) {
    int n = cfg.n, k = cfg.k();
    auto trial = std::uint32_t(trial_index);

    x.resize(n);
    CounterRng rx(cfg.seed, trial, kStreamX);
    for (int j = 0; j < n; ++j) {
        double u = rx.next_uniform();
        double v = rx.next_normal();  // always drawn, keeps entries addressable
        x[j] = u < cfg.prior.s ? v : 0.0;
    }

    CounterRng ra(cfg.seed, trial, kStreamA);
    if (cfg.ensemble.kind == EnsembleKind::IidGaussian) {
        A.resize(k, n);
        double scale = 1.0 / std::sqrt(double(k));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = scale * ra.next_normal();
    } else {
        Eigen::MatrixXd G(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) G(i, j) = ra.next_normal();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
        Eigen::MatrixXd Q = qr.householderQ();
        Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int j = 0; j < n; ++j)  // fix the sign ambiguity of the factorization
            if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
        A = std::sqrt(cfg.ensemble.r) * Q.topRows(k);
    }

    CounterRng rz(cfg.seed, trial, kStreamZ);
    Eigen::VectorXd z(k);
    double zscale = std::sqrt(cfg.lambda0);
    for (int i = 0; i < k; ++i) z[i] = zscale * rz.next_normal();
    y = A * x + z;
}

namespace {

double l1_objective(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& v,
                    double lambda) {
    return (y - A * v).squaredNorm() / (2.0 * lambda) + v.lpNorm<1>();
}

// largest eigenvalue of A^T A by power iteration from a fixed start
double top_gram_eigenvalue(const Eigen::MatrixXd& A) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(A.cols()).normalized();
    double est = 0.0;
    for (int it = 0; it < 500; ++it) {
        Eigen::VectorXd w = A.transpose() * (A * v);
        double nw = w.norm();
        if (nw == 0.0) return 0.0;
        v = w / nw;
        if (std::abs(nw - est) <= 1e-12 * nw) return nw;
        est = nw;
    }
    return est;
}

Eigen::VectorXd fista_l1(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double lambda,
                         int* iterations) {
    int n = int(A.cols());
    double L = top_gram_eigenvalue(A) * (1.0 + 1e-6) / lambda;
    if (L <= 0.0) L = 1.0;
    double step = 1.0 / L, thresh = step;

    Eigen::VectorXd v = Eigen::VectorXd::Zero(n), v_prev = v, u = v;
    double obj_prev = l1_objective(A, y, v, lambda);
    double t = 1.0;
    int it = 0;
    for (; it < 100000; ++it) {
        Eigen::VectorXd grad = A.transpose() * (A * u - y) / lambda;
        Eigen::VectorXd v_new = u - step * grad;
        for (int j = 0; j < n; ++j)
            v_new[j] = std::copysign(std::max(std::abs(v_new[j]) - thresh, 0.0), v_new[j]);
        double obj = l1_objective(A, y, v_new, lambda);
        if (obj > obj_prev) {  // momentum overshot: restart acceleration
            t = 1.0;
            u = v;
            continue;
        }
        double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        u = v_new + ((t - 1.0) / t_new) * (v_new - v);
        v_prev = v;
        v = v_new;
        t = t_new;
        if (std::abs(obj_prev - obj) <= 1e-10 * std::max(std::abs(obj_prev), 1e-30)) {
            obj_prev = obj;
            ++it;
            break;
        }
        obj_prev = obj;
    }
    if (iterations) *iterations = it;
    return v;
}

Eigen::VectorXd exhaustive_l0(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double lambda) {
    int n = int(A.cols());
    if (n > 20) throw SizeError("exhaustive support search requires n <= 20");
    double inv2l = 1.0 / (2.0 * lambda);
    Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
    double best_obj = y.squaredNorm() * inv2l;  // empty support
    // supports in order of increasing size, so an exact tie keeps the
    // smaller support
    for (int c = 1; c <= n; ++c) {
        std::uint32_t mask = (1u << c) - 1u, limit = 1u << n;
        while (mask < limit) {
            Eigen::MatrixXd As(A.rows(), c);
            std::array<int, 20> idx{};
            int m = 0;
            for (int j = 0; j < n; ++j)
                if (mask & (1u << j)) {
                    As.col(m) = A.col(j);
                    idx[m++] = j;
                }
            Eigen::VectorXd vs = As.colPivHouseholderQr().solve(y);
            double obj = (y - As * vs).squaredNorm() * inv2l + c;
            if (obj < best_obj) {
                best_obj = obj;
                best.setZero();
                for (int j = 0; j < c; ++j) best[idx[j]] = vs[j];
            }
            // next mask with the same popcount (Gosper)
            std::uint32_t lo = mask & -mask, carry = mask + lo;
            mask = carry | (((mask ^ carry) / lo) >> 2);
        }
    }
    return best;
}

}  // namespace

Eigen::VectorXd reconstruct(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                            const PenaltySpec& penalty, double lambda, int* iterations) {
    if (A.rows() != y.size()) throw SizeError("A and y dimensions disagree");
    if (iterations) *iterations = 0;
    switch (penalty.kind) {
        case PenaltyKind::L2: {
            // (A^T A + lambda I) x = A^T y via the k x k dual system
            int k = int(A.rows());
            Eigen::MatrixXd M = A * A.transpose() + lambda * Eigen::MatrixXd::Identity(k, k);
            return A.transpose() * M.llt().solve(y);
        }
        case PenaltyKind::L1:
            return fista_l1(A, y, lambda, iterations);
        case PenaltyKind::L0:
            return exhaustive_l0(A, y, lambda);
        case PenaltyKind::Custom:
            break;
    }
    throw DomainError("reconstruction implemented for l2, l1, l0 penalties only");
}

SimReport run_sim(const SimConfig& cfg, int jobs) {
    cfg.validate();
    int trials = cfg.trials;
    SimReport rep;
    rep.per_trial.assign(trials, 0.0);
    rep.iterations.assign(trials, 0);

    auto one_trial = [&](int t) {
        Eigen::MatrixXd A;
        Eigen::VectorXd x, y;
        sample_system(cfg, t, A, x, y);
        int iters = 0;
        Eigen::VectorXd xhat = reconstruct(A, y, cfg.penalty, cfg.lambda, &iters);
        double acc = 0.0;
        for (int j = 0; j < cfg.n; ++j) acc += cfg.distort(xhat[j], x[j]);
        rep.per_trial[t] = acc / cfg.n;
        rep.iterations[t] = iters;
    };

    jobs = std::clamp(jobs, 1, trials);
    if (jobs == 1) {
        for (int t = 0; t < trials; ++t) one_trial(t);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w)
            pool.emplace_back([&, w] {
                for (int t = w; t < trials; t += jobs) one_trial(t);
            });
        for (auto& th : pool) th.join();
    }

    double sum = 0.0;
    for (double d : rep.per_trial) sum += d;
    rep.mean = sum / trials;
    if (trials > 1) {
        double ss = 0.0;
        for (double d : rep.per_trial) ss += (d - rep.mean) * (d - rep.mean);
        rep.std_error = std::sqrt(ss / (trials - 1)) / std::sqrt(double(trials));
    }
    long it_sum = 0;
    for (int i : rep.iterations) {
        it_sum += i;
        rep.max_iterations = std::max(rep.max_iterations, i);
    }
    rep.mean_iterations = double(it_sum) / trials;
    return rep;
}

}  // namespace rcs
