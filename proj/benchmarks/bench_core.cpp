#include <benchmark/benchmark.h>

#include "rcs/quadrature.hpp"
#include "rcs/rs_solver.hpp"
#include "rcs/rsb_solver.hpp"
#include "rcs/simulate.hpp"

namespace {

rcs::SystemConfig iid_config(rcs::PenaltySpec penalty, double lambda) {
    rcs::SystemConfig cfg;
    cfg.ensemble = rcs::EnsembleSpec::iid(2.0);
    cfg.penalty = std::move(penalty);
    cfg.prior.s = 0.1;
    cfg.lambda = lambda;
    cfg.lambda0 = 0.01;
    return cfg;
}

void BM_HermiteRule(benchmark::State& state) {
    for (auto _ : state) {
        auto rule = rcs::hermite_rule(int(state.range(0)));
        benchmark::DoNotOptimize(rule.x.data());
    }
}
BENCHMARK(BM_HermiteRule)->Arg(48)->Arg(96)->Arg(192);

void BM_SegmentedRebuild(benchmark::State& state) {
    rcs::SegmentedRule rule(int(state.range(0)));
    std::array<double, 2> bp{-1.3, 2.7};
    for (auto _ : state) {
        rule.rebuild(std::span<const double>(bp.data(), 2));
        benchmark::DoNotOptimize(rule.nodes().data());
    }
}
BENCHMARK(BM_SegmentedRebuild)->Arg(96);

void BM_ProxSoftThreshold(benchmark::State& state) {
    auto pen = rcs::PenaltySpec::l1();
    double y = -3.0;
    for (auto _ : state) {
        double acc = 0.0;
        for (int i = 0; i < 1000; ++i) acc += rcs::prox(pen, y + 0.001 * i, 0.7);
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_ProxSoftThreshold);

void BM_RsIterate(benchmark::State& state) {
    auto cfg = iid_config(rcs::PenaltySpec::l1(), 0.1);
    cfg.quadrature_n = int(state.range(0));
    for (auto _ : state) {
        auto next = rcs::rs_iterate(cfg, 0.3, 0.05);
        benchmark::DoNotOptimize(next);
    }
}
BENCHMARK(BM_RsIterate)->Arg(48)->Arg(96);

void BM_RsSolve(benchmark::State& state) {
    auto cfg = iid_config(rcs::PenaltySpec::l1(), 0.1);
    for (auto _ : state) {
        auto sols = rcs::solve_rs(cfg);
        benchmark::DoNotOptimize(sols.data());
    }
}
BENCHMARK(BM_RsSolve);

void BM_RsbIterate(benchmark::State& state) {
    auto cfg = iid_config(rcs::PenaltySpec::l0(), 1.0);
    cfg.ensemble.r = 4.0;
    cfg.quadrature_n = int(state.range(0));
    for (auto _ : state) {
        auto next = rcs::rsb_iterate(cfg, 0.032, 0.062, 0.005, 11.0);
        benchmark::DoNotOptimize(next);
    }
}
BENCHMARK(BM_RsbIterate)->Arg(48)->Arg(96);

void BM_ReconstructL1(benchmark::State& state) {
    rcs::SimConfig cfg;
    cfg.n = int(state.range(0));
    cfg.ensemble = rcs::EnsembleSpec::iid(2.0);
    cfg.penalty = rcs::PenaltySpec::l1();
    cfg.prior.s = 0.1;
    cfg.lambda = 0.1;
    cfg.lambda0 = 0.01;
    cfg.seed = 7;
    Eigen::MatrixXd A;
    Eigen::VectorXd x, y;
    rcs::sample_system(cfg, 0, A, x, y);
    for (auto _ : state) {
        auto xhat = rcs::reconstruct(A, y, cfg.penalty, cfg.lambda);
        benchmark::DoNotOptimize(xhat.data());
    }
}
BENCHMARK(BM_ReconstructL1)->Arg(200)->Arg(800);

void BM_ReconstructL2(benchmark::State& state) {
    rcs::SimConfig cfg;
    cfg.n = int(state.range(0));
    cfg.ensemble = rcs::EnsembleSpec::iid(2.0);
    cfg.penalty = rcs::PenaltySpec::l2();
    cfg.prior.s = 0.1;
    cfg.lambda = 0.01;
    cfg.lambda0 = 0.01;
    cfg.seed = 7;
    Eigen::MatrixXd A;
    Eigen::VectorXd x, y;
    rcs::sample_system(cfg, 0, A, x, y);
    for (auto _ : state) {
        auto xhat = rcs::reconstruct(A, y, cfg.penalty, cfg.lambda);
        benchmark::DoNotOptimize(xhat.data());
    }
}
BENCHMARK(BM_ReconstructL2)->Arg(200)->Arg(800);

}  // namespace

BENCHMARK_MAIN();
