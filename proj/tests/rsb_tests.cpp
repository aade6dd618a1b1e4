#include <cmath>
#include <vector>

#include "doctest.h"
#include "rcs/quadrature.hpp"
#include "rcs/rsb_solver.hpp"

using namespace rcs;

namespace {

SystemConfig iid_l2(double r, double lam) {
    SystemConfig cfg;
    cfg.ensemble = EnsembleSpec::iid(r);
    cfg.penalty = PenaltySpec::l2();
    cfg.prior.s = 0.1;
    cfg.lambda = lam;
    cfg.lambda0 = 0.01;
    return cfg;
}

}  // namespace

TEST_SUITE("rsb") {
    TEST_CASE("effective parameters, iid closed forms") {
        auto cfg = iid_l2(2.0, 0.01);
        double chi = 0.4, q = 0.05, p = 0.02, mu = 1.5;
        auto eff = rsb_effective_params(cfg, chi, q, p, mu);
        double rho = chi + mu * p;
        CHECK(eff.rho == doctest::Approx(rho).epsilon(1e-14));
        CHECK(eff.xi == doctest::Approx(0.01 + 2.0 * chi).epsilon(1e-12));
        // f = (lam + r chi) sqrt(lam0 + r(q-p)) / (lam + r rho)
        double f_want = (0.01 + 2.0 * chi) * std::sqrt(0.01 + 2.0 * (q - p)) / (0.01 + 2.0 * rho);
        CHECK(eff.f == doctest::Approx(f_want).epsilon(1e-9));
        // w^2 = (lam/mu) [1/(1+2chi/lam) - 1/(1+2rho/lam)] (1+2chi/lam)^2
        double Rc = 1.0 / (1.0 + 2.0 * chi / 0.01), Rr = 1.0 / (1.0 + 2.0 * rho / 0.01);
        double w2_want = (0.01 / mu) * (Rc - Rr) / (Rc * Rc);
        CHECK(eff.w * eff.w == doctest::Approx(w2_want).epsilon(1e-8));
    }

    TEST_CASE("effective parameters reduce to the symmetric ones at p=0") {
        auto cfg = iid_l2(3.0, 0.2);
        cfg.penalty = PenaltySpec::l1();
        auto eff = rsb_effective_params(cfg, 0.3, 0.04, 0.0, 2.0);
        auto [xi, f] = rs_effective_params(cfg, 0.3, 0.04);
        CHECK(eff.w == 0.0);
        CHECK(eff.xi == doctest::Approx(xi).epsilon(1e-12));
        CHECK(eff.f == doctest::Approx(f).epsilon(1e-10));
        CHECK(eff.rho == doctest::Approx(0.3).epsilon(1e-14));
    }

    TEST_CASE("negative discriminant is flagged") {
        auto cfg = iid_l2(2.0, 0.01);
        // q - p < -lam0/r makes f^2 negative
        CHECK_THROWS_AS((void)rsb_effective_params(cfg, 0.4, 0.01, 0.1, 1.0),
                        NegativeDiscriminantError);
    }

    TEST_CASE("frozen outer-map iterate") {
        // zero-norm iid system, state away from any fixed point
        auto cfg = iid_l2(2.0, 0.01);
        cfg.penalty = PenaltySpec::l0();
        auto out = rsb_iterate(cfg, 0.4, 0.05, 0.02, 1.5);
        CHECK(out[0] == doctest::Approx(0.4475138122).epsilon(2e-7));
        CHECK(out[1] == doctest::Approx(0.05348050183).epsilon(2e-7));
        CHECK(out[2] == doctest::Approx(0.01181788637).epsilon(2e-6));
    }

    TEST_CASE("outer map at p=0 reproduces the symmetric map") {
        auto cfg = iid_l2(2.0, 0.3);
        cfg.penalty = PenaltySpec::l1();
        auto out = rsb_iterate(cfg, 0.2, 0.03, 0.0, 1.0);
        auto [cn, qn] = rs_iterate(cfg, 0.2, 0.03);
        CHECK(out[0] == doctest::Approx(cn).epsilon(1e-10));
        CHECK(out[1] == doctest::Approx(qn).epsilon(1e-10));
        CHECK(out[2] == 0.0);
    }

    TEST_CASE("tilted weight normalizes and collapses at w=0") {
        auto cfg = iid_l2(2.0, 0.01);
        cfg.penalty = PenaltySpec::l0();
        double chi = 0.4, q = 0.05, p = 0.02, mu = 1.5;
        auto eff = rsb_effective_params(cfg, chi, q, p, mu);
        ChannelParams ch{eff.xi, eff.f, eff.w};
        // normalization: integrate the weight over the inner field with the
        // same segmented rule construction the solver uses
        for (double x : {0.0, 1.0}) {
            for (double z : {-0.7, 0.4}) {
                double base = x + eff.f * z;
                std::array<double, 2> th{};
                int nth = prox_thresholds(cfg.penalty, eff.xi, th);
                std::vector<double> brk;
                for (int i = 0; i < nth; ++i) brk.push_back((th[i] - base) / eff.w);
                SegmentedRule rule(cfg.quadrature_n);
                rule.rebuild(brk);
                double total = gauss_expect(rule, [&](double y) {
                    return tilted_measure_weight(cfg, ch, mu, x, z, y);
                });
                CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
            }
        }
        // w=0: objective has no y-dependence left, weight is flat
        ChannelParams flat{eff.xi, eff.f, 0.0};
        CHECK(tilted_measure_weight(cfg, flat, mu, 1.0, 0.3, -2.0) ==
              doctest::Approx(1.0).epsilon(1e-12));
        CHECK(tilted_measure_weight(cfg, flat, mu, 1.0, 0.3, 1.2) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("stationarity root is consistent at a converged point") {
        // solve a breaking system, then hand (chi,q,p) back to solve_mu:
        // the recovered root must match the converged mu
        SystemConfig cfg = iid_l2(4.0, 1.0);
        cfg.penalty = PenaltySpec::l0();
        auto sols = solve_1rsb(cfg);
        REQUIRE(!sols.empty());
        const auto& s = sols.front();
        REQUIRE(s.status == SolveStatus::Converged);
        REQUIRE(s.p > 0.0);
        auto ms = solve_mu(cfg, s.chi, s.q, s.p);
        CHECK(ms.bracketed);
        CHECK(ms.sign_changes >= 1);
        // smallest root need not be the converged branch, but some root is
        CHECK(ms.mu > 0.0);
    }

    TEST_CASE("stationarity solve at p=0 is the convention value") {
        auto cfg = iid_l2(2.0, 0.5);
        auto ms = solve_mu(cfg, 0.3, 0.05, 0.0);
        CHECK(ms.mu == 1.0);
        CHECK(ms.bracketed);
        CHECK(ms.sign_changes == 0);
    }

    TEST_CASE("convex penalties do not break symmetry") {
        for (auto [lam, pen] : {std::pair{0.01, PenaltySpec::l2()}, {0.1, PenaltySpec::l1()}}) {
            auto cfg = iid_l2(2.0, lam);
            cfg.penalty = pen;
            auto rs = solve_rs(cfg).front();
            REQUIRE(rs.status == SolveStatus::Converged);
            auto sols = solve_1rsb(cfg);
            REQUIRE(!sols.empty());
            const auto& s = sols.front();
            REQUIRE(s.status == SolveStatus::Converged);
            CHECK(s.p == 0.0);
            CHECK(s.D == doctest::Approx(rs.D).epsilon(1e-8));
            CHECK(s.chi == doctest::Approx(rs.chi).epsilon(1e-7));
        }
    }

    TEST_CASE("zero-norm breaking point at high rate" * doctest::timeout(120)) {
        // frozen anchor: iid, r=4, lambda=1 — a genuine breaking solution
        // coexists with the symmetric collapse and is reported first
        SystemConfig cfg = iid_l2(4.0, 1.0);
        cfg.penalty = PenaltySpec::l0();
        auto sols = solve_1rsb(cfg);
        REQUIRE(sols.size() >= 2);
        const auto& brk = sols.front();
        REQUIRE(brk.status == SolveStatus::Converged);
        CHECK(brk.p > 1e-4);
        CHECK(brk.mu == doctest::Approx(10.983187).epsilon(0.02));
        double db = 10.0 * std::log10(brk.D / 0.1);
        CHECK(db == doctest::Approx(-2.0668).epsilon(0.025));
        // the symmetric collapse is also reported, after the breaking one
        bool saw_p0 = false;
        for (const auto& s : sols)
            if (s.status == SolveStatus::Converged && s.p == 0.0) {
                saw_p0 = true;
                CHECK(10.0 * std::log10(s.D / 0.1) == doctest::Approx(-1.8906).epsilon(0.02));
            }
        CHECK(saw_p0);
    }
}
