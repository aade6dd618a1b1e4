#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "rcs/ensemble.hpp"
#include "rcs/errors.hpp"
#include "rcs/quadrature.hpp"

using namespace rcs;

namespace {

// independent route: invert the atomic Stieltjes transform by bisection on
// the branch left of the spectrum (omega < 0) or right of it (omega > 0)
double atomic_r_oracle(const std::vector<std::pair<double, double>>& atoms, double omega) {
    auto G = [&](double s) {
        double g = 0.0;
        for (auto [t, m] : atoms) g += m / (t - s);
        return g;
    };
    double tmin = atoms[0].first, tmax = atoms[0].first;
    for (auto [t, m] : atoms) {
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
    }
    double lo, hi;
    if (omega < 0.0) {  // G(s) = -omega > 0 on s < tmin
        hi = tmin - 1e-12;
        lo = tmin - 1.0;
        while (G(lo) > -omega) lo -= (tmin - lo);
    } else {  // G(s) = -omega < 0 on s > tmax
        lo = tmax + 1e-12;
        hi = tmax + 1.0;
        while (G(hi) < -omega) hi += (hi - tmax);
    }
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (lo + hi);
        if ((G(m) + omega) * (G(lo) + omega) <= 0.0)
            hi = m;
        else
            lo = m;
    }
    return 0.5 * (lo + hi) - 1.0 / omega;
}

}  // namespace

TEST_SUITE("ensemble") {
    TEST_CASE("marchenko-pastur closed form") {
        EnsembleSpec mp = EnsembleSpec::iid(2.0);
        // R(w) = 1/(1 - r w)
        CHECK(std::abs(r_transform(mp, -0.25) - 1.0 / 1.5) < 1e-14);
        CHECK(std::abs(r_transform(mp, -2.0) - 0.2) < 1e-14);
        CHECK(std::abs(r_transform(mp, 0.25) - 2.0) < 1e-14);
        CHECK(std::abs(r_transform(mp, 0.0) - 1.0) < 1e-14);
        CHECK_THROWS_AS(r_transform(mp, 0.5), DomainError);   // pole at 1/r
        CHECK_THROWS_AS(r_transform(mp, 0.7), DomainError);
    }

    TEST_CASE("projector rate one is the identity gramian") {
        EnsembleSpec pr = EnsembleSpec::projector(1.0);
        for (double w : {-3.0, -0.5, -0.01, 0.0, 0.2})
            CHECK(std::abs(r_transform(pr, w) - 1.0) < 1e-14);
    }

    TEST_CASE("projector closed form against atomic stieltjes inversion") {
        double r = 4.0;
        EnsembleSpec pr = EnsembleSpec::projector(r);
        std::vector<std::pair<double, double>> atoms{{0.0, 1.0 - 1.0 / r}, {r, 1.0 / r}};
        for (double w : {-2.0, -0.25, -0.01, 0.05})
            CHECK(std::abs(r_transform(pr, w) - atomic_r_oracle(atoms, w)) < 1e-9);
    }

    TEST_CASE("point mass tabulated spectrum has constant R") {
        EnsembleSpec pm = EnsembleSpec::tabulated(2.0, {{1.7, 1.0}});
        for (double w : {-5.0, -0.3, 0.1})
            CHECK(std::abs(r_transform(pm, w) - 1.7) < 1e-9);
    }

    TEST_CASE("tabulated two-atom spectrum against the bisection oracle") {
        std::vector<std::pair<double, double>> atoms{{0.5, 0.6}, {1.75, 0.4}};
        EnsembleSpec tab = EnsembleSpec::tabulated(3.0, atoms);
        for (double w : {-1.5, -0.2, -0.03})
            CHECK(std::abs(r_transform(tab, w) - atomic_r_oracle(atoms, w)) < 1e-8);
    }

    TEST_CASE("r_integral closed form vs quadrature") {
        double lambda = 0.37;
        EnsembleSpec mp = EnsembleSpec::iid(3.0);
        double a = 0.05, b = 0.6;
        // test-side Gauss-Legendre of R(-w/lambda) over [a, b]
        GaussRule gl = legendre_rule(64);
        auto quad = [&](const EnsembleSpec& e) {
            double acc = 0.0;
            for (int i = 0; i < gl.n(); ++i) {
                double w = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[i];
                acc += 0.5 * (b - a) * gl.w[i] * r_transform(e, -w / lambda);
            }
            return acc;
        };
        CHECK(std::abs(r_integral(mp, lambda, a, b) - quad(mp)) < 1e-10);
        EnsembleSpec tab = EnsembleSpec::tabulated(2.0, {{0.4, 0.5}, {1.6, 0.5}});
        CHECK(std::abs(r_integral(tab, lambda, a, b) - quad(tab)) < 1e-8);
        // degenerate interval
        CHECK(r_integral(mp, lambda, a, a) == 0.0);
    }

    TEST_CASE("empirical R on a flat sample is exactly 1") {
        std::vector<double> eig(64, 1.0);
        for (double w : {-1.0, -0.2})
            CHECK(std::abs(empirical_r_transform(eig, w) - 1.0) < 1e-10);
    }

    TEST_CASE("empirical R on a two-point sample matches the atomic oracle") {
        std::vector<double> eig;
        for (int i = 0; i < 10; ++i) eig.push_back(i < 6 ? 0.5 : 1.75);
        std::vector<std::pair<double, double>> atoms{{0.5, 0.6}, {1.75, 0.4}};
        CHECK(std::abs(empirical_r_transform(eig, -0.4) - atomic_r_oracle(atoms, -0.4)) < 1e-8);
    }

    TEST_CASE("validation rejects bad specs") {
        CHECK_THROWS_AS(EnsembleSpec::iid(-1.0).validate(), DomainError);
        CHECK_THROWS_AS(EnsembleSpec::tabulated(2.0, {}).validate(), DomainError);
        CHECK_THROWS_AS(EnsembleSpec::tabulated(2.0, {{1.0, 0.7}, {2.0, 0.7}}).validate(),
                        DomainError);  // masses must sum to 1
        CHECK_THROWS_AS(EnsembleSpec::tabulated(2.0, {{1.0, -0.5}, {2.0, 1.5}}).validate(),
                        DomainError);
        CHECK_NOTHROW(EnsembleSpec::tabulated(2.0, {{0.5, 0.5}, {1.5, 0.5}}).validate());
    }

    TEST_CASE("spectrum csv loading and diagnostics") {
        std::string good = "/tmp/rcs_test_spectrum_good.csv";
        {
            std::ofstream f(good);
            f << "eigenvalue,mass\n0.5,0.6\n1.75,0.4\n";
        }
        EnsembleSpec e = load_spectrum_csv(good, 2.5);
        CHECK(e.kind == EnsembleKind::Tabulated);
        CHECK(e.r == 2.5);
        REQUIRE(e.spectrum.size() == 2);
        CHECK(e.spectrum[1].first == 1.75);

        std::string bad = "/tmp/rcs_test_spectrum_bad.csv";
        {
            std::ofstream f(bad);
            f << "eigenvalue,mass\n0.5,0.6\noops\n";
        }
        try {
            load_spectrum_csv(bad, 2.0);
            FAIL("expected ConfigError");
        } catch (const ConfigError& err) {
            CHECK(std::string(err.what()).find("line 3") != std::string::npos);
        }
        CHECK_THROWS_AS(load_spectrum_csv("/tmp/rcs_no_such_file.csv", 2.0), ConfigError);
        std::remove(good.c_str());
        std::remove(bad.c_str());
    }
}
