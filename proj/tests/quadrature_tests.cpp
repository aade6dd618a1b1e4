#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "rcs/quadrature.hpp"

using namespace rcs;

TEST_SUITE("quadrature") {
    TEST_CASE("hermite moments") {
        GaussRule r = hermite_rule(48);
        double w = 0.0;
        for (double wi : r.w) w += wi;
        CHECK(std::abs(w - 1.0) < 1e-13);
        CHECK(std::abs(gauss_expect(r, [](double z) { return z * z; }) - 1.0) < 1e-12);
        CHECK(std::abs(gauss_expect(r, [](double z) { return z * z * z * z; }) - 3.0) < 1e-11);
        // E[cos z] = exp(-1/2), entire integrand: spectral accuracy
        CHECK(std::abs(gauss_expect(r, [](double z) { return std::cos(z); }) -
                       std::exp(-0.5)) < 1e-14);
    }

    TEST_CASE("legendre exactness") {
        GaussRule r = legendre_rule(12);
        double w = 0.0;
        for (double wi : r.w) w += wi;
        CHECK(std::abs(w - 2.0) < 1e-13);
        // degree 2n-1 = 23 polynomial integrated exactly
        double acc = 0.0;
        for (int i = 0; i < r.n(); ++i) acc += r.w[i] * std::pow(r.x[i], 22);
        CHECK(std::abs(acc - 2.0 / 23.0) < 1e-14);
        double e = 0.0;
        for (int i = 0; i < r.n(); ++i) e += r.w[i] * std::exp(r.x[i]);
        CHECK(std::abs(e - (std::exp(1.0) - std::exp(-1.0))) < 1e-14);
    }

    TEST_CASE("segmented rule nails kinked integrands where plain Hermite cannot") {
        // E[(z-a)_+] = pdf(a) - a (1 - cdf(a))
        double a = 1.0;
        double exact = normal_pdf(a) - a * (1.0 - normal_cdf(a));
        SegmentedRule seg(96);
        std::vector<double> bp{a};
        seg.rebuild(bp);
        auto relu = [a](double z) { return z > a ? z - a : 0.0; };
        double segval = gauss_expect(seg, relu);
        double plain = gauss_expect(hermite_rule(96), relu);
        CHECK(std::abs(segval - exact) < 1e-12);
        CHECK(std::abs(plain - exact) > 1e-8);  // the kink defeats a global rule
    }

    TEST_CASE("segmented rule with two kinks") {
        // E|z - b| = 2 pdf(b) + b (2 cdf(b) - 1), kink at b; plus an
        // unrelated second breakpoint which must not perturb the result
        double b = 0.7;
        double exact = 2.0 * normal_pdf(b) + b * (2.0 * normal_cdf(b) - 1.0);
        SegmentedRule seg(96);
        std::vector<double> bp{b, -1.3};
        seg.rebuild(bp);
        double v = gauss_expect(seg, [b](double z) { return std::abs(z - b); });
        CHECK(std::abs(v - exact) < 1e-12);
    }

    TEST_CASE("segmented weights integrate the normal density") {
        SegmentedRule seg(64);
        seg.rebuild({});
        double w = 0.0;
        for (double wi : seg.weights()) w += wi;
        CHECK(std::abs(w - 1.0) < 1e-10);
        std::vector<double> bp{-2.0, 0.1, 5.0};
        seg.rebuild(bp);
        w = 0.0;
        for (double wi : seg.weights()) w += wi;
        CHECK(std::abs(w - 1.0) < 1e-10);
        CHECK(int(seg.nodes().size()) >= 64);
    }

    TEST_CASE("rebuild is deterministic") {
        SegmentedRule a(48), b(48);
        std::vector<double> bp{-0.4, 0.9};
        a.rebuild(bp);
        b.rebuild(bp);
        REQUIRE(a.nodes().size() == b.nodes().size());
        for (size_t i = 0; i < a.nodes().size(); ++i) {
            CHECK(a.nodes()[i] == b.nodes()[i]);
            CHECK(a.weights()[i] == b.weights()[i]);
        }
        // distant breakpoints are ignored entirely
        std::vector<double> far{1e6};
        a.rebuild(far);
        b.rebuild({});
        REQUIRE(a.nodes().size() == b.nodes().size());
        for (size_t i = 0; i < a.nodes().size(); ++i) CHECK(a.nodes()[i] == b.nodes()[i]);
    }

    TEST_CASE("2-d tensor expectation") {
        GaussRule rz = hermite_rule(32);
        SegmentedRule ry(48);
        double v = gauss_expect_2d(
            rz, ry, [](double, std::vector<double>&) {},
            [](double z, double y) { return z * z + y * y; });
        CHECK(std::abs(v - 2.0) < 1e-10);
        // inner kink location moving with the outer variable
        double exact = 0.0;
        {
            GaussRule fine = hermite_rule(200);
            for (int i = 0; i < fine.n(); ++i) {
                double z = fine.x[i];
                exact += fine.w[i] * (normal_pdf(z) - z * (1.0 - normal_cdf(z)));
            }
        }
        double v2 = gauss_expect_2d(
            rz, ry, [](double z, std::vector<double>& bp) { bp.push_back(z); },
            [](double z, double y) { return y > z ? y - z : 0.0; });
        CHECK(std::abs(v2 - exact) < 1e-10);
    }

    TEST_CASE("non-finite integrand is rejected") {
        GaussRule r = hermite_rule(8);
        CHECK_THROWS_AS(gauss_expect(r, [](double) { return std::numeric_limits<double>::infinity(); }),
                        NonFiniteError);
    }
}
