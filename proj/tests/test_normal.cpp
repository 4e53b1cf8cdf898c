#include <doctest.h>

#include <cmath>
#include <limits>

#include "brwsim/normal.hpp"
#include "reference.hpp"

using namespace brwsim;

TEST_CASE("tail at the trivial points") {
    CHECK(normal_tail(0.0) == 0.5);
    CHECK(normal_tail(std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(normal_tail(-std::numeric_limits<double>::infinity()) == 1.0);
}

TEST_CASE("tail against quadrature of the density") {
    for (double x : {-3.0, -1.0, 0.0, 0.5, 1.0, 1.96, 2.0, 4.0, 6.0}) {
        const double reference = static_cast<double>(ref::tail_by_quadrature(x));
        CHECK(normal_tail(x) == doctest::Approx(reference).epsilon(1e-12));
    }
}

TEST_CASE("tail frozen reference values") {
    // ratios keep the comparison relative even when Q is far below 1
    CHECK(normal_tail(1.96) / 0.024997895148220436 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(normal_tail(1.0) / 0.15865525393145705 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(normal_tail(5.0) / 2.8665157187919392e-07 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(normal_tail(8.0) / 6.2209605742717841e-16 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(normal_tail(20.0) / 2.7536241186062337e-89 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tail symmetry Q(x) + Q(-x) = 1") {
    for (double x = 0.0; x <= 8.0; x += 0.25)
        CHECK(normal_tail(x) + normal_tail(-x) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("log tail matches the direct value and its frozen references") {
    CHECK(normal_log_tail(8.0) == doctest::Approx(-35.013437159914550).epsilon(1e-13));
    CHECK(normal_log_tail(10.0) == doctest::Approx(-53.231285150512471).epsilon(1e-13));
    CHECK(normal_log_tail(20.0) == doctest::Approx(-203.91715537109726).epsilon(1e-13));
    CHECK(normal_log_tail(30.0) == doctest::Approx(-454.32124395634320).epsilon(1e-13));
    CHECK(normal_log_tail(50.0) == doctest::Approx(-1254.8313611394199).epsilon(1e-13));
    CHECK(normal_log_tail(100.0) == doctest::Approx(-5005.5242086942051).epsilon(1e-13));

    // branch seam: both evaluation routes agree around x = 12
    for (double x : {11.5, 11.9, 11.99, 12.01, 12.1, 12.5})
        CHECK(normal_log_tail(x) ==
              doctest::Approx(std::log(normal_tail(x))).epsilon(1e-12));
    CHECK(normal_log_tail(-3.0) == doctest::Approx(std::log(normal_tail(-3.0))).epsilon(1e-12));
}

TEST_CASE("truncated first moment equals the density") {
    CHECK(normal_density(0.0) == doctest::Approx(0.39894228040143268).epsilon(1e-14));
    for (double x : {-2.0, 0.0, 2.0}) {
        const auto integrand = [](long double z) {
            const long double inv_sqrt_2pi = 0.3989422804014326779399461L;
            return z * inv_sqrt_2pi * std::exp(-z * z / 2);
        };
        const double moment = static_cast<double>(ref::simpson(integrand, x, 8.0L, 1e-14L));
        CHECK(truncated_first_moment(x) == doctest::Approx(moment).epsilon(1e-8));
    }
}

TEST_CASE("inverse CDF against tail-based bisection") {
    // bisection through normal_tail is an evaluation route the rational
    // approximation never touches; solving Q(z) = min(p, 1-p) on the tail
    // side keeps the reference accurate for extreme p
    const auto invert = [](double p) {
        const double target = std::min(p, 1.0 - p);
        double lo = 0.0, hi = 40.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (normal_tail(mid) > target)
                lo = mid;
            else
                hi = mid;
        }
        const double z = 0.5 * (lo + hi);
        return p < 0.5 ? -z : z;
    };
    for (double p : {1e-12, 1e-6, 0.01, 0.2, 0.5, 0.8, 0.99, 1.0 - 1e-6}) {
        const double reference = invert(p);
        const double scaled_error =
            std::abs(inverse_normal_cdf(p) - reference) / std::max(1.0, std::abs(reference));
        CHECK(scaled_error < 5e-7);
    }
    CHECK(inverse_normal_cdf(0.5) == 0.0);
}
