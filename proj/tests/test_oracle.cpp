#include <doctest.h>

#include <cmath>

#include "brwsim/brw.hpp"
#include "brwsim/cholesky.hpp"
#include "brwsim/estimators.hpp"
#include "brwsim/oracle.hpp"
#include "brwsim/ssbrw.hpp"

using namespace brwsim;

TEST_CASE("dense walk covariance at (2,2)") {
    const auto cov = oracle::dense_covariance(TreeShape(2, 2), oracle::Kernel::brw);
    const double want[4][4] = {
        {2, 1, 0, 0}, {1, 2, 0, 0}, {0, 0, 2, 1}, {0, 0, 1, 2}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(cov.at(i, j) == want[i][j]);
}

TEST_CASE("switching kernel is the walk kernel shifted by the shared variance") {
    for (const TreeShape& shape : {TreeShape(2, 2), TreeShape(3, 3), TreeShape(5, 2)}) {
        const auto walk = oracle::dense_covariance(shape, oracle::Kernel::brw);
        const auto switching = oracle::dense_covariance(shape, oracle::Kernel::switching);
        const double shift = ssbrw::shared_variance(shape);
        for (std::size_t i = 0; i < walk.entries.size(); ++i)
            CHECK(std::abs(walk.entries[i] - switching.entries[i] - shift) < 1e-12);
    }
}

TEST_CASE("dense kernels stay PSD under the clamped factorization") {
    for (int d = 2; d <= 5; ++d)
        for (int n = 1; leaf_count_fits(TreeShape(d, n)) && leaf_count(TreeShape(d, n)) <= 1024;
             ++n) {
            for (auto kernel : {oracle::Kernel::brw, oracle::Kernel::switching}) {
                auto cov = oracle::dense_covariance(TreeShape(d, n), kernel);
                const double min_pivot =
                    cholesky_lower_inplace(cov.entries, cov.dim, -1e-9);
                CHECK(min_pivot >= -1e-9);
            }
        }
}

TEST_CASE("dense cap is enforced") {
    CHECK_THROWS_AS(oracle::dense_covariance(TreeShape(2, 11), oracle::Kernel::brw),
                    std::invalid_argument);
}

TEST_CASE("closed-form orthant references") {
    CHECK(*oracle::orthant_closed_form(TreeShape(2, 1)) == doctest::Approx(0.25));
    CHECK(*oracle::orthant_closed_form(TreeShape(3, 1)) == doctest::Approx(0.125));
    CHECK(*oracle::orthant_closed_form(TreeShape(2, 2)) ==
          doctest::Approx(1.0 / 9.0).epsilon(1e-14));
    CHECK(!oracle::orthant_closed_form(TreeShape(2, 3)).has_value());
    CHECK(!oracle::orthant_closed_form(TreeShape(3, 2)).has_value());
}

TEST_CASE("monte carlo orthant on the identity") {
    oracle::DenseCov cov;
    cov.dim = 4;
    cov.entries.assign(16, 0.0);
    for (int i = 0; i < 4; ++i) cov.at(i, i) = 1.0;
    const auto r = oracle::mc_orthant(cov, 1000000, 42, 8);
    CHECK(std::abs(r.value - 0.0625) < 3.0 * r.std_error);
    CHECK(r.std_error > 0.0);
}

TEST_CASE("monte carlo orthant matches the arcsine closed form at (2,2)") {
    const auto cov = oracle::dense_covariance(TreeShape(2, 2), oracle::Kernel::brw);
    const auto r = oracle::mc_orthant(cov, 1000000, 43, 8);
    CHECK(std::abs(r.value - 1.0 / 9.0) < 3.0 * r.std_error);
}

TEST_CASE("monte carlo orthant agrees with the naive positivity estimator") {
    const TreeShape shape(2, 3);
    const auto cov = oracle::dense_covariance(shape, oracle::Kernel::brw);
    const auto dense = oracle::mc_orthant(cov, 1000000, 44, 8);
    const auto walk =
        est::estimate_positivity(shape, 1000000, 45, 8, est::PositivityMethod::naive);
    const double joint =
        std::sqrt(dense.std_error * dense.std_error + walk.std_error * walk.std_error);
    CHECK(std::abs(dense.value - walk.value) < 3.0 * joint);
}

TEST_CASE("sample covariance basics") {
    std::vector<std::vector<double>> constant(5, std::vector<double>{1.0, -2.0, 3.0});
    const auto cov = oracle::sample_covariance(constant);
    for (double v : cov.entries) CHECK(v == 0.0);

    CHECK_THROWS_AS(oracle::sample_covariance({{1.0, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(oracle::sample_covariance({{1.0, 2.0}, {1.0}}), std::invalid_argument);
}

TEST_CASE("sample covariance recovers both kernels at (2,3)") {
    const TreeShape shape(2, 3);
    const std::int64_t reps = 100000;
    for (auto kernel : {oracle::Kernel::brw, oracle::Kernel::switching}) {
        RngStream stream(kernel == oracle::Kernel::brw ? 51 : 52, 0);
        std::vector<std::vector<double>> rows;
        rows.reserve(static_cast<std::size_t>(reps));
        for (std::int64_t i = 0; i < reps; ++i) {
            if (kernel == oracle::Kernel::brw)
                rows.push_back(brw::sample(shape, stream, SampleMode::full).values);
            else
                rows.push_back(ssbrw::sample(shape, stream, SampleMode::full).values);
        }
        const auto empirical = oracle::sample_covariance(rows);
        const auto exact = oracle::dense_covariance(shape, kernel);
        double worst = 0.0;
        for (std::size_t i = 0; i < exact.entries.size(); ++i)
            worst = std::max(worst, std::abs(empirical.entries[i] - exact.entries[i]));
        CHECK(worst <= 0.07);
    }
}
