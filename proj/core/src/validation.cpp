#include "brwsim/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "brwsim/brw.hpp"
#include "brwsim/estimators.hpp"
#include "brwsim/oracle.hpp"
#include "brwsim/parallel.hpp"
#include "brwsim/ssbrw.hpp"

namespace brwsim::validation {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

CheckResult make(const std::string& name, bool passed, const std::string& detail) {
    return CheckResult{name, passed, detail};
}

// Shapes with d^n <= 1024 for each branching factor under test.
std::vector<TreeShape> dense_shapes() {
    std::vector<TreeShape> shapes;
    for (int d = 2; d <= 5; ++d)
        for (int n = 1;; ++n) {
            TreeShape shape(d, n);
            if (leaf_count(shape) > 1024) break;
            shapes.push_back(shape);
        }
    return shapes;
}

// Collect full-field samples from either sampler, sharded.
std::vector<std::vector<double>> collect_full(const TreeShape& shape, bool switching,
                                              std::int64_t samples, std::uint64_t seed,
                                              int shards) {
    auto per_shard = run_sharded<std::vector<std::vector<double>>>(
        samples, shards, seed, [&](int, std::int64_t count, RngStream& stream) {
            std::vector<std::vector<double>> out;
            out.reserve(static_cast<std::size_t>(count));
            for (std::int64_t i = 0; i < count; ++i) {
                if (switching)
                    out.push_back(ssbrw::sample(shape, stream, SampleMode::full).values);
                else
                    out.push_back(brw::sample(shape, stream, SampleMode::full).values);
            }
            return out;
        });
    std::vector<std::vector<double>> all;
    all.reserve(static_cast<std::size_t>(samples));
    for (auto& block : per_shard)
        for (auto& row : block) all.push_back(std::move(row));
    return all;
}

bool records_identical(const est::EstimateRecord& a, const est::EstimateRecord& b) {
    return a.value == b.value && a.std_error == b.std_error && a.log_value == b.log_value &&
           a.log_std_error == b.log_std_error && a.samples == b.samples && a.ess == b.ess;
}

}  // namespace

CheckResult check_kernel_equality() {
    // The decomposition kernel plus the shared variance must reproduce the
    // walk kernel exactly, for every leaf pair of every dense shape.
    double worst = 0.0;
    int count = 0;
    for (const auto& shape : dense_shapes()) {
        const auto brw_cov = oracle::dense_covariance(shape, oracle::Kernel::brw);
        const auto sw_cov = oracle::dense_covariance(shape, oracle::Kernel::switching);
        const double shift = ssbrw::shared_variance(shape);
        for (std::size_t i = 0; i < brw_cov.entries.size(); ++i)
            worst = std::max(worst,
                             std::abs(brw_cov.entries[i] - (sw_cov.entries[i] + shift)));
        ++count;
    }
    return make("kernel-equality", worst <= 1e-10,
                "max-abs-diff=" + num(worst) + " shapes=" + std::to_string(count));
}

CheckResult check_construction_fidelity(Tier tier, std::uint64_t seed) {
    const std::int64_t samples = tier == Tier::full ? 100000 : 20000;
    const int shards = 8;
    bool passed = true;
    std::ostringstream detail;

    for (const TreeShape& shape : {TreeShape(2, 3), TreeShape(3, 2)}) {
        const double dn = static_cast<double>(leaf_count(shape));
        for (bool switching : {false, true}) {
            auto rows = collect_full(shape, switching, samples, seed + (switching ? 1 : 0),
                                     shards);
            if (switching) {
                // exact zero-sum construction: leaf totals collapse to rounding
                double worst_sum = 0.0;
                for (const auto& row : rows) {
                    double total = 0.0;
                    for (double v : row) total += v;
                    worst_sum = std::max(worst_sum, std::abs(total));
                }
                if (worst_sum > 1e-8 * dn) passed = false;
                detail << " zero-sum(d=" << shape.d << ",n=" << shape.n
                       << ")=" << num(worst_sum);
            }
            const auto empirical = oracle::sample_covariance(rows);
            const auto exact = oracle::dense_covariance(
                shape, switching ? oracle::Kernel::switching : oracle::Kernel::brw);
            double worst_sigma = 0.0;
            for (int i = 0; i < exact.dim; ++i)
                for (int j = 0; j < exact.dim; ++j) {
                    const double se = std::sqrt((exact.at(i, i) * exact.at(j, j) +
                                                 exact.at(i, j) * exact.at(i, j)) /
                                                static_cast<double>(samples));
                    worst_sigma =
                        std::max(worst_sigma, std::abs(empirical.at(i, j) - exact.at(i, j)) / se);
                }
            if (worst_sigma > 5.0) passed = false;
            detail << " cov" << (switching ? "-sw" : "-brw") << "(d=" << shape.d
                   << ",n=" << shape.n << ")=" << num(worst_sigma) << "se";
        }
    }
    return make("construction-fidelity", passed, detail.str().substr(1));
}

CheckResult check_hardwall_oracles(Tier tier, std::uint64_t seed) {
    const std::int64_t samples = tier == Tier::full ? 1000000 : 100000;
    const int shards = 8;
    bool passed = true;
    std::ostringstream detail;

    for (const TreeShape& shape : {TreeShape(2, 1), TreeShape(2, 2), TreeShape(3, 1)}) {
        const double exact = *oracle::orthant_closed_form(shape);
        const auto cond = est::estimate_positivity(shape, samples, seed, shards,
                                                   est::PositivityMethod::conditional);
        const auto naive = est::estimate_positivity(shape, samples, seed, shards,
                                                    est::PositivityMethod::naive);
        const double agree_se =
            std::sqrt(cond.std_error * cond.std_error + naive.std_error * naive.std_error);
        const bool exact_ok = std::abs(cond.value - exact) <= 3.0 * cond.std_error;
        const bool agree_ok = std::abs(cond.value - naive.value) <= 3.0 * agree_se;
        const bool variance_ok = cond.std_error < naive.std_error;
        if (!(exact_ok && agree_ok && variance_ok)) passed = false;
        detail << " (d=" << shape.d << ",n=" << shape.n << ") cond=" << num(cond.value)
               << " naive=" << num(naive.value) << " exact=" << num(exact)
               << " se-ratio=" << num(cond.std_error / naive.std_error);
    }
    return make("hardwall-oracles", passed, detail.str().substr(1));
}

CheckResult check_conditional_mean_closed_form(Tier tier, std::uint64_t seed) {
    const std::int64_t samples = tier == Tier::full ? 1000000 : 100000;
    const int shards = 8;
    std::ostringstream detail;

    // (2,1): E(X | X >= |Y|) for iid centered Gaussians = sqrt(2/pi)
    const double closed_form = 0.79788456080286536;
    const auto small = est::estimate_conditional_mean(TreeShape(2, 1), samples, seed, shards);
    const bool small_ok = std::abs(small.value - closed_form) <= 3.0 * small.std_error;
    detail << "(2,1)=" << num(small.value) << " closed-form=" << num(closed_form);

    // (2,2): against a rejection-sampling run of the same conditional mean
    const TreeShape shape(2, 2);
    const auto ratio = est::estimate_conditional_mean(shape, samples, seed, shards);
    struct Acc {
        double sum = 0.0, sum2 = 0.0;
        std::int64_t accepted = 0;
    };
    auto per_shard = run_sharded<Acc>(
        samples, shards, seed + 1, [&](int, std::int64_t count, RngStream& stream) {
            Acc acc;
            for (std::int64_t i = 0; i < count; ++i) {
                const auto s = brw::sample(shape, stream, SampleMode::full);
                bool all = true;
                double mean = 0.0;
                for (double v : s.values) {
                    all = all && v >= 0.0;
                    mean += v;
                }
                if (all) {
                    mean /= static_cast<double>(s.values.size());
                    acc.sum += mean;
                    acc.sum2 += mean * mean;
                    ++acc.accepted;
                }
            }
            return acc;
        });
    Acc total;
    for (const auto& a : per_shard) {
        total.sum += a.sum;
        total.sum2 += a.sum2;
        total.accepted += a.accepted;
    }
    const double k = static_cast<double>(total.accepted);
    const double oracle_mean = total.sum / k;
    const double oracle_se =
        std::sqrt(std::max(0.0, (total.sum2 / k - oracle_mean * oracle_mean) / k));
    const double agree_se =
        std::sqrt(ratio.std_error * ratio.std_error + oracle_se * oracle_se);
    const bool agree_ok = std::abs(ratio.value - oracle_mean) <= 3.0 * agree_se;
    detail << " (2,2) ratio=" << num(ratio.value) << " rejection=" << num(oracle_mean)
           << " accepted=" << total.accepted;

    return make("conditional-mean-closed-form", small_ok && agree_ok, detail.str());
}

CheckResult check_log_gap_growth(Tier tier, std::uint64_t seed) {
    const std::vector<int> heights = tier == Tier::full ? std::vector<int>{8, 10, 12, 14, 16}
                                                        : std::vector<int>{5, 6, 8, 10};
    const std::int64_t samples = tier == Tier::full ? 1000000 : 100000;
    const int shards = 8;

    std::vector<est::EstimateRecord> records;
    records.reserve(heights.size());
    for (int n : heights)
        records.push_back(
            est::estimate_conditional_mean(TreeShape(2, n), samples, seed, shards));
    const auto fit = est::fit_log_gap(records, brw::Centering::for_degree(2));

    std::ostringstream detail;
    detail << "slope=" << num(fit.slope) << " ci=[" << num(fit.ci_low) << ","
           << num(fit.ci_high) << "]";
    for (std::size_t i = 0; i < records.size(); ++i)
        detail << " gap(n=" << heights[i] << ")="
               << num(brw::expected_max_center(records[i].shape) - records[i].value);

    // full tier: the 95% CI itself must sit above zero; quick tier only
    // smoke-checks the point estimate's sign
    const bool passed = tier == Tier::full ? fit.ci_low > 0.0 : fit.slope > 0.0;
    return make("log-gap-growth", passed, detail.str());
}

CheckResult check_left_tail_shape(Tier tier, std::uint64_t seed) {
    const TreeShape shape = tier == Tier::full ? TreeShape(2, 12) : TreeShape(2, 8);
    const std::vector<double> lambdas = tier == Tier::full
                                            ? std::vector<double>{0.5, 1.0, 1.5, 2.0, 2.5}
                                            : std::vector<double>{0.5, 1.0, 1.5};
    const std::int64_t samples = tier == Tier::full ? 1000000 : 30000;
    const double tilt = 0.25;
    const int shards = 8;

    std::vector<est::EstimateRecord> records;
    records.reserve(lambdas.size());
    for (double lambda : lambdas)
        records.push_back(est::tilted_left_tail(shape, lambda, tilt, samples, seed, shards));

    bool ess_ok = true;
    bool decreasing = true;
    bool populated = true;
    std::ostringstream detail;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (*records[i].ess < 100.0) ess_ok = false;
        if (!records[i].log_value || !records[i].log_std_error) populated = false;
        if (i > 0 && !(records[i].value < records[i - 1].value)) decreasing = false;
        detail << " logp(" << num(lambdas[i]) << ")="
               << (records[i].log_value ? num(*records[i].log_value) : "none");
    }
    if (!populated)
        return make("left-tail-shape", false, detail.str().substr(1) + " NO-EVENTS");

    // double-exponential signature: second differences of log p negative
    // beyond propagated noise
    bool concave = true;
    if (tier == Tier::full) {
        for (std::size_t i = 1; i + 1 < records.size(); ++i) {
            const double d2 = *records[i + 1].log_value - 2.0 * *records[i].log_value +
                              *records[i - 1].log_value;
            const double var = *records[i + 1].log_std_error * *records[i + 1].log_std_error +
                               4.0 * *records[i].log_std_error * *records[i].log_std_error +
                               *records[i - 1].log_std_error * *records[i - 1].log_std_error;
            const double noise = 2.0 * std::sqrt(var);
            detail << " d2(" << num(lambdas[i]) << ")=" << num(d2) << "+-" << num(noise);
            if (!(d2 + noise < 0.0)) concave = false;
        }
    }
    return make("left-tail-shape", ess_ok && decreasing && concave,
                detail.str().substr(1) + (ess_ok ? "" : " LOW-ESS"));
}

CheckResult check_fixed_point_order() {
    // d^(c lambda') tracks n: the ratio stays inside one fixed band across
    // two orders of magnitude of n.
    const auto centering = brw::Centering::for_degree(2);
    double lo = 1e300, hi = 0.0;
    for (int n = 16; n <= 1024; ++n) {
        const TreeShape shape(2, n);
        const double lp = est::solve_lambda_prime(shape, 1.0, centering);
        const double ratio = std::exp(centering.c * lp * std::log(2.0)) / n;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    const bool passed = lo >= 0.05 && hi <= 20.0;
    return make("fixed-point-order", passed,
                "ratio-range=[" + num(lo) + "," + num(hi) + "] band=[0.05,20]");
}

CheckResult check_comparison_dominance(Tier tier, std::uint64_t seed) {
    const TreeShape shape(2, 10);
    const int n_prime = 7;
    const std::int64_t samples = tier == Tier::full ? 100000 : 20000;
    const int shards = 8;

    const double center = brw::expected_max_center(shape);
    std::vector<double> grid;
    for (double offset = -5.0; offset <= 3.0 + 1e-9; offset += 0.5)
        grid.push_back(center + offset);

    const auto walk_curve =
        est::max_cdf_curve(shape, est::Model::brw(), grid, samples, seed, shards);
    const auto comp_curve = est::max_cdf_curve(shape, est::Model::comparison(n_prime), grid,
                                               samples, seed + 1, shards);

    bool passed = true;
    double worst_margin = 1e300;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& w = walk_curve.points[i].record;
        const auto& c = comp_curve.points[i].record;
        const double joint_se =
            std::sqrt(w.std_error * w.std_error + c.std_error * c.std_error);
        const double margin = c.value - w.value + 3.0 * joint_se;
        worst_margin = std::min(worst_margin, margin);
        if (margin < 0.0) passed = false;
    }
    return make("comparison-dominance", passed,
                "grid-points=" + std::to_string(grid.size()) +
                    " worst-margin=" + num(worst_margin));
}

CheckResult check_power_sum_bound() {
    bool passed = true;
    std::ostringstream detail;
    for (int d : {2, 3}) {
        double prev_ratio = 0.0, prev_diff = 1e300;
        double worst_slack = 1e300;
        for (int n = 1; n <= 60; ++n) {
            const auto s = est::log_weighted_power_sum(n, d);
            if (!(s.sum <= s.upper)) passed = false;
            worst_slack = std::min(worst_slack, s.upper - s.sum);
            // the order-d^n band applies once the transient is over (the
            // ratio is identically 0 at n=1)
            if (n >= 3 && !(s.ratio >= 0.3 && s.ratio <= 1.2)) passed = false;
            if (n >= 2) {
                const double diff = std::abs(s.ratio - prev_ratio);
                if (diff > prev_diff + 1e-12) passed = false;
                prev_diff = diff;
            }
            prev_ratio = s.ratio;
        }
        detail << " d=" << d << " ratio(60)=" << num(prev_ratio);
    }
    return make("power-sum-bound", passed, detail.str().substr(1));
}

CheckResult check_determinism(std::uint64_t seed) {
    const int shards = 8;
    bool passed = true;

    for (int run_shards : {1, shards}) {
        const auto a = est::estimate_positivity(TreeShape(2, 6), 10000, seed, run_shards,
                                                est::PositivityMethod::conditional);
        const auto b = est::estimate_positivity(TreeShape(2, 6), 10000, seed, run_shards,
                                                est::PositivityMethod::conditional);
        if (!records_identical(a, b)) passed = false;
    }
    {
        const auto a = est::estimate_conditional_mean(TreeShape(2, 6), 10000, seed, shards);
        const auto b = est::estimate_conditional_mean(TreeShape(2, 6), 10000, seed, shards);
        if (!records_identical(a, b)) passed = false;
    }
    {
        const auto a = est::tilted_left_tail(TreeShape(2, 6), 1.0, 0.25, 10000, seed, shards);
        const auto b = est::tilted_left_tail(TreeShape(2, 6), 1.0, 0.25, 10000, seed, shards);
        if (!records_identical(a, b)) passed = false;
    }
    {
        const std::vector<double> grid{3.0, 4.0, 5.0};
        const auto a = est::max_cdf_curve(TreeShape(2, 6), est::Model::switching(), grid, 10000,
                                          seed, shards);
        const auto b = est::max_cdf_curve(TreeShape(2, 6), est::Model::switching(), grid, 10000,
                                          seed, shards);
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (!records_identical(a.points[i].record, b.points[i].record)) passed = false;
    }
    return make("determinism", passed, "bit-identical reruns at shards=1 and shards=8");
}

std::vector<CheckResult> run_suite(Tier tier, std::uint64_t seed) {
    std::vector<CheckResult> results;
    results.push_back(check_kernel_equality());
    results.push_back(check_construction_fidelity(tier, seed));
    results.push_back(check_hardwall_oracles(tier, seed));
    results.push_back(check_conditional_mean_closed_form(tier, seed));
    results.push_back(check_log_gap_growth(tier, seed));
    results.push_back(check_left_tail_shape(tier, seed));
    results.push_back(check_fixed_point_order());
    results.push_back(check_comparison_dominance(tier, seed));
    results.push_back(check_power_sum_bound());
    results.push_back(check_determinism(seed));
    return results;
}

}  // namespace brwsim::validation
