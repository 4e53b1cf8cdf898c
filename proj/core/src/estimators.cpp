#include "brwsim/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "brwsim/normal.hpp"
#include "brwsim/parallel.hpp"
#include "brwsim/ssbrw.hpp"

namespace brwsim::est {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

// Log-sum-exp accumulator: exact sequential semantics, deterministic merge.
struct LogSumAcc {
    double peak = kNegInf;
    double scaled = 0.0;  // sum of exp(x - peak)

    void add(double lx) {
        if (lx == kNegInf) return;
        if (lx <= peak) {
            scaled += std::exp(lx - peak);
        } else {
            scaled = scaled * std::exp(peak - lx) + 1.0;
            peak = lx;
        }
    }
    void merge(const LogSumAcc& other) {
        if (other.scaled == 0.0) return;
        if (peak == kNegInf) {
            *this = other;
            return;
        }
        if (other.peak <= peak) {
            scaled += other.scaled * std::exp(other.peak - peak);
        } else {
            scaled = scaled * std::exp(peak - other.peak) + other.scaled;
            peak = other.peak;
        }
    }
    double log_sum() const { return scaled > 0.0 ? peak + std::log(scaled) : kNegInf; }
};

void stamp(EstimateRecord& r, const TreeShape& shape, std::int64_t samples, std::uint64_t seed,
           int shards, EstimatorKind kind, const Timer& timer) {
    r.shape = shape;
    r.samples = samples;
    r.seed = seed;
    r.shards = shards;
    r.estimator = kind;
    r.wall_seconds = timer.elapsed();
}

double max_of_model(const Model& model, const TreeShape& shape,
                    const ssbrw::LevelMixing* mixing, RngStream& stream) {
    switch (model.kind) {
        case Model::Kind::brw:
            return brw::walk_max(shape, stream);
        case Model::Kind::switching:
            return ssbrw::walk_max(*mixing, stream).max;
        case Model::Kind::comparison:
            return brw::sample_comparison_max(shape, model.n_prime, stream).max;
    }
    return 0.0;
}

// Two-sided 97.5% Student t quantiles for small residual degrees of freedom.
double t_quantile_975(int df) {
    static const double table[] = {12.7062, 4.3027, 3.1824, 2.7764, 2.5706, 2.4469, 2.3646,
                                   2.3060,  2.2622, 2.2281, 2.2010, 2.1788, 2.1604, 2.1448,
                                   2.1314,  2.1199, 2.1098, 2.1009, 2.0930, 2.0860, 2.0796,
                                   2.0739,  2.0687, 2.0639, 2.0595, 2.0555, 2.0518, 2.0484,
                                   2.0452,  2.0423};
    if (df < 1) return std::numeric_limits<double>::infinity();
    if (df <= 30) return table[df - 1];
    return 1.96;
}

}  // namespace

std::string to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::naive: return "naive";
        case EstimatorKind::conditional: return "conditional";
        case EstimatorKind::tilted: return "tilted";
    }
    return "unknown";
}

void BoundParams::validate() const {
    for (double v : {k1, k2, k3, cp, cpp, kp, kpp, c_star, p_bar, a_bar})
        if (!(v > 0.0)) throw std::invalid_argument("BoundParams: all constants must be > 0");
}

TailCurve max_cdf_curve(const TreeShape& shape, Model model, std::vector<double> thresholds,
                        std::int64_t samples, std::uint64_t seed, int shards) {
    if (samples < 100) throw std::invalid_argument("max_cdf_curve: need at least 100 samples");
    if (thresholds.empty()) throw std::invalid_argument("max_cdf_curve: no thresholds");
    for (double t : thresholds)
        if (std::isnan(t)) throw std::invalid_argument("max_cdf_curve: threshold is NaN");
    if (model.kind == Model::Kind::comparison &&
        (model.n_prime < 1 || model.n_prime > shape.n))
        throw std::invalid_argument("max_cdf_curve: comparison n' must be in [1, n]");
    std::sort(thresholds.begin(), thresholds.end());

    Timer timer;
    const ssbrw::LevelMixing mixing = model.kind == Model::Kind::switching
                                          ? ssbrw::build_level_mixing(shape)
                                          : ssbrw::LevelMixing{};
    const std::size_t nt = thresholds.size();

    auto per_shard = run_sharded<std::vector<std::int64_t>>(
        samples, shards, seed, [&](int, std::int64_t count, RngStream& stream) {
            std::vector<std::int64_t> hits(nt + 1, 0);
            for (std::int64_t i = 0; i < count; ++i) {
                const double m = max_of_model(model, shape, &mixing, stream);
                // first threshold with t >= m; one past the end when none
                const std::size_t idx = static_cast<std::size_t>(
                    std::lower_bound(thresholds.begin(), thresholds.end(), m) -
                    thresholds.begin());
                ++hits[idx];
            }
            return hits;
        });

    std::vector<std::int64_t> hits(nt + 1, 0);
    for (const auto& h : per_shard)
        for (std::size_t i = 0; i <= nt; ++i) hits[i] += h[i];

    TailCurve curve;
    curve.points.resize(nt);
    std::int64_t below = 0;
    for (std::size_t i = 0; i < nt; ++i) {
        below += hits[i];
        const double p = static_cast<double>(below) / static_cast<double>(samples);
        EstimateRecord r;
        r.value = p;
        r.std_error = std::sqrt(std::max(0.0, p * (1.0 - p) / static_cast<double>(samples)));
        if (below > 0) {
            r.log_value = std::log(p);
            r.log_std_error = r.std_error / p;
        }
        stamp(r, shape, samples, seed, shards, EstimatorKind::naive, timer);
        curve.points[i] = TailPoint{thresholds[i], std::move(r)};
    }
    return curve;
}

EstimateRecord tilted_left_tail(const TreeShape& shape, double lambda, double tilt,
                                std::int64_t samples, std::uint64_t seed, int shards) {
    if (!(lambda > 0.0)) throw std::invalid_argument("tilted_left_tail: lambda must be > 0");
    if (!(tilt >= 0.0)) throw std::invalid_argument("tilted_left_tail: tilt must be >= 0");
    if (samples < 1) throw std::invalid_argument("tilted_left_tail: need samples");

    Timer timer;
    const auto centering = brw::Centering::for_degree(shape.d);
    const double threshold = brw::expected_max_center(shape, centering) - lambda;
    const int tilt_levels = std::min<int>(
        shape.n, static_cast<int>(std::ceil(centering.c * lambda)));
    const ssbrw::LevelMixing mixing = ssbrw::build_level_mixing(shape);
    const double half_tilt_sq = 0.5 * tilt * tilt;

    struct Acc {
        double w_all = 0.0, w2_all = 0.0;
        double w_event = 0.0, w2_event = 0.0;
        std::int64_t events = 0;
    };
    auto per_shard = run_sharded<Acc>(
        samples, shards, seed, [&](int, std::int64_t count, RngStream& stream) {
            Acc acc;
            for (std::int64_t i = 0; i < count; ++i) {
                const auto walk = ssbrw::walk_max(mixing, stream, tilt_levels, tilt);
                const double w =
                    std::exp(tilt * walk.tilt_sum + static_cast<double>(walk.tilt_count) * half_tilt_sq);
                acc.w_all += w;
                acc.w2_all += w * w;
                if (walk.max <= threshold) {
                    acc.w_event += w;
                    acc.w2_event += w * w;
                    ++acc.events;
                }
            }
            return acc;
        });

    Acc total;
    for (const auto& a : per_shard) {
        total.w_all += a.w_all;
        total.w2_all += a.w2_all;
        total.w_event += a.w_event;
        total.w2_event += a.w2_event;
        total.events += a.events;
    }

    const double n = static_cast<double>(samples);
    EstimateRecord r;
    r.value = total.w_event / n;
    const double var =
        std::max(0.0, (total.w2_event - total.w_event * total.w_event / n) / (n - 1.0));
    r.std_error = std::sqrt(var / n);
    if (total.w_event > 0.0) {
        r.log_value = std::log(r.value);
        r.log_std_error = r.std_error / r.value;
    }
    r.ess = total.w2_all > 0.0 ? total.w_all * total.w_all / total.w2_all : 0.0;
    r.low_ess_warning = *r.ess < 10.0;
    stamp(r, shape, samples, seed, shards, EstimatorKind::tilted, timer);
    return r;
}

EstimateRecord estimate_positivity(const TreeShape& shape, std::int64_t samples,
                                   std::uint64_t seed, int shards, PositivityMethod method) {
    if (samples < 100) throw std::invalid_argument("estimate_positivity: need >= 100 samples");
    Timer timer;

    if (method == PositivityMethod::naive) {
        auto per_shard = run_sharded<std::int64_t>(
            samples, shards, seed, [&](int, std::int64_t count, RngStream& stream) {
                std::int64_t hits = 0;
                for (std::int64_t i = 0; i < count; ++i) {
                    const auto s = brw::sample(shape, stream, SampleMode::full);
                    bool all = true;
                    for (double v : s.values)
                        if (v < 0.0) {
                            all = false;
                            break;
                        }
                    hits += all;
                }
                return hits;
            });
        std::int64_t hits = 0;
        for (auto h : per_shard) hits += h;

        EstimateRecord r;
        const double n = static_cast<double>(samples);
        r.value = static_cast<double>(hits) / n;
        r.std_error = std::sqrt(std::max(0.0, r.value * (1.0 - r.value) / n));
        if (hits > 0) {
            r.log_value = std::log(r.value);
            r.log_std_error = r.std_error / r.value;
        }
        stamp(r, shape, samples, seed, shards, EstimatorKind::naive, timer);
        return r;
    }

    // Conditional: P(all >= 0) = E[ Q(M / sigma) ] over switching-component
    // maxima M, with Q evaluated and averaged in log space.
    const double sigma = std::sqrt(ssbrw::shared_variance(shape));
    const ssbrw::LevelMixing mixing = ssbrw::build_level_mixing(shape);

    struct Acc {
        LogSumAcc s1, s2;
    };
    auto per_shard = run_sharded<Acc>(
        samples, shards, seed, [&](int, std::int64_t count, RngStream& stream) {
            Acc acc;
            for (std::int64_t i = 0; i < count; ++i) {
                const double m = ssbrw::walk_max(mixing, stream).max;
                const double lq = normal_log_tail(m / sigma);
                acc.s1.add(lq);
                acc.s2.add(2.0 * lq);
            }
            return acc;
        });
    Acc total;
    for (const auto& a : per_shard) {
        total.s1.merge(a.s1);
        total.s2.merge(a.s2);
    }

    const double n = static_cast<double>(samples);
    const double log_mean = total.s1.log_sum() - std::log(n);
    const double log_m2 = total.s2.log_sum() - std::log(n);

    EstimateRecord r;
    r.log_value = log_mean;
    r.value = std::exp(log_mean);  // may underflow to 0; the log field is authoritative
    double log_se = kNegInf;
    if (log_m2 > 2.0 * log_mean) {
        const double log_var = log_m2 + std::log1p(-std::exp(2.0 * log_mean - log_m2));
        log_se = 0.5 * (log_var - std::log(n));
    }
    r.std_error = std::exp(log_se);
    r.log_std_error = std::exp(log_se - log_mean);  // delta method on the log scale
    stamp(r, shape, samples, seed, shards, EstimatorKind::conditional, timer);
    return r;
}

EstimateRecord estimate_conditional_mean(const TreeShape& shape, std::int64_t samples,
                                         std::uint64_t seed, int shards) {
    if (samples < 1000)
        throw std::invalid_argument("estimate_conditional_mean: need >= 1000 samples");
    Timer timer;

    const double sigma = std::sqrt(ssbrw::shared_variance(shape));
    const double log_sigma = std::log(sigma);
    constexpr double kLogSqrt2Pi = 0.91893853320467274178;
    const ssbrw::LevelMixing mixing = ssbrw::build_level_mixing(shape);

    // Per sample: numerator term a = sigma * phi(M/sigma) = E[X 1{X >= M}],
    // denominator term b = Q(M/sigma) = P(X >= M); ratio estimates
    // E(X | max <= X).  Five log-space accumulators feed the delta method.
    struct Acc {
        LogSumAcc a1, b1, a2, b2, ab;
    };
    auto per_shard = run_sharded<Acc>(
        samples, shards, seed, [&](int, std::int64_t count, RngStream& stream) {
            Acc acc;
            for (std::int64_t i = 0; i < count; ++i) {
                const double x = ssbrw::walk_max(mixing, stream).max / sigma;
                const double la = log_sigma - 0.5 * x * x - kLogSqrt2Pi;
                const double lb = normal_log_tail(x);
                acc.a1.add(la);
                acc.b1.add(lb);
                acc.a2.add(2.0 * la);
                acc.b2.add(2.0 * lb);
                acc.ab.add(la + lb);
            }
            return acc;
        });
    Acc total;
    for (const auto& a : per_shard) {
        total.a1.merge(a.a1);
        total.b1.merge(a.b1);
        total.a2.merge(a.a2);
        total.b2.merge(a.b2);
        total.ab.merge(a.ab);
    }

    const double n = static_cast<double>(samples);
    const double log_den_mean = total.b1.log_sum() - std::log(n);
    if (log_den_mean < std::log(1e-300))
        throw DenominatorUnderflow(
            "estimate_conditional_mean: every conditional weight is below 1e-300; "
            "use a smaller n or a tilted run");

    const double log_ratio = total.a1.log_sum() - total.b1.log_sum();
    // sum of squared residuals (a_i - R b_i)^2, assembled from log sums
    const double l1 = total.a2.log_sum();
    const double l2 = std::log(2.0) + log_ratio + total.ab.log_sum();
    const double l3 = 2.0 * log_ratio + total.b2.log_sum();
    const double base = std::max({l1, l2, l3});
    const double scaled =
        std::exp(l1 - base) - std::exp(l2 - base) + std::exp(l3 - base);

    EstimateRecord r;
    r.value = std::exp(log_ratio);
    r.log_value = log_ratio;
    if (scaled > 0.0) {
        const double log_rss = base + std::log(scaled);
        r.std_error = std::exp(0.5 * log_rss - total.b1.log_sum());
        r.log_std_error = r.std_error / r.value;
    }
    stamp(r, shape, samples, seed, shards, EstimatorKind::conditional, timer);
    return r;
}

double solve_lambda_prime(const TreeShape& shape, double cpp, const brw::Centering& centering) {
    if (!(cpp > 0.0)) throw std::invalid_argument("solve_lambda_prime: cpp must be > 0");
    const double center = brw::expected_max_center(shape, centering);
    const double s2 = ssbrw::shared_variance(shape);
    const double log_d = std::log(static_cast<double>(shape.d));
    const auto f = [&](double lambda) {
        return center - lambda - s2 * cpp * centering.c * std::exp(centering.c * lambda * log_d) * log_d;
    };
    if (!(f(0.0) > 0.0))
        throw NoInteriorRoot("solve_lambda_prime: no root in (0, m); degenerate parameters");

    double lo = 0.0, hi = center;
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) <= 1e-9) return mid;
        if (fm > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return mid;
}

double solve_lambda_prime(const TreeShape& shape, double cpp) {
    return solve_lambda_prime(shape, cpp, brw::Centering::for_degree(shape.d));
}

LogBounds positivity_bounds(const TreeShape& shape, const BoundParams& params,
                            double lambda_prime, const brw::Centering& centering) {
    params.validate();
    if (!std::isfinite(lambda_prime))
        throw std::invalid_argument("positivity_bounds: lambda_prime must be finite");
    const double gap = brw::expected_max_center(shape, centering) - lambda_prime;
    const double s2 = ssbrw::shared_variance(shape);
    const double log_d = std::log(static_cast<double>(shape.d));
    LogBounds b;
    b.log_lower = std::log(params.k1) - gap * gap / (2.0 * s2) - params.k3 * gap;
    b.log_upper = std::log(params.k2) - gap * gap / (2.0 * s2) - gap / (centering.c * s2 * log_d);
    return b;
}

TailBounds left_tail_bounds(const TreeShape& shape, double lambda, const BoundParams& params,
                            const brw::Centering& centering) {
    params.validate();
    if (!(lambda >= 0.0)) throw std::invalid_argument("left_tail_bounds: lambda must be >= 0");
    const double grown = std::exp(centering.c * lambda * std::log(static_cast<double>(shape.d)));
    TailBounds b;
    b.log_lower = std::log(params.kp) - params.kpp * grown;
    b.log_upper = std::log(params.cp) - params.cpp * grown;
    b.lower = std::exp(b.log_lower);
    b.upper = std::exp(b.log_upper);
    return b;
}

WeightedPowerSum log_weighted_power_sum(int n, int d) {
    if (n < 1) throw std::invalid_argument("log_weighted_power_sum: n must be >= 1");
    if (d < 2) throw std::invalid_argument("log_weighted_power_sum: d must be >= 2");

    const double log_d = std::log(static_cast<double>(d));
    WeightedPowerSum out;
    out.overflowed = (n + 2) * log_d > 700.0;

    LogSumAcc lse;
    for (int j = 1; j <= n - 1; ++j)
        lse.add(std::log(std::log(static_cast<double>(n + 1 - j))) + j * log_d);
    out.log_sum = lse.log_sum();
    out.ratio = out.log_sum == kNegInf ? 0.0 : std::exp(out.log_sum - n * log_d);

    const double small = (static_cast<double>(n) + 1.0) * d * d - static_cast<double>(n) * d;
    out.log_upper = (n + 2) * log_d + std::log1p(-small * std::exp(-(n + 2) * log_d)) -
                    2.0 * std::log(static_cast<double>(d - 1));

    if (!out.overflowed) {
        // direct sum, accumulated from the smallest power upward
        double sum = 0.0, comp = 0.0, power = 1.0;
        for (int j = 1; j <= n; ++j) {
            power *= d;
            const double term = std::log(static_cast<double>(n + 1 - j)) * power;
            const double y = term - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        out.sum = sum;
        out.upper = (std::pow(static_cast<double>(d), n + 2) - small) /
                    (static_cast<double>(d - 1) * (d - 1));
    } else {
        out.sum = std::numeric_limits<double>::infinity();
        out.upper = std::numeric_limits<double>::infinity();
    }
    return out;
}

LogGapFit fit_log_gap(const std::vector<EstimateRecord>& records,
                      const brw::Centering& centering) {
    if (records.size() < 4)
        throw std::invalid_argument("fit_log_gap: need at least 4 records");
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].shape.d != records[0].shape.d)
            throw std::invalid_argument("fit_log_gap: records must share one branching factor");
        if (i > 0 && records[i].shape.n <= records[i - 1].shape.n)
            throw std::invalid_argument("fit_log_gap: heights must be strictly increasing");
    }

    const int k = static_cast<int>(records.size());
    std::vector<double> x(records.size()), y(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        x[i] = std::log(static_cast<double>(records[i].shape.n));
        y[i] = brw::expected_max_center(records[i].shape, centering) - records[i].value;
    }
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < k; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= k;
    my /= k;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < k; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LogGapFit fit;
    fit.points = k;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (int i = 0; i < k; ++i) {
        const double resid = y[i] - (fit.intercept + fit.slope * x[i]);
        ssr += resid * resid;
        fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(resid));
    }
    const int df = k - 2;
    const double mse = ssr / df;
    fit.slope_std_error = std::sqrt(mse / sxx);
    const double t = t_quantile_975(df);
    fit.ci_low = fit.slope - t * fit.slope_std_error;
    fit.ci_high = fit.slope + t * fit.slope_std_error;
    fit.slope_ci_excludes_zero = fit.ci_low > 0.0 || fit.ci_high < 0.0;
    return fit;
}

}  // namespace brwsim::est
