#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "brwsim/brw.hpp"
#include "brwsim/tree.hpp"

namespace brwsim::est {

enum class EstimatorKind { naive, conditional, tilted };

std::string to_string(EstimatorKind kind);

/// The universal output unit: a point estimate with its standard error and
/// everything needed to reproduce it.  For rare-event targets the log-scale
/// fields carry the estimate past double underflow; log_std_error is the
/// delta-method standard error of log_value.
struct EstimateRecord {
    double value = 0.0;
    double std_error = 0.0;
    std::optional<double> log_value;
    std::optional<double> log_std_error;
    std::int64_t samples = 0;
    EstimatorKind estimator = EstimatorKind::naive;
    TreeShape shape;
    std::uint64_t seed = 0;
    int shards = 1;
    double wall_seconds = 0.0;         // measured; not part of result payloads
    std::optional<double> ess;         // effective sample size (tilted estimator)
    bool low_ess_warning = false;      // set when ess < 10
};

/// Which field's maximum an estimator runs on.
struct Model {
    enum class Kind { brw, switching, comparison };
    Kind kind = Kind::brw;
    int n_prime = 0;  // comparison only

    static Model brw() { return {Kind::brw, 0}; }
    static Model switching() { return {Kind::switching, 0}; }
    static Model comparison(int n_prime) { return {Kind::comparison, n_prime}; }
};

struct TailPoint {
    double threshold = 0.0;
    EstimateRecord record;
};

struct TailCurve {
    std::vector<TailPoint> points;  // sorted by threshold, shared samples
};

/// Empirical P(max <= t) at each threshold with binomial standard errors.
/// All thresholds share one sample set, so the curve is exactly monotone.
TailCurve max_cdf_curve(const TreeShape& shape, Model model,
                        std::vector<double> thresholds, std::int64_t samples,
                        std::uint64_t seed, int shards);

/// Importance-sampled P(max switching-component <= center - lambda): the
/// inputs driving levels 1..ceil(c lambda) are shifted by -tilt and each
/// sample is reweighted by the exact likelihood ratio, so the mean is
/// invariant in tilt.  Flags the record when the effective sample size
/// drops below 10.
EstimateRecord tilted_left_tail(const TreeShape& shape, double lambda, double tilt,
                                std::int64_t samples, std::uint64_t seed, int shards);

enum class PositivityMethod { naive, conditional };

/// P(every leaf of the walk >= 0).  naive: fraction of full-field samples
/// with all leaves nonnegative.  conditional: mean of Q(M / sigma) over
/// switching-component maxima M, the exact conditional probability given M
/// (Rao-Blackwellization over the shared Gaussian); accumulated in log
/// space so the estimate survives past double underflow.
EstimateRecord estimate_positivity(const TreeShape& shape, std::int64_t samples,
                                   std::uint64_t seed, int shards, PositivityMethod method);

struct DenominatorUnderflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// E(value at a typical leaf | all leaves >= 0) via the closed-form-per-
/// sample ratio  sum_i sigma phi(M_i/sigma) / sum_i Q(M_i/sigma), both sides
/// accumulated in log space with a shared shift; delta-method standard
/// error.  Throws DenominatorUnderflow when every Q term is below 1e-300.
EstimateRecord estimate_conditional_mean(const TreeShape& shape, std::int64_t samples,
                                         std::uint64_t seed, int shards);

struct NoInteriorRoot : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The unique root lambda' in (0, m) of
///   m - lambda = shared_variance * cpp * c * d^(c lambda) * log d,
/// found by bisection to |f| <= 1e-9.  This is the typical downward shift
/// of the conditioned field from the expected-max centering.
double solve_lambda_prime(const TreeShape& shape, double cpp, const brw::Centering& centering);
double solve_lambda_prime(const TreeShape& shape, double cpp);

/// Proof-side constants for the closed-form bounds.  None have numeric
/// values in the underlying theory; they are user or fit inputs.
struct BoundParams {
    double k1 = 1.0, k2 = 1.0, k3 = 1.0;   // positivity bound constants
    double cp = 1.0, cpp = 1.0;            // left-tail upper C', C''
    double kp = 1.0, kpp = 1.0;            // left-tail lower K', K''
    double c_star = 1.0;                   // single-exponential tail rate
    double p_bar = 1.0, a_bar = 1.0;       // auxiliary proof constants

    void validate() const;  // all strictly positive
};

struct LogBounds {
    double log_lower = 0.0;
    double log_upper = 0.0;
};

/// Positivity-probability bounds in log space:
///   lower: log k1 - g^2 / (2 s2) - k3 g
///   upper: log k2 - g^2 / (2 s2) - g / (c s2 log d)
/// with g = center - lambda_prime and s2 the shared variance.
LogBounds positivity_bounds(const TreeShape& shape, const BoundParams& params,
                            double lambda_prime, const brw::Centering& centering);

struct TailBounds {
    double lower = 0.0;
    double upper = 0.0;
    double log_lower = 0.0;
    double log_upper = 0.0;
};

/// Left-tail bounds kp exp(-kpp d^(c lambda)) and cp exp(-cpp d^(c lambda)).
TailBounds left_tail_bounds(const TreeShape& shape, double lambda, const BoundParams& params,
                            const brw::Centering& centering);

struct WeightedPowerSum {
    double sum = 0.0;       // sum_{j=1..n} log(n+1-j) d^j, smallest terms first
    double ratio = 0.0;     // sum / d^n (always finite)
    double upper = 0.0;     // (d^(n+2) - (n+1) d^2 + n d) / (d-1)^2
    double log_sum = 0.0;
    double log_upper = 0.0;
    bool overflowed = false;  // sum/upper exceeded double range; logs still valid
};

/// The geometric sum with logarithmic weights and its closed-form upper
/// bound; switches to log-space accumulation when d^n overflows.
WeightedPowerSum log_weighted_power_sum(int n, int d);

struct LogGapFit {
    double slope = 0.0;
    double slope_std_error = 0.0;
    double ci_low = 0.0;    // 95% confidence interval for the slope
    double ci_high = 0.0;
    double intercept = 0.0;
    double max_abs_residual = 0.0;
    int points = 0;
    bool slope_ci_excludes_zero = false;
};

/// Regression of (center_n - estimate_n) on log n with intercept, over
/// conditional-mean records at a common d and increasing n.  A slope CI
/// strictly above zero says the conditioning gap grows logarithmically.
LogGapFit fit_log_gap(const std::vector<EstimateRecord>& records,
                      const brw::Centering& centering);

}  // namespace brwsim::est
