#include "brwsim/normal.hpp"

#include <limits>

namespace brwsim {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

// Mills-ratio continued fraction Q(x) = phi(x) / (x + 1/(x + 2/(x + ...))),
// evaluated with the modified Lentz scheme.  Converges fast for x >= 8.
double mills_ratio_cf(double x) {
    const double tiny = 1e-300;
    double f = x;
    if (f == 0.0) f = tiny;
    double c = f;
    double d = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double a = static_cast<double>(k);
        d = x + a * d;
        if (d == 0.0) d = tiny;
        c = x + a / c;
        if (c == 0.0) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return 1.0 / f;
}
}  // namespace

double normal_density(double x) {
    return std::exp(-0.5 * x * x - kLogSqrt2Pi);
}

double normal_tail(double x) {
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x == std::numeric_limits<double>::infinity()) return 0.0;
    if (x == -std::numeric_limits<double>::infinity()) return 1.0;
    return 0.5 * std::erfc(x * kInvSqrt2);
}

double normal_log_tail(double x) {
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x == std::numeric_limits<double>::infinity())
        return -std::numeric_limits<double>::infinity();
    if (x <= 12.0) {
        // Q(12) ~ 1.8e-33: far from underflow, log of the direct value is exact.
        return std::log(normal_tail(x));
    }
    return -0.5 * x * x - kLogSqrt2Pi + std::log(mills_ratio_cf(x));
}

}  // namespace brwsim
