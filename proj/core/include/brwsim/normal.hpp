#pragma once

#include <cmath>

namespace brwsim {

/// Standard normal density phi(x).
double normal_density(double x);

/// Upper tail Q(x) = P(Z >= x) for standard normal Z, evaluated through the
/// complementary error function.  Absolute error below 1e-15; total on the
/// extended reals (Q(-inf) = 1, Q(+inf) = 0).
double normal_tail(double x);

/// log Q(x), stable for arbitrarily large x (continued fraction past the
/// range where Q itself underflows).  The rare-event estimators evaluate
/// this at arguments of order 20 and beyond.
double normal_log_tail(double x);

/// Truncated first moment E[Z 1{Z >= x}].  For the standard normal this is
/// exactly the density at x.
inline double truncated_first_moment(double x) { return normal_density(x); }

/// Inverse standard normal CDF, rational approximation (Wichura's 7-digit
/// scheme).  Scaled error below 2e-7 over (0,1) including the far tails;
/// used for variate generation where one uniform maps to exactly one
/// Gaussian, never for tail probabilities.
inline double inverse_normal_cdf(double p) {
    const double q = p - 0.5;
    if (q >= -0.425 && q <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((5.9109374720e+01 * r + 1.5929113202e+02) * r + 5.0434271938e+01) * r +
                3.3871327179e+00) /
               (((6.7187563600e+01 * r + 7.8757757664e+01) * r + 1.7895169469e+01) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double v;
    if (r <= 5.0) {
        r -= 1.6;
        v = (((1.7023821103e-01 * r + 1.3067284816e+00) * r + 2.7568153900e+00) * r +
             1.4234372777e+00) /
            ((1.2021132975e-01 * r + 7.3700164250e-01) * r + 1.0);
    } else {
        r -= 5.0;
        v = (((1.7337203997e-02 * r + 4.2868294337e-01) * r + 3.0812263860e+00) * r +
             6.6579051150e+00) /
            ((1.2258202635e-02 * r + 2.4197894225e-01) * r + 1.0);
    }
    return (q < 0.0) ? -v : v;
}

}  // namespace brwsim
