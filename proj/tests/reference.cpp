#include "reference.hpp"

#include <algorithm>
#include <cmath>

#include "brwsim/ssbrw.hpp"

namespace ref {

namespace {

long double simpson_step(const std::function<long double(long double)>& f, long double a,
                         long double fa, long double b, long double fb, long double fm,
                         long double whole, long double tol, int depth) {
    const long double m = (a + b) / 2;
    const long double lm = (a + m) / 2, rm = (m + b) / 2;
    const long double flm = f(lm), frm = f(rm);
    const long double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const long double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
        return left + right + (left + right - whole) / 15;
    return simpson_step(f, a, fa, m, fm, flm, left, tol / 2, depth - 1) +
           simpson_step(f, m, fm, b, fb, frm, right, tol / 2, depth - 1);
}

}  // namespace

long double simpson(const std::function<long double(long double)>& f, long double a,
                    long double b, long double tol) {
    const long double fa = f(a), fb = f(b), fm = f((a + b) / 2);
    const long double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return simpson_step(f, a, fa, b, fb, fm, whole, tol, 60);
}

long double tail_by_quadrature(double x) {
    const auto density = [](long double t) {
        const long double inv_sqrt_2pi = 0.3989422804014326779399461L;
        return inv_sqrt_2pi * std::exp(-t * t / 2);
    };
    if (x < 0) return 1.0L - tail_by_quadrature(-x);
    const long double far = 45.0L;
    if (x >= far) return 0.0L;
    return simpson(density, x, far, 1e-18L);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

namespace {

double descend(const brwsim::TreeShape& shape, brwsim::RngStream& stream,
               const std::vector<brwsim::ssbrw::SwitchMatrix>& levels,
               const std::vector<int>* perm, int depth, double value) {
    if (depth == shape.n) return value;
    const int d = shape.d;
    std::vector<double> z(static_cast<std::size_t>(d - 1));
    std::vector<double> y(static_cast<std::size_t>(d));
    for (auto& v : z) v = stream.next_gaussian();
    brwsim::ssbrw::child_increments(levels[static_cast<std::size_t>(depth)], z.data(), y.data());

    double best = -1e300;
    for (int child = 0; child < d; ++child) {
        const int slot = (depth == 0 && perm) ? (*perm)[static_cast<std::size_t>(child)] : child;
        best = std::max(best, descend(shape, stream, levels, perm, depth + 1,
                                      value + y[static_cast<std::size_t>(slot)]));
    }
    return best;
}

}  // namespace

double switching_max_recursive(const brwsim::TreeShape& shape, brwsim::RngStream& stream,
                               const std::vector<int>& root_perm) {
    std::vector<brwsim::ssbrw::SwitchMatrix> levels;
    levels.reserve(static_cast<std::size_t>(shape.n));
    for (int l = 1; l <= shape.n; ++l)
        levels.push_back(brwsim::ssbrw::build_switch_matrix(
            shape.d, brwsim::ssbrw::level_variance(l, shape)));
    const std::vector<int>* perm = root_perm.empty() ? nullptr : &root_perm;
    return descend(shape, stream, levels, perm, 0, 0.0);
}

}  // namespace ref
