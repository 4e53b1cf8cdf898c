#include "brwsim/brw.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace brwsim::brw {

Centering Centering::for_degree(int d) {
    if (d < 2) throw std::invalid_argument("Centering: branching factor must be >= 2");
    Centering c;
    c.c1 = std::sqrt(2.0 * std::log(static_cast<double>(d)));
    c.c2 = 3.0 / (2.0 * c.c1);
    c.c = 1.0 / c.c1;
    return c;
}

double expected_max_center(const TreeShape& shape, const Centering& centering) {
    return centering.c1 * shape.n - centering.c2 * std::log(static_cast<double>(shape.n));
}

double expected_max_center(const TreeShape& shape) {
    return expected_max_center(shape, Centering::for_degree(shape.d));
}

double covariance(const LeafId& u, const LeafId& v, const TreeShape& shape) {
    return static_cast<double>(split_depth(u, v, shape));
}

namespace {

constexpr int kMaxHeight = 62;
constexpr int kStackIncrements = 1024;

struct WalkOut {
    double max;
    std::vector<std::uint32_t> argmax;
};

// Depth-first walk over the complete tree.  At each internal node the d
// child-edge increments are drawn in digit order before descending.  Writes
// leaf values in flat-index order when out != nullptr; the running max is
// tracked the same way in both modes, so full and max_only stay bit-identical.
WalkOut walk_field(const TreeShape& shape, RngStream& stream, double* out, bool want_argmax) {
    const int n = shape.n;
    const int d = shape.d;
    if (n > kMaxHeight) throw BudgetExceeded("brw::walk: height beyond supported range");

    double val[kMaxHeight + 1];
    int digit[kMaxHeight];
    double inc_stack[kStackIncrements];
    std::vector<double> inc_heap;
    double* inc = inc_stack;
    if (static_cast<std::int64_t>(n) * d > kStackIncrements) {
        inc_heap.resize(static_cast<std::size_t>(n) * d);
        inc = inc_heap.data();
    }

    WalkOut result;
    result.max = -std::numeric_limits<double>::infinity();
    std::vector<std::uint32_t> argmax(want_argmax ? n : 0);

    val[0] = 0.0;
    int depth = 0;
    std::int64_t leaf = 0;
    while (true) {
        if (depth == n) {
            const double v = val[n];
            if (out) out[leaf] = v;
            ++leaf;
            if (v > result.max) {
                result.max = v;
                if (want_argmax)
                    for (int i = 0; i < n; ++i) argmax[i] = static_cast<std::uint32_t>(digit[i]);
            }
            while (depth > 0 && digit[depth - 1] == d - 1) --depth;
            if (depth == 0) break;
            const int p = depth - 1;
            ++digit[p];
            val[depth] = val[p] + inc[static_cast<std::size_t>(p) * d + digit[p]];
            continue;
        }
        double* e = inc + static_cast<std::size_t>(depth) * d;
        for (int i = 0; i < d; ++i) e[i] = stream.next_gaussian();
        digit[depth] = 0;
        val[depth + 1] = val[depth] + e[0];
        ++depth;
    }
    result.argmax = std::move(argmax);
    return result;
}

}  // namespace

Sample sample(const TreeShape& shape, RngStream& stream, SampleMode mode) {
    Sample s;
    s.shape = shape;
    if (mode == SampleMode::full) {
        const std::int64_t count = leaf_count(shape);
        if (count > kMaxFullLeafCount)
            throw BudgetExceeded("brw::sample: full mode needs " + std::to_string(count) +
                                 " leaf values, budget is " + std::to_string(kMaxFullLeafCount));
        s.values.resize(static_cast<std::size_t>(count));
    } else {
        leaf_count(shape);  // reject shapes whose leaves are not addressable
    }
    auto walked = walk_field(shape, stream, s.values.empty() ? nullptr : s.values.data(), true);
    s.max = walked.max;
    s.argmax.digits = std::move(walked.argmax);
    return s;
}

double walk_max(const TreeShape& shape, RngStream& stream) {
    return walk_field(shape, stream, nullptr, false).max;
}

ComparisonSample sample_comparison_max(const TreeShape& shape, int n_prime, RngStream& stream) {
    if (n_prime < 1 || n_prime > shape.n)
        throw std::invalid_argument("sample_comparison_max: n' must be in [1, n]");
    leaf_count(shape);  // total work enumerates all d^n leaves

    const TreeShape subtree(shape.d, n_prime);
    std::int64_t blocks = 1;
    for (int i = 0; i < shape.n - n_prime; ++i) blocks *= shape.d;

    double best = -std::numeric_limits<double>::infinity();
    for (std::int64_t b = 0; b < blocks; ++b) best = std::max(best, walk_max(subtree, stream));

    const double shared_sd = std::sqrt(static_cast<double>(shape.n - n_prime));
    ComparisonSample s;
    s.shape = shape;
    s.subtree_height = n_prime;
    s.max = best + shared_sd * stream.next_gaussian();
    return s;
}

}  // namespace brwsim::brw
