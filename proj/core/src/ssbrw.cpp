#include "brwsim/ssbrw.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "brwsim/cholesky.hpp"

namespace brwsim::ssbrw {

double shared_variance(const TreeShape& shape) {
    return (1.0 - std::pow(static_cast<double>(shape.d), -static_cast<double>(shape.n))) /
           (shape.d - 1);
}

double level_variance(int level, const TreeShape& shape) {
    if (level < 1 || level > shape.n)
        throw std::invalid_argument("level_variance: level must be in [1, n]");
    return 1.0 - std::pow(static_cast<double>(shape.d),
                          -static_cast<double>(shape.n - level + 1));
}

SwitchMatrix build_switch_matrix(int d, double sigma2) {
    if (d < 2) throw std::invalid_argument("build_switch_matrix: d must be >= 2");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("build_switch_matrix: sigma2 must be > 0");
    const int k = d - 1;
    SmallSpdMatrix pattern(k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            pattern.at(i, j) = (i == j) ? sigma2 : -sigma2 / (d - 1);
    SmallSpdMatrix l = cholesky_small(pattern);

    SwitchMatrix m;
    m.d = d;
    m.sigma2 = sigma2;
    m.a = std::move(l.entries);
    return m;
}

void child_increments(const SwitchMatrix& m, const double* z, double* y) {
    const int k = m.d - 1;
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        double v = 0.0;
        for (int j = 0; j <= i; ++j) v += m.a[static_cast<std::size_t>(i) * k + j] * z[j];
        y[i] = v;
        sum += v;
    }
    y[k] = -sum;
}

double covariance(const LeafId& u, const LeafId& v, const TreeShape& shape) {
    return brw::covariance(u, v, shape) - shared_variance(shape);
}

LevelMixing build_level_mixing(const TreeShape& shape) {
    const int k = shape.d - 1;
    SwitchMatrix unit = build_switch_matrix(shape.d, 1.0);

    LevelMixing mixing;
    mixing.shape = shape;
    mixing.scaled.resize(static_cast<std::size_t>(shape.n) * k * k);
    for (int level = 1; level <= shape.n; ++level) {
        const double sd = std::sqrt(level_variance(level, shape));
        double* block = &mixing.scaled[static_cast<std::size_t>(level - 1) * k * k];
        for (int i = 0; i < k * k; ++i) block[i] = sd * unit.a[i];
    }
    return mixing;
}

namespace {

constexpr int kMaxHeight = 62;
constexpr int kStackIncrements = 1024;

struct WalkOut {
    double max;
    double tilt_sum;
    std::int64_t tilt_count;
    std::vector<std::uint32_t> argmax;
};

// Dedicated estimator path: binary tree, max only, no argmax.  Leaves are
// visited individually and compared against values stored on the previous
// iteration, which keeps the draw latency (notably the divide in the
// inverse CDF) off the branch-resolution path and lets consecutive draws
// overlap.  Operation-for-operation the arithmetic matches the general
// walker, so maxima stay bit-identical across paths.
WalkOut walk_max_binary(const double* scale, int n, RngStream& stream_in, int tilt_levels,
                        double tilt) {
    RngStream stream = stream_in;
    double val[kMaxHeight + 1];
    double pend[kMaxHeight + 1];
    int digit[kMaxHeight + 1];

    WalkOut result;
    result.max = -std::numeric_limits<double>::infinity();
    result.tilt_sum = 0.0;
    result.tilt_count = 0;

    val[0] = 0.0;
    int depth = 0;
    const int bottom = n - 1;
    while (true) {
        double z = stream.next_gaussian();
        if (depth < tilt_levels) {
            z -= tilt;
            result.tilt_sum += z;
            ++result.tilt_count;
        }
        const double y = scale[depth] * z;
        if (depth != bottom) {
            pend[depth + 1] = val[depth] - y;
            val[depth + 1] = val[depth] + y;
            digit[depth] = 0;
            ++depth;
            continue;
        }
        // leaf pair fused: max(v + y, v - y) is exactly v + |y|
        const double m = val[depth] + std::fabs(y);
        if (m > result.max) result.max = m;
        while (depth > 0 && digit[depth - 1] == 1) --depth;
        if (depth == 0) break;
        val[depth] = pend[depth];
        digit[depth - 1] = 1;
    }
    stream_in = stream;
    return result;
}

// Shared depth-first walker.  One code path covers full and max-only modes
// (out == nullptr) and the tilted variants, keeping maxima bit-identical
// across them.  d == 2 gets a tight loop: one input per node, increments
// (+s z, -s z).
WalkOut walk_field(const LevelMixing& mixing, RngStream& stream_in, double* out,
                   bool want_argmax, int tilt_levels, double tilt) {
    const int n = mixing.shape.n;
    const int d = mixing.shape.d;
    if (n > kMaxHeight) throw BudgetExceeded("ssbrw::walk: height beyond supported range");

    if (d == 2 && out == nullptr && !want_argmax)
        return walk_max_binary(mixing.scaled.data(), n, stream_in, tilt_levels, tilt);

    // draw from a local copy whose address never escapes, so the position
    // counter stays in a register across the array stores below
    RngStream stream = stream_in;
    const double* scale = mixing.scaled.data();

    double val[kMaxHeight + 1];
    int digit[kMaxHeight];
    double inc_stack[kStackIncrements];
    double zbuf_stack[64];
    std::vector<double> heap;
    double* inc = inc_stack;
    double* zbuf = zbuf_stack;
    if (static_cast<std::int64_t>(n) * d + (d - 1) > kStackIncrements) {
        heap.resize(static_cast<std::size_t>(n) * d + (d - 1));
        inc = heap.data();
        zbuf = heap.data() + static_cast<std::size_t>(n) * d;
    } else if (d - 1 > 64) {
        zbuf = inc_stack + static_cast<std::size_t>(n) * d;
    }

    WalkOut result;
    result.max = -std::numeric_limits<double>::infinity();
    result.tilt_sum = 0.0;
    result.tilt_count = 0;
    std::vector<std::uint32_t> argmax(want_argmax ? n : 0);

    const int k = d - 1;
    // Bottom-level shortcut for binary max-only walks: the two leaves of a
    // node are val +- y, so the better one is val + |y| and nothing needs
    // the stack.  Exact negation keeps this bit-identical to the full path.
    const bool fast_bottom = (d == 2) && out == nullptr;

    val[0] = 0.0;
    int depth = 0;
    std::int64_t leaf = 0;
    while (true) {
        if (fast_bottom && depth == n - 1) {
            double z = stream.next_gaussian();
            if (depth < tilt_levels) {
                z -= tilt;
                result.tilt_sum += z;
                ++result.tilt_count;
            }
            const double y = scale[depth] * z;
            const double v = val[depth] + (z >= 0.0 ? y : -y);
            if (v > result.max) {
                result.max = v;
                if (want_argmax) {
                    digit[depth] = z >= 0.0 ? 0 : 1;
                    for (int i = 0; i < n; ++i) argmax[i] = static_cast<std::uint32_t>(digit[i]);
                }
            }
            while (depth > 0 && digit[depth - 1] == d - 1) --depth;
            if (depth == 0) break;
            const int p = depth - 1;
            ++digit[p];
            val[depth] = val[p] + inc[static_cast<std::size_t>(p) * d + digit[p]];
            continue;
        }
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
        const double* block = scale + static_cast<std::size_t>(depth) * k * k;
        double* e = inc + static_cast<std::size_t>(depth) * d;
        if (d == 2) {
            double z = stream.next_gaussian();
            if (depth < tilt_levels) {
                z -= tilt;
                result.tilt_sum += z;
                ++result.tilt_count;
            }
            const double y = block[0] * z;
            e[0] = y;
            e[1] = -y;
        } else {
            for (int j = 0; j < k; ++j) {
                double z = stream.next_gaussian();
                if (depth < tilt_levels) {
                    z -= tilt;
                    result.tilt_sum += z;
                    ++result.tilt_count;
                }
                zbuf[j] = z;
            }
            double sum = 0.0;
            for (int i = 0; i < k; ++i) {
                double v = 0.0;
                for (int j = 0; j <= i; ++j) v += block[static_cast<std::size_t>(i) * k + j] * zbuf[j];
                e[i] = v;
                sum += v;
            }
            e[k] = -sum;
        }
        digit[depth] = 0;
        val[depth + 1] = val[depth] + e[0];
        ++depth;
    }
    result.argmax = std::move(argmax);
    stream_in = stream;
    return result;
}

}  // namespace

Sample sample(const TreeShape& shape, RngStream& stream, SampleMode mode) {
    Sample s;
    s.shape = shape;
    if (mode == SampleMode::full) {
        const std::int64_t count = leaf_count(shape);
        if (count > kMaxFullLeafCount)
            throw BudgetExceeded("ssbrw::sample: full mode needs " + std::to_string(count) +
                                 " leaf values, budget is " + std::to_string(kMaxFullLeafCount));
        s.values.resize(static_cast<std::size_t>(count));
    } else {
        leaf_count(shape);
    }
    LevelMixing mixing = build_level_mixing(shape);
    auto walked =
        walk_field(mixing, stream, s.values.empty() ? nullptr : s.values.data(), true, 0, 0.0);
    s.max = walked.max;
    s.argmax.digits = std::move(walked.argmax);
    s.shared_gaussian = std::sqrt(shared_variance(shape)) * stream.next_gaussian();
    return s;
}

MaxWalk walk_max(const LevelMixing& mixing, RngStream& stream, int tilt_levels, double tilt) {
    auto walked = walk_field(mixing, stream, nullptr, false, tilt_levels, tilt);
    MaxWalk m;
    m.max = walked.max;
    m.tilt_sum = walked.tilt_sum;
    m.tilt_count = walked.tilt_count;
    return m;
}

}  // namespace brwsim::ssbrw
