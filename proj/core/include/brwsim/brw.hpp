#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "brwsim/rng.hpp"
#include "brwsim/tree.hpp"

namespace brwsim {

struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SampleMode { full, max_only };

/// Leaf counts above this refuse full-mode sampling (one value per leaf).
inline constexpr std::int64_t kMaxFullLeafCount = std::int64_t{1} << 25;

namespace brw {

/// Centering constants for the expected maximum: c1 = sqrt(2 log d),
/// c2 = 3 / (2 c1), c = 1 / c1.  Logs are natural throughout.
struct Centering {
    double c1;
    double c2;
    double c;

    static Centering for_degree(int d);
};

/// c1 * n - c2 * log n, the expected-maximum centering (up to O(1)).
double expected_max_center(const TreeShape& shape, const Centering& centering);
double expected_max_center(const TreeShape& shape);

/// Covariance kernel of the branching random walk on leaves: depth of the
/// deepest common ancestor, i.e. n - tree_distance / 2.  Variance is n.
double covariance(const LeafId& u, const LeafId& v, const TreeShape& shape);

struct Sample {
    TreeShape shape;
    std::vector<double> values;  // flat-index order; empty in max_only mode
    double max = 0.0;
    LeafId argmax;
};

/// One field realization: the value at a leaf is the sum of n independent
/// unit-variance edge increments along its root path.  The walk is
/// depth-first; full and max_only modes consume the stream identically and
/// produce bit-identical maxima.
Sample sample(const TreeShape& shape, RngStream& stream, SampleMode mode);

/// Max of one realization with O(n d) working memory and no allocation.
double walk_max(const TreeShape& shape, RngStream& stream);

/// Comparison field: independent height-n' walks on the d^(n-n') subtrees
/// rooted at depth n - n', plus one shared Gaussian of variance n - n'
/// added to every leaf.  Per-leaf variance matches the walk (= n) while
/// covariances only grow, so its maximum is stochastically smaller.
struct ComparisonSample {
    TreeShape shape;
    int subtree_height = 0;  // n' in [1, n]
    double max = 0.0;
};

ComparisonSample sample_comparison_max(const TreeShape& shape, int n_prime, RngStream& stream);

}  // namespace brw
}  // namespace brwsim
