#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace brwsim {

/// Complete d-ary tree of height n.  All fields in this library live on the
/// d^n leaves; internal vertices only route increments.
struct TreeShape {
    int d = 2;  // branching factor, >= 2
    int n = 1;  // height, >= 1

    TreeShape() = default;
    TreeShape(int d_, int n_);

    bool operator==(const TreeShape&) const = default;
};

/// True when d^n is representable as a signed 64-bit count.  Shapes beyond
/// that width are still valid for closed-form evaluation (centerings,
/// variances, fixed points); anything that enumerates or addresses leaves
/// refuses them.
bool leaf_count_fits(const TreeShape& shape);

/// d^n, the number of leaves.  Throws std::overflow_error when the count
/// does not fit in 64 bits.
std::int64_t leaf_count(const TreeShape& shape);

/// Leaf address as a base-d digit path of length n.  digits[0] selects the
/// edge below the root (most-significant digit of the flat index).
struct LeafId {
    std::vector<std::uint32_t> digits;
};

bool leaf_valid(const LeafId& leaf, const TreeShape& shape);

/// Canonical serialization: flat index in [0, d^n) <-> digit path.
LeafId leaf_from_index(std::int64_t index, const TreeShape& shape);
std::int64_t leaf_to_index(const LeafId& leaf, const TreeShape& shape);

/// Depth of the deepest common ancestor: length of the common digit prefix,
/// in [0, n].  Equals n iff u == v.
int split_depth(const LeafId& u, const LeafId& v, const TreeShape& shape);

/// Tree (graph) distance between two leaves: 2 * (n - split_depth).
int tree_distance(const LeafId& u, const LeafId& v, const TreeShape& shape);

}  // namespace brwsim
