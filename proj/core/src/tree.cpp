#include "brwsim/tree.hpp"

#include <limits>
#include <string>

namespace brwsim {

TreeShape::TreeShape(int d_, int n_) : d(d_), n(n_) {
    if (d < 2) throw std::invalid_argument("TreeShape: branching factor must be >= 2");
    if (n < 1) throw std::invalid_argument("TreeShape: height must be >= 1");
}

bool leaf_count_fits(const TreeShape& shape) {
    const std::int64_t limit = std::numeric_limits<std::int64_t>::max();
    std::int64_t count = 1;
    for (int i = 0; i < shape.n; ++i) {
        if (count > limit / shape.d) return false;
        count *= shape.d;
    }
    return true;
}

std::int64_t leaf_count(const TreeShape& shape) {
    if (!leaf_count_fits(shape))
        throw std::overflow_error("leaf_count: d^n exceeds 64-bit range for d=" +
                                  std::to_string(shape.d) + " n=" + std::to_string(shape.n));
    std::int64_t count = 1;
    for (int i = 0; i < shape.n; ++i) count *= shape.d;
    return count;
}

bool leaf_valid(const LeafId& leaf, const TreeShape& shape) {
    if (leaf.digits.size() != static_cast<std::size_t>(shape.n)) return false;
    for (auto digit : leaf.digits)
        if (digit >= static_cast<std::uint32_t>(shape.d)) return false;
    return true;
}

LeafId leaf_from_index(std::int64_t index, const TreeShape& shape) {
    if (index < 0 || index >= leaf_count(shape))
        throw std::out_of_range("leaf_from_index: index outside [0, d^n)");
    LeafId leaf;
    leaf.digits.assign(shape.n, 0);
    for (int i = shape.n - 1; i >= 0; --i) {
        leaf.digits[i] = static_cast<std::uint32_t>(index % shape.d);
        index /= shape.d;
    }
    return leaf;
}

std::int64_t leaf_to_index(const LeafId& leaf, const TreeShape& shape) {
    if (!leaf_valid(leaf, shape))
        throw std::invalid_argument("leaf_to_index: leaf does not match shape");
    std::int64_t index = 0;
    for (auto digit : leaf.digits) index = index * shape.d + digit;
    return index;
}

int split_depth(const LeafId& u, const LeafId& v, const TreeShape& shape) {
    if (u.digits.size() != static_cast<std::size_t>(shape.n) ||
        v.digits.size() != static_cast<std::size_t>(shape.n))
        throw std::invalid_argument("split_depth: leaf length does not match shape height");
    int depth = 0;
    while (depth < shape.n && u.digits[depth] == v.digits[depth]) ++depth;
    return depth;
}

int tree_distance(const LeafId& u, const LeafId& v, const TreeShape& shape) {
    return 2 * (shape.n - split_depth(u, v, shape));
}

}  // namespace brwsim
