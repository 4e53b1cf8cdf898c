#include <doctest.h>

#include "brwsim/tree.hpp"

using namespace brwsim;

namespace {
LeafId leaf(std::initializer_list<std::uint32_t> digits) { return LeafId{digits}; }
}

TEST_CASE("leaf_count basics") {
    CHECK(leaf_count(TreeShape(2, 1)) == 2);
    CHECK(leaf_count(TreeShape(2, 3)) == 8);
    CHECK(leaf_count(TreeShape(3, 4)) == 81);
    CHECK(leaf_count(TreeShape(2, 62)) == std::int64_t{1} << 62);
}

TEST_CASE("leaf_count overflow is an explicit error") {
    CHECK(!leaf_count_fits(TreeShape(2, 64)));
    CHECK_THROWS_AS(leaf_count(TreeShape(2, 64)), std::overflow_error);
    CHECK_THROWS_AS(leaf_count(TreeShape(10, 20)), std::overflow_error);
    // closed-form-only shapes remain constructible
    CHECK(TreeShape(2, 1024).n == 1024);
}

TEST_CASE("shape validation") {
    CHECK_THROWS_AS(TreeShape(1, 3), std::invalid_argument);
    CHECK_THROWS_AS(TreeShape(2, 0), std::invalid_argument);
}

TEST_CASE("split_depth examples") {
    const TreeShape shape(2, 3);
    CHECK(split_depth(leaf({0, 0, 0}), leaf({0, 0, 1}), shape) == 2);
    CHECK(split_depth(leaf({0, 0, 0}), leaf({1, 0, 0}), shape) == 0);
    CHECK(split_depth(leaf({0, 1, 0}), leaf({0, 1, 0}), shape) == 3);
    CHECK_THROWS_AS(split_depth(leaf({0, 0}), leaf({0, 0, 1}), shape), std::invalid_argument);
}

TEST_CASE("tree_distance examples") {
    const TreeShape shape(2, 3);
    CHECK(tree_distance(leaf({0, 0, 0}), leaf({0, 0, 1}), shape) == 2);
    CHECK(tree_distance(leaf({0, 0, 0}), leaf({1, 0, 0}), shape) == 6);
    CHECK(tree_distance(leaf({0, 1, 1}), leaf({0, 1, 1}), shape) == 0);
}

TEST_CASE("flat index round-trip and digit convention") {
    for (const TreeShape& shape : {TreeShape(2, 9), TreeShape(3, 5), TreeShape(5, 3)}) {
        const std::int64_t count = leaf_count(shape);
        for (std::int64_t i = 0; i < count; ++i)
            CHECK(leaf_to_index(leaf_from_index(i, shape), shape) == i);
    }
    // most-significant digit selects the edge below the root
    const TreeShape shape(3, 4);
    const LeafId top = leaf_from_index(27, shape);  // 3^3
    CHECK(top.digits == std::vector<std::uint32_t>{1, 0, 0, 0});
    CHECK_THROWS_AS(leaf_from_index(81, shape), std::out_of_range);
    CHECK_THROWS_AS(leaf_to_index(leaf({0, 0, 0, 7}), shape), std::invalid_argument);
}

TEST_CASE("tree_distance is a metric on leaves") {
    for (const TreeShape& shape : {TreeShape(2, 8), TreeShape(3, 4)}) {
        const int count = static_cast<int>(leaf_count(shape));
        std::vector<LeafId> leaves(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) leaves[i] = leaf_from_index(i, shape);

        for (int i = 0; i < count; ++i)
            for (int j = 0; j < count; ++j) {
                const int dij = tree_distance(leaves[i], leaves[j], shape);
                CHECK(dij == tree_distance(leaves[j], leaves[i], shape));
                CHECK((dij == 0) == (i == j));
                CHECK(split_depth(leaves[i], leaves[j], shape) + dij / 2 == shape.n);
            }

        // triangle inequality, exhaustive over all triples
        std::vector<std::vector<int>> dist(count, std::vector<int>(count));
        for (int i = 0; i < count; ++i)
            for (int j = 0; j < count; ++j) dist[i][j] = tree_distance(leaves[i], leaves[j], shape);
        for (int i = 0; i < count; ++i)
            for (int j = 0; j < count; ++j)
                for (int k = 0; k < count; ++k)
                    CHECK(dist[i][j] <= dist[i][k] + dist[k][j]);
    }
}
