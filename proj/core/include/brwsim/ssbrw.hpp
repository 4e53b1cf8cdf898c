#pragma once

#include <cstdint>
#include <vector>

#include "brwsim/brw.hpp"
#include "brwsim/rng.hpp"
#include "brwsim/tree.hpp"

namespace brwsim::ssbrw {

/// Variance (1 - d^-n) / (d - 1) of the shared Gaussian in the decomposition
/// field = switching component + shared Gaussian.
double shared_variance(const TreeShape& shape);

/// Variance 1 - d^-(n-l+1) of the increments at level l, where level 1 is
/// the edges below the root and level n the edges above the leaves.
double level_variance(int level, const TreeShape& shape);

/// Mixing matrix A for one node: (d-1) x (d-1) lower triangle with
/// A At = sigma2 * [1 on the diagonal, -1/(d-1) off it].  The induced d
/// child increments (A z, -sum) all have variance sigma2 and pairwise
/// covariance -sigma2 / (d-1), and sum to zero.
struct SwitchMatrix {
    int d = 2;
    double sigma2 = 1.0;
    std::vector<double> a;  // (d-1)^2 row-major, lower triangular

    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * (d - 1) + j]; }
};

SwitchMatrix build_switch_matrix(int d, double sigma2);

/// The d child increments from d-1 standard normals z.  The last child is
/// the exact negative of the running sum of the first d-1, so the node-level
/// zero sum holds bit-exactly.
void child_increments(const SwitchMatrix& m, const double* z, double* y);

/// Covariance kernel of the switching component: the walk kernel minus the
/// shared variance, for every leaf pair.
double covariance(const LeafId& u, const LeafId& v, const TreeShape& shape);

/// Per-level mixing matrices with level variances applied (A(sigma2) =
/// sigma * A(1), one Cholesky total).  Build once, sample many.
struct LevelMixing {
    TreeShape shape;
    std::vector<double> scaled;  // n blocks of (d-1)^2; level l starts at (l-1)*(d-1)^2
};

LevelMixing build_level_mixing(const TreeShape& shape);

struct Sample {
    TreeShape shape;
    std::vector<double> values;  // switching component, flat order; empty in max_only
    double max = 0.0;
    LeafId argmax;
    double shared_gaussian = 0.0;  // drawn after the walk, as one extra stream value
};

/// One realization of the switching component plus its shared Gaussian.
/// Stream layout: d-1 normals per internal node in depth-first digit order,
/// then one value for the shared Gaussian, so full and max_only agree
/// bit-for-bit on the max.
Sample sample(const TreeShape& shape, RngStream& stream, SampleMode mode);

struct MaxWalk {
    double max = 0.0;
    double tilt_sum = 0.0;        // sum of the shifted inputs at tilted levels
    std::int64_t tilt_count = 0;  // number of inputs shifted
};

/// Max of one switching-component realization; no shared Gaussian is drawn
/// and nothing allocates, so estimator inner loops can run on this.  When
/// tilt_levels > 0, every standard normal driving levels 1..tilt_levels is
/// shifted by -tilt; callers undo the bias with the likelihood ratio
/// exp(tilt * tilt_sum + tilt_count * tilt^2 / 2).
MaxWalk walk_max(const LevelMixing& mixing, RngStream& stream, int tilt_levels = 0,
                 double tilt = 0.0);

}  // namespace brwsim::ssbrw
