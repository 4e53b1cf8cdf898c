#pragma once

#include <stdexcept>
#include <vector>

namespace brwsim {

struct NotPositiveSemidefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Small dense symmetric matrix, row-major.  Sized for mixing covariances
/// and tiny reference covariances only (dim <= 64).
struct SmallSpdMatrix {
    int dim = 0;
    std::vector<double> entries;  // dim * dim

    SmallSpdMatrix() = default;
    SmallSpdMatrix(int dim_, double fill = 0.0);
    static SmallSpdMatrix identity(int dim);

    double& at(int i, int j) { return entries[static_cast<std::size_t>(i) * dim + j]; }
    double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * dim + j]; }
};

/// In-place lower Cholesky on a row-major dim x dim buffer.  Pivots in
/// [clamp_floor, 0] are clamped to zero (their column becomes zero); a pivot
/// below clamp_floor throws NotPositiveSemidefinite.  Returns the smallest
/// pivot encountered before clamping.  Shared by the mixing-matrix builder
/// and the dense reference sampler.
double cholesky_lower_inplace(std::vector<double>& a, int dim, double clamp_floor);

/// Lower-triangular L with L Lt = m.  Requires symmetry to 1e-12 relative;
/// pivots in [-1e-12, 0] clamp to zero, anything lower throws.
SmallSpdMatrix cholesky_small(const SmallSpdMatrix& m);

}  // namespace brwsim
