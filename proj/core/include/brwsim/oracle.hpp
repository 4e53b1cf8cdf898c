#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "brwsim/estimators.hpp"
#include "brwsim/tree.hpp"

namespace brwsim::oracle {

enum class CovSource { brw_kernel, switching_kernel, empirical };

/// Dense leaf-pair covariance matrix, flat-index order; small enough to
/// Cholesky and sample inside a test suite (dim <= 1024).
struct DenseCov {
    int dim = 0;
    std::vector<double> entries;  // row-major dim x dim
    CovSource source = CovSource::empirical;

    double& at(int i, int j) { return entries[static_cast<std::size_t>(i) * dim + j]; }
    double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * dim + j]; }
};

enum class Kernel { brw, switching };

/// Entrywise evaluation of the chosen kernel over all leaf pairs.
DenseCov dense_covariance(const TreeShape& shape, Kernel kernel);

/// Exact all-leaves-nonnegative probability where a closed form exists:
/// 2^-d for n = 1 (independent leaves), 1/9 for (d=2, n=2) via the bivariate
/// arcsine orthant law per sibling pair.  nullopt otherwise.
std::optional<double> orthant_closed_form(const TreeShape& shape);

/// Plain Monte Carlo orthant probability by dense Cholesky sampling.
est::EstimateRecord mc_orthant(const DenseCov& cov, std::int64_t samples, std::uint64_t seed,
                               int shards);

/// Unbiased sample covariance (divisor count - 1) of leaf vectors.
DenseCov sample_covariance(const std::vector<std::vector<double>>& samples);

}  // namespace brwsim::oracle
