#include "brwsim/oracle.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "brwsim/brw.hpp"
#include "brwsim/cholesky.hpp"
#include "brwsim/parallel.hpp"
#include "brwsim/ssbrw.hpp"

namespace brwsim::oracle {

namespace {
constexpr int kMaxDim = 1024;
}

DenseCov dense_covariance(const TreeShape& shape, Kernel kernel) {
    const std::int64_t count = leaf_count(shape);
    if (count > kMaxDim)
        throw std::invalid_argument("dense_covariance: d^n exceeds the dense cap of 1024");

    const int dim = static_cast<int>(count);
    DenseCov cov;
    cov.dim = dim;
    cov.entries.resize(static_cast<std::size_t>(dim) * dim);
    cov.source = kernel == Kernel::brw ? CovSource::brw_kernel : CovSource::switching_kernel;

    std::vector<LeafId> leaves(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) leaves[i] = leaf_from_index(i, shape);

    const double shift = kernel == Kernel::switching ? ssbrw::shared_variance(shape) : 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            const double v = brw::covariance(leaves[i], leaves[j], shape) - shift;
            cov.at(i, j) = v;
            cov.at(j, i) = v;
        }
    return cov;
}

std::optional<double> orthant_closed_form(const TreeShape& shape) {
    if (shape.n == 1) return std::pow(2.0, -static_cast<double>(shape.d));
    if (shape.d == 2 && shape.n == 2) {
        // two independent sibling pairs, each with correlation 1/2:
        // (1/4 + asin(1/2) / (2 pi))^2 = (1/3)^2
        const double pair = 0.25 + std::asin(0.5) / (2.0 * M_PI);
        return pair * pair;
    }
    return std::nullopt;
}

est::EstimateRecord mc_orthant(const DenseCov& cov, std::int64_t samples, std::uint64_t seed,
                               int shards) {
    if (cov.dim < 1 || cov.dim > kMaxDim)
        throw std::invalid_argument("mc_orthant: dim must be in [1, 1024]");
    if (samples < 1) throw std::invalid_argument("mc_orthant: need samples");
    const auto start = std::chrono::steady_clock::now();

    std::vector<double> chol = cov.entries;
    const double min_pivot = cholesky_lower_inplace(chol, cov.dim, -1e-9);
    (void)min_pivot;

    const int dim = cov.dim;
    auto per_shard = run_sharded<std::int64_t>(
        samples, shards, seed, [&](int, std::int64_t count, RngStream& stream) {
            std::vector<double> z(static_cast<std::size_t>(dim));
            std::int64_t hits = 0;
            for (std::int64_t s = 0; s < count; ++s) {
                for (int i = 0; i < dim; ++i) z[static_cast<std::size_t>(i)] = stream.next_gaussian();
                bool all = true;
                for (int i = 0; i < dim && all; ++i) {
                    double v = 0.0;
                    const double* row = &chol[static_cast<std::size_t>(i) * dim];
                    for (int j = 0; j <= i; ++j) v += row[j] * z[static_cast<std::size_t>(j)];
                    all = v >= 0.0;
                }
                hits += all;
            }
            return hits;
        });
    std::int64_t hits = 0;
    for (auto h : per_shard) hits += h;

    est::EstimateRecord r;
    const double n = static_cast<double>(samples);
    r.value = static_cast<double>(hits) / n;
    r.std_error = std::sqrt(std::max(0.0, r.value * (1.0 - r.value) / n));
    if (hits > 0) {
        r.log_value = std::log(r.value);
        r.log_std_error = r.std_error / r.value;
    }
    r.samples = samples;
    r.seed = seed;
    r.shards = shards;
    r.estimator = est::EstimatorKind::naive;
    r.shape = TreeShape{};
    r.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

DenseCov sample_covariance(const std::vector<std::vector<double>>& samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("sample_covariance: need at least 2 samples");
    const std::size_t dim = samples[0].size();
    if (dim == 0 || dim > kMaxDim)
        throw std::invalid_argument("sample_covariance: dimension must be in [1, 1024]");
    for (const auto& s : samples)
        if (s.size() != dim)
            throw std::invalid_argument("sample_covariance: inconsistent dimensions");

    const double count = static_cast<double>(samples.size());
    std::vector<double> mean(dim, 0.0);
    for (const auto& s : samples)
        for (std::size_t i = 0; i < dim; ++i) mean[i] += s[i];
    for (auto& m : mean) m /= count;

    DenseCov cov;
    cov.dim = static_cast<int>(dim);
    cov.entries.assign(dim * dim, 0.0);
    cov.source = CovSource::empirical;
    for (const auto& s : samples)
        for (std::size_t i = 0; i < dim; ++i) {
            const double di = s[i] - mean[i];
            for (std::size_t j = i; j < dim; ++j)
                cov.entries[i * dim + j] += di * (s[j] - mean[j]);
        }
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i; j < dim; ++j) {
            cov.entries[i * dim + j] /= (count - 1.0);
            cov.entries[j * dim + i] = cov.entries[i * dim + j];
        }
    return cov;
}

}  // namespace brwsim::oracle
