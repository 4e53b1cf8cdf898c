#include "brwsim/cholesky.hpp"

#include <cmath>
#include <string>

namespace brwsim {

SmallSpdMatrix::SmallSpdMatrix(int dim_, double fill) : dim(dim_) {
    if (dim < 1 || dim > 64)
        throw std::invalid_argument("SmallSpdMatrix: dim must be in [1, 64]");
    entries.assign(static_cast<std::size_t>(dim) * dim, fill);
}

SmallSpdMatrix SmallSpdMatrix::identity(int dim) {
    SmallSpdMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
}

double cholesky_lower_inplace(std::vector<double>& a, int dim, double clamp_floor) {
    double min_pivot = 0.0;
    bool first = true;
    for (int j = 0; j < dim; ++j) {
        double pivot = a[static_cast<std::size_t>(j) * dim + j];
        for (int k = 0; k < j; ++k) {
            const double ljk = a[static_cast<std::size_t>(j) * dim + k];
            pivot -= ljk * ljk;
        }
        if (first || pivot < min_pivot) {
            min_pivot = pivot;
            first = false;
        }
        if (pivot < clamp_floor)
            throw NotPositiveSemidefinite("cholesky: pivot " + std::to_string(pivot) +
                                          " at column " + std::to_string(j));
        const double ljj = pivot > 0.0 ? std::sqrt(pivot) : 0.0;
        a[static_cast<std::size_t>(j) * dim + j] = ljj;
        for (int i = j + 1; i < dim; ++i) {
            double s = a[static_cast<std::size_t>(i) * dim + j];
            for (int k = 0; k < j; ++k)
                s -= a[static_cast<std::size_t>(i) * dim + k] *
                     a[static_cast<std::size_t>(j) * dim + k];
            a[static_cast<std::size_t>(i) * dim + j] = ljj > 0.0 ? s / ljj : 0.0;
        }
        for (int k = j + 1; k < dim; ++k) a[static_cast<std::size_t>(j) * dim + k] = 0.0;
    }
    return min_pivot;
}

SmallSpdMatrix cholesky_small(const SmallSpdMatrix& m) {
    if (m.dim < 1 || m.dim > 64 ||
        m.entries.size() != static_cast<std::size_t>(m.dim) * m.dim)
        throw std::invalid_argument("cholesky_small: malformed matrix");
    double scale = 0.0;
    for (double v : m.entries) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < m.dim; ++i)
        for (int j = i + 1; j < m.dim; ++j)
            if (std::abs(m.at(i, j) - m.at(j, i)) > 1e-12 * std::max(scale, 1.0))
                throw std::invalid_argument("cholesky_small: matrix not symmetric");

    SmallSpdMatrix l = m;
    cholesky_lower_inplace(l.entries, l.dim, -1e-12);
    return l;
}

}  // namespace brwsim
