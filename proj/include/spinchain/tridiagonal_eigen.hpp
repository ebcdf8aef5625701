#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spinchain {

// Dense row-major real matrix, used for (partial) eigenvector storage.
class RealMatrix {
public:
    RealMatrix() = default;
    RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static RealMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Implicit-shift QL iteration for a real symmetric tridiagonal matrix
// (the tql2 scheme). On return `diag` holds the eigenvalues in ascending
// order. `rows`, if non-null, holds k rows of the accumulated transformation:
// pass the identity to get all eigenvectors (column m belongs to eigenvalue
// m), or selected rows of the identity to get only those components of every
// eigenvector at O(k n) cost per rotation sweep.
//
// Throws std::runtime_error if an eigenvalue fails to converge.
void tridiagonal_ql(std::vector<double>& diag, std::span<const double> offdiag, RealMatrix* rows);

std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag, std::span<const double> offdiag);

}  // namespace spinchain
