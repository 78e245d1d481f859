#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tangleflow {

/// Dense row-major matrix. Only used at desk scale (a few hundred rows) for
/// Laplacians, spectral diagnostics and the harmonic solve.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> data() const noexcept { return data_; }

    Matrix transposed() const;

    friend Matrix operator+(const Matrix& a, const Matrix& b);
    friend Matrix operator-(const Matrix& a, const Matrix& b);
    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend Matrix operator*(double s, const Matrix& a);
    friend bool operator==(const Matrix& a, const Matrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Maximum absolute row sum.
double norm_inf(const Matrix& m);

/// Largest |m(i,j) - m(j,i)|.
double asymmetry(const Matrix& m);

/// Solves A X = B by Gaussian elimination with partial pivoting.
/// Throws SingularSystem when a pivot falls below `pivot_tol` times the
/// largest entry of A.
Matrix solve(Matrix a, Matrix b, double pivot_tol = 1e-12);

} // namespace tangleflow
