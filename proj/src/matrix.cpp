#include "tangleflow/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "tangleflow/error.hpp"

namespace tangleflow {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n)
{
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const
{
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            t(c, r) = (*this)(r, c);
    return t;
}

Matrix operator+(const Matrix& a, const Matrix& b)
{
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
        throw Error(ErrorCode::InvalidArgument, "matrix shapes differ");
    Matrix r = a;
    for (std::size_t i = 0; i < r.data_.size(); ++i)
        r.data_[i] += b.data_[i];
    return r;
}

Matrix operator-(const Matrix& a, const Matrix& b)
{
    return a + (-1.0) * b;
}

Matrix operator*(double s, const Matrix& a)
{
    Matrix r = a;
    for (double& x : r.data_)
        x *= s;
    return r;
}

Matrix operator*(const Matrix& a, const Matrix& b)
{
    if (a.cols_ != b.rows_)
        throw Error(ErrorCode::InvalidArgument, "matrix shapes do not chain");
    Matrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0)
                continue;
            for (std::size_t j = 0; j < b.cols_; ++j)
                r(i, j) += aik * b(k, j);
        }
    return r;
}

double norm_inf(const Matrix& m)
{
    double best = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        double s = 0.0;
        for (double x : m.row(r))
            s += std::fabs(x);
        best = std::max(best, s);
    }
    return best;
}

double asymmetry(const Matrix& m)
{
    if (m.rows() != m.cols())
        return INFINITY;
    double worst = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            worst = std::max(worst, std::fabs(m(i, j) - m(j, i)));
    return worst;
}

Matrix solve(Matrix a, Matrix b, double pivot_tol)
{
    const std::size_t n = a.rows();
    if (a.cols() != n || b.rows() != n)
        throw Error(ErrorCode::InvalidArgument, "solve: shape mismatch");
    double scale = 0.0;
    for (double x : a.data())
        scale = std::max(scale, std::fabs(x));
    const double tol = pivot_tol * std::max(scale, 1.0);

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a(r, col)) > std::fabs(a(pivot, col)))
                pivot = r;
        if (std::fabs(a(pivot, col)) < tol)
            throw Error(ErrorCode::SingularSystem, "pivot below tolerance in column " + std::to_string(col));
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c)
                std::swap(a(col, c), a(pivot, c));
            for (std::size_t c = 0; c < b.cols(); ++c)
                std::swap(b(col, c), b(pivot, c));
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0)
                continue;
            for (std::size_t c = col; c < n; ++c)
                a(r, c) -= f * a(col, c);
            for (std::size_t c = 0; c < b.cols(); ++c)
                b(r, c) -= f * b(col, c);
        }
    }
    Matrix x(n, b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c)
        for (std::size_t i = n; i-- > 0;) {
            double s = b(i, c);
            for (std::size_t k = i + 1; k < n; ++k)
                s -= a(i, k) * x(k, c);
            x(i, c) = s / a(i, i);
        }
    return x;
}

} // namespace tangleflow
