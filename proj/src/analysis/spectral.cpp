#include <algorithm>
#include <cmath>
#include <numeric>

#include "tangleflow/analysis.hpp"
#include "tangleflow/error.hpp"

namespace tangleflow {

SpectralData eigendecompose(const Matrix& laplacian, double symmetry_tol)
{
    const std::size_t n = laplacian.rows();
    if (laplacian.cols() != n)
        throw Error(ErrorCode::NotSymmetric, "matrix is not square");
    if (!(asymmetry(laplacian) <= symmetry_tol))
        throw Error(ErrorCode::NotSymmetric, "matrix is not symmetric within tolerance");

    Matrix a = laplacian;
    Matrix v = Matrix::identity(n);
    double scale = 0.0;
    for (double x : a.data())
        scale = std::max(scale, std::fabs(x));

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off += a(p, q) * a(p, q);
        if (off <= 1e-30 * std::max(scale * scale, 1e-300))
            break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0)
                    continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // lambda = -diag; ascending lambda is descending diagonal.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    SpectralData out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = order[k];
        const double lambda = -a(src, src);
        // Round-off around the zero mode can come out slightly negative.
        out.eigenvalues[k] = std::fabs(lambda) <= 1e-12 * std::max(scale, 1.0) ? 0.0 : lambda;
        // Sign convention: positive component sum, else first nonzero entry positive.
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            sum += v(r, src);
        double sign = 1.0;
        if (std::fabs(sum) > 1e-8)
            sign = sum > 0.0 ? 1.0 : -1.0;
        else
            for (std::size_t r = 0; r < n; ++r)
                if (std::fabs(v(r, src)) > 1e-8) {
                    sign = v(r, src) > 0.0 ? 1.0 : -1.0;
                    break;
                }
        for (std::size_t r = 0; r < n; ++r)
            out.eigenvectors(r, k) = sign * v(r, src);
    }
    return out;
}

double commutator_norm(const Matrix& a, const Matrix& b)
{
    return norm_inf(a * b - b * a);
}

double commutation_check(const WeaveSystem& weave)
{
    const LaplacianSet& l = weave.laplacians();
    return commutator_norm(*l.blue, *l.red);
}

} // namespace tangleflow
