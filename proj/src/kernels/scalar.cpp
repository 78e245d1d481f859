#include "tangleflow/kernels.hpp"

#include <cmath>
#include <limits>

namespace tangleflow::kernels {
namespace {

void repulsion(const double* zb, const double* zr, const double* s, double* force, double* inv_gap, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double d = zb[i] - zr[i];
        force[i] = s[i] / (d * d);
        inv_gap[i] = 1.0 / std::fabs(d);
    }
}

void axpy(double a, const double* x, const double* y, double* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        out[i] = y[i] + a * x[i];
}

void rk4_combine(double h6, const double* y, const double* k1, const double* k2, const double* k3, const double* k4,
                 double* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        out[i] = y[i] + h6 * (((k1[i] + 2.0 * k2[i]) + 2.0 * k3[i]) + k4[i]);
}

double max_abs(const double* x, std::size_t n)
{
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        m = std::fmax(m, std::fabs(x[i]));
    return m;
}

double min_abs_diff(const double* zb, const double* zr, std::size_t n)
{
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        m = std::fmin(m, std::fabs(zb[i] - zr[i]));
    return m;
}

constexpr KernelTable kScalar{"scalar", repulsion, axpy, rk4_combine, max_abs, min_abs_diff};

} // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

} // namespace tangleflow::kernels
