// Built with -mavx2 (and without -mfma): only this translation unit may
// assume AVX2; callers reach it through avx2_table() after a CPU check.
#include "tangleflow/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace tangleflow::kernels {
namespace {

constexpr std::size_t kLanes = 4;

inline __m256d abs_pd(__m256d v)
{
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

void repulsion(const double* zb, const double* zr, const double* s, double* force, double* inv_gap, std::size_t n)
{
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(zb + i), _mm256_loadu_pd(zr + i));
        _mm256_storeu_pd(force + i, _mm256_div_pd(_mm256_loadu_pd(s + i), _mm256_mul_pd(d, d)));
        _mm256_storeu_pd(inv_gap + i, _mm256_div_pd(one, abs_pd(d)));
    }
    for (; i < n; ++i) {
        const double d = zb[i] - zr[i];
        force[i] = s[i] / (d * d);
        inv_gap[i] = 1.0 / std::fabs(d);
    }
}

void axpy(double a, const double* x, const double* y, double* out, std::size_t n)
{
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
    for (; i < n; ++i)
        out[i] = y[i] + a * x[i];
}

void rk4_combine(double h6, const double* y, const double* k1, const double* k2, const double* k3, const double* k4,
                 double* out, std::size_t n)
{
    const __m256d vh = _mm256_set1_pd(h6);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        __m256d acc = _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_mul_pd(two, _mm256_loadu_pd(k2 + i)));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(two, _mm256_loadu_pd(k3 + i)));
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(k4 + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(vh, acc)));
    }
    for (; i < n; ++i)
        out[i] = y[i] + h6 * (((k1[i] + 2.0 * k2[i]) + 2.0 * k3[i]) + k4[i]);
}

// max/min are exact, so lane order does not matter. NaN handling follows
// fmax/fmin (a NaN lane is ignored) in both paths.
double max_abs(const double* x, std::size_t n)
{
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d v = abs_pd(_mm256_loadu_pd(x + i));
        // operand order makes a NaN in v yield m, matching fmax
        m = _mm256_max_pd(v, m);
    }
    alignas(32) double lanes[kLanes];
    _mm256_store_pd(lanes, m);
    double r = 0.0;
    for (double l : lanes)
        r = std::fmax(r, l);
    for (; i < n; ++i)
        r = std::fmax(r, std::fabs(x[i]));
    return r;
}

double min_abs_diff(const double* zb, const double* zr, std::size_t n)
{
    __m256d m = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d v = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(zb + i), _mm256_loadu_pd(zr + i)));
        m = _mm256_min_pd(v, m);
    }
    alignas(32) double lanes[kLanes];
    _mm256_store_pd(lanes, m);
    double r = std::numeric_limits<double>::infinity();
    for (double l : lanes)
        r = std::fmin(r, l);
    for (; i < n; ++i)
        r = std::fmin(r, std::fabs(zb[i] - zr[i]));
    return r;
}

constexpr KernelTable kAvx2{"avx2", repulsion, axpy, rk4_combine, max_abs, min_abs_diff};

} // namespace

const KernelTable* avx2_table() noexcept
{
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &kAvx2 : nullptr;
}

} // namespace tangleflow::kernels

#else

namespace tangleflow::kernels {
const KernelTable* avx2_table() noexcept { return nullptr; }
} // namespace tangleflow::kernels

#endif
