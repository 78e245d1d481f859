#pragma once

#include <cstddef>
#include <string_view>

namespace tangleflow::kernels {

// Per-vertex arithmetic of the flow. Every variant must produce results that
// are bit-identical to the scalar reference: only elementwise IEEE operations
// (no FMA contraction, no reassociation) and order-independent min/max.

/// force[v] = s[v] / d^2 and inv_gap[v] = 1 / |d| with d = zb[v] - zr[v].
using RepulsionFn = void (*)(const double* zb, const double* zr, const double* s, double* force, double* inv_gap,
                             std::size_t n);
/// out[i] = y[i] + a * x[i]
using AxpyFn = void (*)(double a, const double* x, const double* y, double* out, std::size_t n);
/// out[i] = y[i] + h6 * (((k1[i] + 2 k2[i]) + 2 k3[i]) + k4[i])
using Rk4CombineFn = void (*)(double h6, const double* y, const double* k1, const double* k2, const double* k3,
                              const double* k4, double* out, std::size_t n);
/// max |x[i]|, 0 for n = 0
using MaxAbsFn = double (*)(const double* x, std::size_t n);
/// min |zb[i] - zr[i]|, +inf for n = 0
using MinAbsDiffFn = double (*)(const double* zb, const double* zr, std::size_t n);

struct KernelTable {
    std::string_view name;
    RepulsionFn repulsion;
    AxpyFn axpy;
    Rk4CombineFn rk4_combine;
    MaxAbsFn max_abs;
    MinAbsDiffFn min_abs_diff;
};

const KernelTable& scalar_table() noexcept;

/// AVX2 table, or nullptr when the running CPU (or the build) lacks AVX2.
const KernelTable* avx2_table() noexcept;

/// Table used by the library. Chosen once: TANGLEFLOW_SIMD=scalar forces the
/// reference path, otherwise the widest supported variant wins.
const KernelTable& active() noexcept;

/// Overrides the selection (for equivalence tests and benchmarks); nullptr
/// restores the automatic choice. Not thread-safe; call before integrating.
void force(const KernelTable* table) noexcept;

} // namespace tangleflow::kernels
