#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tangleflow/dynamics.hpp"
#include "tangleflow/matrix.hpp"
#include "tangleflow/model.hpp"
#include "tangleflow/topology.hpp"

namespace tangleflow {

/// Spectrum of a Laplacian in the A - D convention: the matrix eigenvalues
/// are -lambda[k], with lambda ascending and nonnegative.
struct SpectralData {
    std::vector<double> eigenvalues;
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    Matrix eigenvectors;
};

/// Cyclic Jacobi diagonalization. Throws NotSymmetric if the input is not
/// symmetric within `symmetry_tol`.
SpectralData eigendecompose(const Matrix& laplacian, double symmetry_tol = 1e-12);

/// ‖A B - B A‖_∞
double commutator_norm(const Matrix& a, const Matrix& b);

/// ‖L_B L_R - L_R L_B‖_∞ of a weave.
double commutation_check(const WeaveSystem& weave);

/// A named scalar time series.
struct Series {
    std::string name;
    std::vector<double> t;
    std::vector<double> value;

    std::size_t size() const noexcept { return t.size(); }
};

/// Graphs: |M_B(t) - M_R(t)| with M the mean height of each copy.
/// Weaves: one series per cut k = 1..K-1, |M_U(t) - M_{U^c}(t)| / w(U) with
/// U = W_1 ∪ ... ∪ W_k, M the subweave barycenter (a sum) and w(U) the number
/// of crossings between U and its complement.
/// Throws EntangledInput when the input is entangled.
std::vector<Series> separation_series(const System& system, const Trajectory& trajectory);
std::vector<Series> separation_series(const WeaveSystem& weave, const Trajectory& trajectory,
                                      const TangleDecomposition& decomposition);

struct ScalingReport {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t sample_count = 0;
    std::string series_name;
};

/// Least-squares line through (log t, log value) for samples with
/// t_lo <= t <= t_hi. Throws InsufficientSamples (< 20 samples) and
/// NonpositiveValue.
ScalingReport fit_power_law(const Series& series, double t_lo, double t_hi);
/// Window of the last two decades: [t_end / 100, t_end].
ScalingReport fit_power_law(const Series& series);

enum class Copy { Blue, Red };

/// max_v |z(v) - mean z| of one copy, per sample.
Series flatness_series(const System& system, const Trajectory& trajectory, Copy copy);
/// Same over a weave component: z_blue along its blue threads and z_red along
/// its red threads. Throws UnknownComponent for empty or out-of-range sets.
Series flatness_series(const WeaveSystem& weave, const Trajectory& trajectory, const ThreadSet& component);

struct LimitComparison {
    bool within_tolerance = false;
    double residual = 0.0;
};

/// Sup-norm distance between the final configurations after shifting B so
/// that both have the same global barycenter. Throws NotConverged.
LimitComparison compare_limits(const Trajectory& a, const Trajectory& b, double tol);
/// Same on two configurations, no convergence requirement.
double aligned_distance(const Configuration& a, const Configuration& b);

/// Permutation of height slots: slot c * n + v is (blue, v) for c = 0 and
/// (red, v) for c = 1. image[p] is the slot g·p.
struct HeightSymmetry {
    std::vector<std::size_t> image;
};

/// Colour-preserving symmetry from a vertex automorphism.
HeightSymmetry vertex_symmetry(const std::vector<VertexId>& permutation);

/// 90° turn of a square weave: (blue, v_{i,j}) -> (red, v_{N-1-j,i}) and
/// (red, v_{i,j}) -> (blue, v_{N-1-j,i}). Throws InvalidArgument for non-square designs.
HeightSymmetry weave_quarter_turn(const WeaveDesign& design);

/// True if g maps every crossing to one with the matching over/under
/// information (sign flips when g swaps colours).
bool preserves_crossings(const CrossingMap& crossing, const HeightSymmetry& g);

/// max_p |Z(g·p) - Z(p)|
double symmetry_residual(const Configuration& config, const HeightSymmetry& g);

/// Largest sup-norm change of the mean-free heights between any sample in the
/// last `tail_fraction` of the trajectory (by time) and the final sample.
double shape_drift(const Trajectory& trajectory, double tail_fraction = 0.5);

} // namespace tangleflow
