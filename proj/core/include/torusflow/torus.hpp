#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "torusflow/cycle_basis.hpp"
#include "torusflow/graph.hpp"

namespace torusflow {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Representative of x modulo 2pi in [-pi, pi).
[[nodiscard]] double wrap_angle(double x) noexcept;

/// Signed difference alpha - beta wrapped to [-pi, pi).
[[nodiscard]] double ccw_difference(double alpha, double beta) noexcept;

/// A point of the n-torus, every component kept in [-pi, pi).
class PhaseVector {
public:
    PhaseVector() = default;
    /// Wraps every component of `angles`.
    explicit PhaseVector(const Vector& angles);

    [[nodiscard]] const Vector& values() const noexcept { return theta_; }
    [[nodiscard]] int size() const noexcept { return static_cast<int>(theta_.size()); }
    [[nodiscard]] double operator[](int i) const { return theta_[i]; }

    /// rot_s: adds s to every component.
    [[nodiscard]] PhaseVector rotated(double s) const;
    /// Rotation representative with node 0 at phase 0.
    [[nodiscard]] PhaseVector canonical() const;

private:
    Vector theta_;
};

/// Largest componentwise distance between two phase vectors on the circle,
/// after removing a common rotation (both are compared with node 0 at 0).
[[nodiscard]] double distance_modulo_rotation(const PhaseVector& a, const PhaseVector& b);

/// Wrapped edge differences delta_e = wrap(theta_to - theta_from), each in (-pi, pi).
struct EdgeDifferenceVector {
    Vector values;
};

/// Throws PuncturedTorusError when some |delta_e| is pi (within 1e-12).
[[nodiscard]] EdgeDifferenceVector edge_differences(const WeightedGraph& g, const PhaseVector& theta);

/// Integer winding vector, tagged with the fingerprint of its basis.
struct WindingVector {
    IntVector values;
    std::uint64_t basis_fingerprint = 0;

    friend bool operator==(const WindingVector&, const WindingVector&) = default;
};

/// (1/2pi) * sum of counterclockwise differences along the cycle, unrounded.
/// Throws PuncturedTorusError if a cycle edge sits on the puncture.
[[nodiscard]] double winding_number_raw(const Cycle& cycle, const PhaseVector& theta);

/// Rounded winding number; NonIntegerWindingError if the raw value is more
/// than 1e-6 from an integer.
[[nodiscard]] int winding_number(const Cycle& cycle, const PhaseVector& theta);

[[nodiscard]] WindingVector winding_vector(const CycleBasis& basis, const PhaseVector& theta);

/// |w_sigma| <= ceil(n_sigma / 2) - 1 on the punctured torus.
[[nodiscard]] int max_winding_magnitude(int cycle_length) noexcept;

/// floor(gamma * n_sigma / 2pi): bound on |w_sigma| for solutions with |delta_e| <= gamma.
[[nodiscard]] int candidate_bound(int cycle_length, double gamma) noexcept;

/// The integer box {u : |u_i| <= floor(gamma n_i / 2pi)} in lexicographic order.
class WindingEnumerator {
public:
    WindingEnumerator(const CycleBasis& basis, double gamma);

    [[nodiscard]] const IntVector& bounds() const noexcept { return bounds_; }
    [[nodiscard]] std::size_t count() const noexcept { return count_; }
    /// The index-th winding vector (0 <= index < count()).
    [[nodiscard]] WindingVector operator[](std::size_t index) const;
    [[nodiscard]] std::vector<WindingVector> all() const;

private:
    IntVector bounds_;
    std::size_t count_ = 1;
    std::uint64_t fingerprint_ = 0;
};

[[nodiscard]] inline WindingEnumerator feasible_winding_vectors(const CycleBasis& basis, double gamma) {
    return {basis, gamma};
}

/// Coordinates of a reduced winding cell: x orthogonal to 1 with
/// B^T x + 2pi C^dagger u equal to the edge differences.
struct PolytopePoint {
    Vector x;
    WindingVector u;
};

/// Cached matrices relating the torus to the winding polytopes of one basis.
class WindingGeometry {
public:
    WindingGeometry(const WeightedGraph& g, CycleBasis basis);

    [[nodiscard]] const WeightedGraph& graph() const noexcept { return graph_; }
    [[nodiscard]] const CycleBasis& basis() const noexcept { return basis_; }
    [[nodiscard]] const Matrix& incidence() const noexcept { return b_; }
    [[nodiscard]] const Matrix& cycle_pinv() const noexcept { return c_pinv_; }

    /// 2pi C^dagger u, the offset of polytope P_u.
    [[nodiscard]] Vector offset(const IntVector& u) const;
    /// ||B^T x + offset(u)||_inf < pi and x orthogonal to 1.
    [[nodiscard]] bool in_polytope(const Vector& x, const IntVector& u) const;
    /// Solves B^T y = w on 1-perp (w must lie in Img(B^T)).
    [[nodiscard]] Vector potential(const Vector& w) const;

    [[nodiscard]] PolytopePoint torus_to_polytope(const PhaseVector& theta) const;
    /// Throws PolytopeMembershipError when x is not in P_u.
    [[nodiscard]] PhaseVector polytope_to_torus(const Vector& x, const IntVector& u) const;

private:
    WeightedGraph graph_;
    CycleBasis basis_;
    Matrix b_;
    Matrix c_pinv_;
    Matrix unweighted_lap_pinv_;
};

[[nodiscard]] PolytopePoint torus_to_polytope(const WeightedGraph& g, const CycleBasis& basis,
                                              const PhaseVector& theta);
[[nodiscard]] PhaseVector polytope_to_torus(const WeightedGraph& g, const CycleBasis& basis, const Vector& x,
                                            const IntVector& u);

}  // namespace torusflow
