#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "torusflow/cycle_basis.hpp"
#include "torusflow/flow_function.hpp"
#include "torusflow/graph.hpp"
#include "torusflow/torus.hpp"

namespace torusflow {

/// Find (f, theta) with B f = p, f_e = a_e h_e(delta_e) and |delta_e| <= gamma.
///
/// Flow functions must be strictly increasing on [-gamma, gamma]. If every
/// edge is strictly decreasing instead, the problem is solved internally
/// with h, p and f negated; all public results use the caller's signs.
class FlowNetworkProblem {
public:
    FlowNetworkProblem(WeightedGraph graph, std::vector<FlowFunction> flow_functions, Vector p, double gamma);
    /// Same flow function on every edge.
    FlowNetworkProblem(WeightedGraph graph, const FlowFunction& h, Vector p, double gamma);

    [[nodiscard]] const WeightedGraph& graph() const noexcept { return graph_; }
    [[nodiscard]] const std::vector<FlowFunction>& flow_functions() const noexcept { return flows_; }
    [[nodiscard]] const Vector& p() const noexcept { return p_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }

    /// +1, or -1 when the problem was negated at ingestion.
    [[nodiscard]] double orientation() const noexcept { return sign_; }
    /// Increasing flow functions actually iterated on.
    [[nodiscard]] const std::vector<ExtendedFlowFunction>& extended() const noexcept { return extended_; }
    /// Per-edge a_e |h_e(gamma)|.
    [[nodiscard]] const Vector& capacity() const noexcept { return capacity_; }
    [[nodiscard]] const Vector& lmin() const noexcept { return lmin_; }
    [[nodiscard]] const Vector& lmax() const noexcept { return lmax_; }
    /// ||I - L_min L_max^{-1}||_inf.
    [[nodiscard]] double contraction_rate() const noexcept { return rate_; }

    /// The same problem with another supply vector.
    [[nodiscard]] FlowNetworkProblem with_supply(Vector p) const;

private:
    WeightedGraph graph_;
    std::vector<FlowFunction> flows_;
    Vector p_;
    double gamma_;
    double sign_ = 1.0;
    std::vector<ExtendedFlowFunction> extended_;
    Vector capacity_;
    Vector lmin_;
    Vector lmax_;
    double rate_ = 0.0;
};

inline constexpr double kFeasibilitySlack = 1e-9;
inline constexpr double kResidualTolerance = 1e-8;
inline constexpr double kDefaultRho = 1e-10;

struct SolutionReport {
    double balance_residual = 0.0;
    double physics_residual = 0.0;
    /// gamma - max_e |delta_e|
    double constraint_margin = 0.0;
    /// max_i |raw winding - u_i|
    double winding_deviation = 0.0;
    bool winding_matches = true;
    /// some |f_e| lies within the feasibility slack of its capacity
    bool boundary = false;
    /// allowed negative margin; widened for boundary solutions
    double margin_tolerance = 1e-9;
    int iterations = 0;
    double final_step = 0.0;

    [[nodiscard]] bool certified() const noexcept;
};

struct Solution {
    Vector f;
    PhaseVector theta;
    WindingVector u;
    SolutionReport report;
};

struct IterationReport {
    int iterations = 0;
    double final_step = 0.0;
    double rate = 0.0;
    int budget = 0;
    bool feasible = false;
    std::vector<int> infeasible_edges;
    /// ||f^(k) - f^(k-1)|| in the (L_min A)^{-1/2} weighted 2-norm, k = 1, 2, ...
    std::vector<double> weighted_steps;

    /// Every consecutive pair of weighted steps shrinks by at least `rate` (+1e-12).
    [[nodiscard]] bool contraction_holds() const;
};

/// Totals over every projection iteration run in this process.
struct ContractionStatistics {
    std::size_t runs = 0;
    std::size_t step_pairs = 0;
    std::size_t violations = 0;
};
[[nodiscard]] ContractionStatistics contraction_statistics();

struct FeasibilityCheck {
    bool feasible = true;
    bool boundary = false;
    /// a_e |h_e(gamma)| - |f_e|
    Vector margins;
    std::vector<int> infeasible_edges;
};

[[nodiscard]] FeasibilityCheck check_feasibility(const FlowNetworkProblem& problem, const Vector& f);

/// Residuals of (f, theta) against the three problem equations; `u` is
/// compared with the winding vector of theta in `basis` when given.
[[nodiscard]] SolutionReport verify_solution(const FlowNetworkProblem& problem, const Vector& f,
                                             const PhaseVector& theta, const CycleBasis* basis = nullptr,
                                             const IntVector* u = nullptr);

/// Closed-form solution on trees; nullopt when some cutset flow exceeds its capacity.
/// Throws CyclicGraphError on graphs with cycles.
[[nodiscard]] std::optional<Solution> acyclic_solve(const FlowNetworkProblem& problem);

/// Projection iteration for one basis, with the matrices it needs cached.
/// All methods are const and safe to call concurrently.
class WindingSolver {
public:
    WindingSolver(const FlowNetworkProblem& problem, const CycleBasis& basis);

    [[nodiscard]] const FlowNetworkProblem& problem() const noexcept { return problem_; }
    [[nodiscard]] const WindingGeometry& geometry() const noexcept { return geometry_; }
    [[nodiscard]] const CycleBasis& basis() const noexcept { return geometry_.basis(); }

    /// f^(0) = A B^T L^dagger p.
    [[nodiscard]] Vector cutset_flow() const;

    /// T_u(f). Throws BalanceError when ||B f - p||_inf >= 1e-8.
    [[nodiscard]] Vector map(const IntVector& u, const Vector& f) const;

    /// Iterates T_u from `start` (the cutset flow by default) until the
    /// infinity-norm step drops below rho, and below
    /// rho (1 - rate) / (rate kappa) so the a-posteriori error is under rho as well.
    [[nodiscard]] std::pair<Vector, IterationReport> iterate(const IntVector& u, double rho = kDefaultRho,
                                                             const Vector* start = nullptr) const;

    /// theta with edge differences h^{-1}(A^{-1} f) and winding vector u,
    /// rotated so node 0 sits at phase 0. Throws FeasibilityError.
    [[nodiscard]] PhaseVector recover(const IntVector& u, const Vector& f) const;

    /// Full pipeline for one winding vector: iterate, check, recover, verify.
    [[nodiscard]] std::optional<Solution> solve(const WindingVector& u, double rho = kDefaultRho) const;

private:
    [[nodiscard]] Vector internal_map(const IntVector& u, const Vector& f_internal) const;
    [[nodiscard]] Vector edge_angles(const Vector& f_internal) const;

    FlowNetworkProblem problem_;
    WindingGeometry geometry_;
    Vector weights_;
    Vector internal_p_;
    Matrix step_matrix_;      // P_{L_min} L_min A
    Matrix recover_matrix_;   // L^dagger B A
    Vector sqrt_inv_weight_;  // (L_min A)^{-1/2}
    double kappa_ = 1.0;
};

[[nodiscard]] Vector winding_fixed_point_map(const FlowNetworkProblem& problem, const CycleBasis& basis,
                                             const IntVector& u, const Vector& f);
[[nodiscard]] std::pair<Vector, IterationReport> projection_iteration(const FlowNetworkProblem& problem,
                                                                      const CycleBasis& basis, const IntVector& u,
                                                                      double rho = kDefaultRho);
[[nodiscard]] PhaseVector recover_phases(const FlowNetworkProblem& problem, const CycleBasis& basis,
                                         const IntVector& u, const Vector& f);

struct SolveOptions {
    double rho = kDefaultRho;
    BasisKind basis = BasisKind::fundamental;
    int jobs = 1;
};

/// Every solution of the problem, one per winding vector at most, sorted
/// lexicographically by winding vector.
[[nodiscard]] std::vector<Solution> solve_all(const FlowNetworkProblem& problem, const SolveOptions& options = {});
[[nodiscard]] std::vector<Solution> solve_all(const FlowNetworkProblem& problem, const CycleBasis& basis,
                                              const SolveOptions& options = {});

struct FlowDecomposition {
    Vector cutset;
    Vector cyclic;
};

/// f = A B^T L^dagger (B f) + f_cyc with B f_cyc = 0.
[[nodiscard]] FlowDecomposition decompose_flow(const WeightedGraph& g, const Vector& f);

/// v_sigma^T f.
[[nodiscard]] double loop_flow(const Cycle& cycle, const Vector& f);

}  // namespace torusflow
