#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "torusflow/cycle_basis.hpp"
#include "torusflow/flows.hpp"
#include "torusflow/graph.hpp"

namespace torusflow {

struct Bus {
    double v = 1.0;  // voltage magnitude, p.u.
    double p = 0.0;  // active injection, MW when base_mva > 0, else p.u.
};

struct Branch {
    int from = 0;
    int to = 0;
    double susceptance = 1.0;  // Im(Y_ij) > 0
};

/// Lossless transmission network with PV buses.
struct PowerCase {
    std::string name;
    /// <= 0 means the bus injections are already per unit.
    double base_mva = 0.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
};

/// Per-unit injections shifted to sum to zero.
struct BalancedSupply {
    Vector p;
    /// Mean that was subtracted from every bus (p.u.).
    double correction = 0.0;
};

/// Throws InputError when the total correction exceeds 1% of total generation.
[[nodiscard]] BalancedSupply balanced_supply(const PowerCase& c);

/// Graph with edge weights V_i V_j b_ij; parallel branches are merged.
[[nodiscard]] WeightedGraph case_graph(const PowerCase& c);

/// sin flow problem of the case. GammaError when gamma >= pi/2 - 1e-9.
[[nodiscard]] FlowNetworkProblem case_to_problem(const PowerCase& c, double gamma);

/// max_e |f_e| / a_e.
[[nodiscard]] double congestion(const Solution& solution, const FlowNetworkProblem& problem);
[[nodiscard]] double congestion(const Vector& f, const WeightedGraph& g);

struct CongestionSample {
    double scale = 0.0;
    double congestion = 0.0;
    std::vector<double> loop_flows;
};

struct SweepResult {
    WindingVector u;
    /// A solution with winding u exists at scale 0.
    bool exists = false;
    /// Largest certified scale P; the bracket [ptc, ptc_upper] has width <= tol.
    double ptc = 0.0;
    double ptc_upper = 0.0;
    std::vector<CongestionSample> congestion;
    /// Loop flows of the solution at scale ptc.
    std::vector<double> loop_flows;
};

struct SweepOptions {
    double tol = 1e-6;
    int samples = 11;
    double rho = kDefaultRho;
    int jobs = 1;
};

/// Scale bound beyond which some node cannot be balanced:
/// min over nodes with p_hat_i != 0 of (sum of incident capacities) / |p_hat_i|.
[[nodiscard]] double ptc_upper_bracket(const FlowNetworkProblem& profile);

/// True when the problem with supply scale * profile.p() has a solution with winding u.
[[nodiscard]] bool exists_at_scale(const FlowNetworkProblem& profile, const CycleBasis& basis, const IntVector& u,
                                   double scale, double rho = kDefaultRho);

/// Power transmission capacity at winding u by bisection on the scale of profile.p().
[[nodiscard]] SweepResult ptc(const FlowNetworkProblem& profile, const CycleBasis& basis, const WindingVector& u,
                              const SweepOptions& options = {});

/// ptc for every candidate winding vector, in lexicographic order.
[[nodiscard]] std::vector<SweepResult> sweep(const FlowNetworkProblem& profile, const CycleBasis& basis,
                                             const SweepOptions& options = {});

/// Built-in cases: ring12-sym, ring12-asym, pentagon, expo(s) (also expo<s>,
/// expo:<s>), rts24-mod. rts24-mod reads voltages and branches from
/// `data_file` (case JSON) and replaces the injections with the modified profile.
[[nodiscard]] PowerCase builtin_case(const std::string& name, const std::filesystem::path& data_file = {});

[[nodiscard]] std::vector<std::string> builtin_case_names();

/// Modified RTS-24 injections (MW), bus order 1..24.
[[nodiscard]] const std::vector<double>& rts24_modified_injections();

/// The 11-cycle basis of the RTS-24 network as node sequences (0-based).
[[nodiscard]] std::vector<std::vector<int>> rts24_cycle_sequences();

/// MATPOWER-style branch record: fbus, tbus (1-based), r, x.
struct MatpowerBranch {
    int fbus = 1;
    int tbus = 1;
    double r = 0.0;
    double x = 1.0;
};

/// Lossless conversion: b = 1 / x, buses shifted to 0-based; r is ignored.
[[nodiscard]] std::vector<Branch> branches_from_matpower(const std::vector<MatpowerBranch>& records);

}  // namespace torusflow
