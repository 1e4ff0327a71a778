#pragma once

#include <string>
#include <vector>

#include "torusflow/flow_function.hpp"
#include "torusflow/flows.hpp"
#include "torusflow/graph.hpp"
#include "torusflow/torus.hpp"

namespace torusflow {

enum class EnergyFamily { spacing, quadratic, cosine_series };

[[nodiscard]] std::string to_string(EnergyFamily family);
[[nodiscard]] EnergyFamily energy_family_from_string(const std::string& name);

/// Even, 2pi-periodic edge energy H together with its exact derivative.
///   spacing        H(y) = 1 - cos y
///   quadratic      H(y) = wrap(y)^2 / 2
///   cosine_series  H(y) = sum_k b_k (1 - cos(k y))
class ElasticEnergy {
public:
    [[nodiscard]] static ElasticEnergy spacing() { return ElasticEnergy(EnergyFamily::spacing, {}); }
    [[nodiscard]] static ElasticEnergy quadratic() { return ElasticEnergy(EnergyFamily::quadratic, {}); }
    [[nodiscard]] static ElasticEnergy cosine_series(std::vector<double> coefficients);

    [[nodiscard]] EnergyFamily family() const noexcept { return family_; }
    [[nodiscard]] const std::vector<double>& coefficients() const noexcept { return coeffs_; }

    [[nodiscard]] double value(double y) const;
    [[nodiscard]] double derivative(double y) const;
    /// h = H' as a flow function.
    [[nodiscard]] FlowFunction flow_function() const;

private:
    ElasticEnergy(EnergyFamily family, std::vector<double> coeffs) : family_(family), coeffs_(std::move(coeffs)) {}

    EnergyFamily family_;
    std::vector<double> coeffs_;
};

/// Edge-sum energy sum_e a_e H_e(delta_e) on the torus.
class ElasticNetworkProblem {
public:
    ElasticNetworkProblem(WeightedGraph graph, std::vector<ElasticEnergy> energies);
    ElasticNetworkProblem(WeightedGraph graph, const ElasticEnergy& energy);

    [[nodiscard]] const WeightedGraph& graph() const noexcept { return graph_; }
    [[nodiscard]] const std::vector<ElasticEnergy>& energies() const noexcept { return energies_; }

    /// The flow problem whose solutions are the critical points with gradient tau.
    [[nodiscard]] FlowNetworkProblem flow_problem(const Vector& tau, double gamma) const;

private:
    WeightedGraph graph_;
    std::vector<ElasticEnergy> energies_;
};

[[nodiscard]] double energy(const ElasticNetworkProblem& problem, const PhaseVector& theta);

/// Component i is sum over neighbours j of a_ij h(theta_i - theta_j).
[[nodiscard]] Vector gradient(const ElasticNetworkProblem& problem, const PhaseVector& theta);

/// Every theta with grad H(theta) = tau and |delta_e| <= gamma, canonical (theta_0 = 0).
[[nodiscard]] std::vector<PhaseVector> solve_elastic(const ElasticNetworkProblem& problem, const Vector& tau,
                                                     double gamma, const SolveOptions& options = {});

}  // namespace torusflow
