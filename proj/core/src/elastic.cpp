#include "torusflow/elastic.hpp"

#include <algorithm>
#include <cmath>

#include "torusflow/errors.hpp"

namespace torusflow {

std::string to_string(EnergyFamily family) {
    switch (family) {
        case EnergyFamily::spacing: return "spacing";
        case EnergyFamily::quadratic: return "quadratic";
        case EnergyFamily::cosine_series: return "cosine_series";
    }
    return "?";
}

EnergyFamily energy_family_from_string(const std::string& name) {
    if (name == "spacing") return EnergyFamily::spacing;
    if (name == "quadratic") return EnergyFamily::quadratic;
    if (name == "cosine_series" || name == "custom") return EnergyFamily::cosine_series;
    throw InputError("unknown energy family '" + name + "' (expected spacing, quadratic or cosine_series)");
}

ElasticEnergy ElasticEnergy::cosine_series(std::vector<double> coefficients) {
    if (std::none_of(coefficients.begin(), coefficients.end(), [](double c) { return c != 0.0; }))
        throw InputError("cosine-series energy needs at least one nonzero coefficient");
    return ElasticEnergy(EnergyFamily::cosine_series, std::move(coefficients));
}

double ElasticEnergy::value(double y) const {
    switch (family_) {
        case EnergyFamily::spacing: return 1.0 - std::cos(y);
        case EnergyFamily::quadratic: {
            const double w = wrap_angle(y);
            return 0.5 * w * w;
        }
        case EnergyFamily::cosine_series: break;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < coeffs_.size(); ++k) s += coeffs_[k] * (1.0 - std::cos(static_cast<double>(k + 1) * y));
    return s;
}

double ElasticEnergy::derivative(double y) const { return flow_function().value(y); }

FlowFunction ElasticEnergy::flow_function() const {
    switch (family_) {
        case EnergyFamily::spacing: return FlowFunction::sine();
        case EnergyFamily::quadratic: return FlowFunction::linear();
        case EnergyFamily::cosine_series: break;
    }
    std::vector<double> c(coeffs_.size());
    for (std::size_t k = 0; k < coeffs_.size(); ++k) c[k] = static_cast<double>(k + 1) * coeffs_[k];
    return FlowFunction::fourier(std::move(c));
}

ElasticNetworkProblem::ElasticNetworkProblem(WeightedGraph graph, std::vector<ElasticEnergy> energies)
    : graph_(std::move(graph)), energies_(std::move(energies)) {
    if (static_cast<int>(energies_.size()) != graph_.edge_count())
        throw InputError("need exactly one energy per edge");
}

ElasticNetworkProblem::ElasticNetworkProblem(WeightedGraph graph, const ElasticEnergy& energy)
    : ElasticNetworkProblem(graph, std::vector<ElasticEnergy>(static_cast<std::size_t>(graph.edge_count()), energy)) {}

FlowNetworkProblem ElasticNetworkProblem::flow_problem(const Vector& tau, double gamma) const {
    std::vector<FlowFunction> h;
    h.reserve(energies_.size());
    for (const auto& H : energies_) h.push_back(H.flow_function());
    return {graph_, std::move(h), tau, gamma};
}

double energy(const ElasticNetworkProblem& problem, const PhaseVector& theta) {
    const auto& g = problem.graph();
    const Vector delta = edge_differences(g, theta).values;
    double total = 0.0;
    for (int e = 0; e < g.edge_count(); ++e)
        total += g.edge(e).weight * problem.energies()[static_cast<std::size_t>(e)].value(delta[e]);
    return total;
}

Vector gradient(const ElasticNetworkProblem& problem, const PhaseVector& theta) {
    const auto& g = problem.graph();
    const Vector delta = edge_differences(g, theta).values;
    Vector grad = Vector::Zero(g.node_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(e);
        const double f = ed.weight * problem.energies()[static_cast<std::size_t>(e)].derivative(delta[e]);
        grad[ed.to] += f;
        grad[ed.from] -= f;
    }
    return grad;
}

std::vector<PhaseVector> solve_elastic(const ElasticNetworkProblem& problem, const Vector& tau, double gamma,
                                       const SolveOptions& options) {
    std::vector<PhaseVector> out;
    for (auto& s : solve_all(problem.flow_problem(tau, gamma), options)) out.push_back(std::move(s.theta));
    return out;
}

}  // namespace torusflow
