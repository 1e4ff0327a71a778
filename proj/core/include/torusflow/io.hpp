#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "torusflow/cycle_basis.hpp"
#include "torusflow/elastic.hpp"
#include "torusflow/flows.hpp"
#include "torusflow/powerflow.hpp"

namespace torusflow {

using Json = nlohmann::json;

// Every reader throws InputError with a short diagnostic on malformed input.

/// Parses a JSON file.
[[nodiscard]] Json read_json_file(const std::filesystem::path& path);

/// {"n": nodes, "edges": [[i, j] or [i, j, weight], ...]}; "nodes" is accepted for "n".
[[nodiscard]] WeightedGraph graph_from_json(const Json& j);
[[nodiscard]] Json to_json(const WeightedGraph& g);

/// {"family": "sin" | "linear" | "custom", "coefficients": [...]}
[[nodiscard]] FlowFunction flow_function_from_json(const Json& j);
[[nodiscard]] Json to_json(const FlowFunction& h);

/// {"family": "spacing" | "quadratic" | "cosine_series", "coefficients": [...]}
[[nodiscard]] ElasticEnergy energy_from_json(const Json& j);
[[nodiscard]] Json to_json(const ElasticEnergy& H);

/// {"graph": ..., "flow": {...} or [{...} per edge], "p": [...], "gamma": x,
///  "cycles": [[node, ...], ...] (optional)}. `gamma` overrides the file.
[[nodiscard]] FlowNetworkProblem problem_from_json(const Json& j, std::optional<double> gamma = std::nullopt);
[[nodiscard]] Json to_json(const FlowNetworkProblem& problem);

/// Node sequences listed under "cycles", if any.
[[nodiscard]] std::optional<std::vector<std::vector<int>>> cycles_from_json(const Json& j);

struct ElasticInput {
    ElasticNetworkProblem problem;
    Vector tau;
    double gamma;
};

/// Same layout as a flow problem with "energy" in place of "flow" ("tau" or "p").
[[nodiscard]] ElasticInput elastic_from_json(const Json& j, std::optional<double> gamma = std::nullopt);

/// {"base_mva": x, "buses": [{"v": x, "p": x}], "branches": [[i, j, b], ...]}
[[nodiscard]] PowerCase case_from_json(const Json& j);
[[nodiscard]] Json to_json(const PowerCase& c);
[[nodiscard]] PowerCase load_case(const std::filesystem::path& path);

[[nodiscard]] Json to_json(const CycleBasis& basis);
[[nodiscard]] Json to_json(const SolutionReport& report);
/// {"u", "f", "theta", "loop_flows", "report"}
[[nodiscard]] Json to_json(const Solution& s, const CycleBasis* basis);

/// Full solve report: basis, settings and the solutions in the given order.
[[nodiscard]] Json solutions_document(const FlowNetworkProblem& problem, const CycleBasis* basis,
                                      const std::vector<Solution>& solutions, double rho);

/// One solution as read back from a report.
struct StoredSolution {
    IntVector u;
    Vector f;
    Vector theta;
};

[[nodiscard]] std::vector<StoredSolution> stored_solutions_from_json(const Json& document);

/// Columns u_*, f_*, theta_*, loop_*, margin_*; one row per solution.
[[nodiscard]] std::string solutions_csv(const FlowNetworkProblem& problem, const CycleBasis* basis,
                                        const std::vector<Solution>& solutions);

/// Shortest text that reads back to the same double.
[[nodiscard]] std::string format_double(double x);

}  // namespace torusflow
