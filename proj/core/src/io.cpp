#include "torusflow/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "torusflow/errors.hpp"

namespace torusflow {

namespace {

template <class F>
auto guarded(const char* what, F&& body) {
    try {
        return body();
    } catch (const Json::exception& e) {
        throw InputError(std::string(what) + ": " + e.what());
    }
}

Vector vector_from_json(const Json& j) {
    if (!j.is_array()) throw InputError("expected an array of numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw InputError("expected an array of numbers");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

Json to_json_array(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

std::vector<double> coefficients_from(const Json& j) {
    if (!j.contains("coefficients")) throw InputError("custom family needs \"coefficients\"");
    const Vector c = vector_from_json(j.at("coefficients"));
    return {c.data(), c.data() + c.size()};
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw InputError(path.string() + ": malformed JSON (" + e.what() + ")");
    }
}

WeightedGraph graph_from_json(const Json& j) {
    return guarded("graph", [&] {
        const int n = j.contains("n") ? j.at("n").get<int>() : j.at("nodes").get<int>();
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() < 2 || e.size() > 3) throw InputError("graph: edges are [i, j] or [i, j, w]");
            edges.push_back({e[0].get<int>(), e[1].get<int>(), e.size() == 3 ? e[2].get<double>() : 1.0});
        }
        return WeightedGraph(n, std::move(edges));
    });
}

Json to_json(const WeightedGraph& g) {
    Json edges = Json::array();
    for (const auto& e : g.edges()) edges.push_back({e.from, e.to, e.weight});
    return {{"n", g.node_count()}, {"edges", edges}};
}

FlowFunction flow_function_from_json(const Json& j) {
    return guarded("flow", [&] {
        const FlowFamily family = flow_family_from_string(j.at("family").get<std::string>());
        switch (family) {
            case FlowFamily::sin: return FlowFunction::sine();
            case FlowFamily::linear: return FlowFunction::linear();
            case FlowFamily::custom: break;
        }
        return FlowFunction::fourier(coefficients_from(j));
    });
}

Json to_json(const FlowFunction& h) {
    Json out = {{"family", to_string(h.family())}};
    if (h.family() == FlowFamily::custom) out["coefficients"] = h.coefficients();
    return out;
}

ElasticEnergy energy_from_json(const Json& j) {
    return guarded("energy", [&] {
        switch (energy_family_from_string(j.at("family").get<std::string>())) {
            case EnergyFamily::spacing: return ElasticEnergy::spacing();
            case EnergyFamily::quadratic: return ElasticEnergy::quadratic();
            case EnergyFamily::cosine_series: break;
        }
        return ElasticEnergy::cosine_series(coefficients_from(j));
    });
}

Json to_json(const ElasticEnergy& H) {
    Json out = {{"family", to_string(H.family())}};
    if (H.family() == EnergyFamily::cosine_series) out["coefficients"] = H.coefficients();
    return out;
}

namespace {

double gamma_from(const Json& j, std::optional<double> gamma) {
    if (gamma) return *gamma;
    if (!j.contains("gamma")) throw InputError("problem has no \"gamma\" and none was given");
    return j.at("gamma").get<double>();
}

}  // namespace

FlowNetworkProblem problem_from_json(const Json& j, std::optional<double> gamma) {
    return guarded("problem", [&] {
        WeightedGraph g = graph_from_json(j.at("graph"));
        const Json& flow = j.contains("flow") ? j.at("flow") : Json{{"family", "sin"}};
        std::vector<FlowFunction> h;
        if (flow.is_array()) {
            for (const auto& item : flow) h.push_back(flow_function_from_json(item));
        } else {
            h.assign(static_cast<std::size_t>(g.edge_count()), flow_function_from_json(flow));
        }
        Vector p = j.contains("p") ? vector_from_json(j.at("p")) : Vector::Zero(g.node_count());
        return FlowNetworkProblem(std::move(g), std::move(h), std::move(p), gamma_from(j, gamma));
    });
}

Json to_json(const FlowNetworkProblem& problem) {
    const auto& h = problem.flow_functions();
    Json flow;
    if (std::all_of(h.begin(), h.end(), [&](const FlowFunction& x) { return x == h.front(); }) && !h.empty()) {
        flow = to_json(h.front());
    } else {
        flow = Json::array();
        for (const auto& x : h) flow.push_back(to_json(x));
    }
    return {{"graph", to_json(problem.graph())}, {"flow", flow}, {"p", to_json_array(problem.p())},
            {"gamma", problem.gamma()}};
}

std::optional<std::vector<std::vector<int>>> cycles_from_json(const Json& j) {
    if (!j.contains("cycles")) return std::nullopt;
    return guarded("cycles", [&] { return j.at("cycles").get<std::vector<std::vector<int>>>(); });
}

ElasticInput elastic_from_json(const Json& j, std::optional<double> gamma) {
    return guarded("elastic problem", [&] {
        WeightedGraph g = graph_from_json(j.at("graph"));
        const Json& energy = j.contains("energy") ? j.at("energy") : Json{{"family", "spacing"}};
        std::vector<ElasticEnergy> H;
        if (energy.is_array()) {
            for (const auto& item : energy) H.push_back(energy_from_json(item));
        } else {
            H.assign(static_cast<std::size_t>(g.edge_count()), energy_from_json(energy));
        }
        const char* key = j.contains("tau") ? "tau" : "p";
        Vector tau = j.contains(key) ? vector_from_json(j.at(key)) : Vector::Zero(g.node_count());
        const double gm = gamma_from(j, gamma);
        return ElasticInput{ElasticNetworkProblem(std::move(g), std::move(H)), std::move(tau), gm};
    });
}

PowerCase case_from_json(const Json& j) {
    return guarded("case", [&] {
        PowerCase c;
        c.name = j.value("name", std::string{});
        c.base_mva = j.value("base_mva", 0.0);
        for (const auto& b : j.at("buses")) c.buses.push_back({b.value("v", 1.0), b.at("p").get<double>()});
        for (const auto& br : j.at("branches")) {
            if (!br.is_array() || br.size() != 3) throw InputError("case: branches are [i, j, b]");
            c.branches.push_back({br[0].get<int>(), br[1].get<int>(), br[2].get<double>()});
        }
        return c;
    });
}

Json to_json(const PowerCase& c) {
    Json buses = Json::array();
    for (const auto& b : c.buses) buses.push_back({{"v", b.v}, {"p", b.p}});
    Json branches = Json::array();
    for (const auto& br : c.branches) branches.push_back({br.from, br.to, br.susceptance});
    return {{"name", c.name}, {"base_mva", c.base_mva}, {"buses", buses}, {"branches", branches}};
}

PowerCase load_case(const std::filesystem::path& path) { return case_from_json(read_json_file(path)); }

Json to_json(const CycleBasis& basis) {
    Json cycles = Json::array();
    for (const auto& c : basis.cycles) cycles.push_back(c.nodes());
    return {{"kind", to_string(basis.kind)}, {"cycles", cycles}};
}

Json to_json(const SolutionReport& r) {
    return {{"balance_residual", r.balance_residual},
            {"physics_residual", r.physics_residual},
            {"constraint_margin", r.constraint_margin},
            {"winding_deviation", r.winding_deviation},
            {"boundary", r.boundary},
            {"certified", r.certified()},
            {"iterations", r.iterations},
            {"final_step", r.final_step}};
}

Json to_json(const Solution& s, const CycleBasis* basis) {
    Json loops = Json::array();
    if (basis != nullptr)
        for (const auto& c : basis->cycles) loops.push_back(loop_flow(c, s.f));
    return {{"u", s.u.values},
            {"f", to_json_array(s.f)},
            {"theta", to_json_array(s.theta.values())},
            {"loop_flows", loops},
            {"report", to_json(s.report)}};
}

Json solutions_document(const FlowNetworkProblem& problem, const CycleBasis* basis,
                        const std::vector<Solution>& solutions, double rho) {
    Json sols = Json::array();
    for (const auto& s : solutions) sols.push_back(to_json(s, basis));
    Json doc = {{"gamma", problem.gamma()},
                {"rho", rho},
                {"nodes", problem.graph().node_count()},
                {"edges", problem.graph().edge_count()},
                {"count", solutions.size()},
                {"solutions", sols}};
    doc["basis"] = basis != nullptr ? to_json(*basis) : Json{{"kind", "none"}, {"cycles", Json::array()}};
    return doc;
}

std::vector<StoredSolution> stored_solutions_from_json(const Json& document) {
    return guarded("solutions", [&] {
        std::vector<StoredSolution> out;
        for (const auto& s : document.at("solutions"))
            out.push_back({s.at("u").get<IntVector>(), vector_from_json(s.at("f")), vector_from_json(s.at("theta"))});
        return out;
    });
}

std::string solutions_csv(const FlowNetworkProblem& problem, const CycleBasis* basis,
                          const std::vector<Solution>& solutions) {
    const auto& g = problem.graph();
    const int k = basis != nullptr ? basis->size() : 0;
    std::ostringstream out;
    std::vector<std::string> header;
    for (int i = 0; i < k; ++i) header.push_back("u_" + std::to_string(i));
    for (int e = 0; e < g.edge_count(); ++e) header.push_back("f_" + std::to_string(e));
    for (int v = 0; v < g.node_count(); ++v) header.push_back("theta_" + std::to_string(v));
    for (int i = 0; i < k; ++i) header.push_back("loop_" + std::to_string(i));
    for (int e = 0; e < g.edge_count(); ++e) header.push_back("margin_" + std::to_string(e));
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    for (const auto& s : solutions) {
        std::vector<std::string> row;
        for (int u : s.u.values) row.push_back(std::to_string(u));
        for (Eigen::Index e = 0; e < s.f.size(); ++e) row.push_back(format_double(s.f[e]));
        for (int v = 0; v < s.theta.size(); ++v) row.push_back(format_double(s.theta[v]));
        if (basis != nullptr)
            for (const auto& c : basis->cycles) row.push_back(format_double(loop_flow(c, s.f)));
        const Vector margins = check_feasibility(problem, s.f).margins;
        for (Eigen::Index e = 0; e < margins.size(); ++e) row.push_back(format_double(margins[e]));
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << '\n';
    }
    return out.str();
}

}  // namespace torusflow
