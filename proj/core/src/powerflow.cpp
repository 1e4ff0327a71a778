#include "torusflow/powerflow.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <regex>
#include <thread>

#include "torusflow/errors.hpp"
#include "torusflow/io.hpp"

namespace torusflow {

BalancedSupply balanced_supply(const PowerCase& c) {
    const auto n = static_cast<Eigen::Index>(c.buses.size());
    if (n == 0) throw InputError("case has no buses");
    Vector p(n);
    const double scale = c.base_mva > 0.0 ? 1.0 / c.base_mva : 1.0;
    for (Eigen::Index i = 0; i < n; ++i) p[i] = c.buses[static_cast<std::size_t>(i)].p * scale;
    const double mean = p.mean();
    const double generation = p.cwiseMax(0.0).sum();
    if (std::abs(mean) * static_cast<double>(n) > 0.01 * generation + 1e-12)
        throw InputError("injections are unbalanced by " + std::to_string(mean * static_cast<double>(n)) +
                         " p.u., more than 1% of total generation");
    p.array() -= mean;
    return {p, mean};
}

WeightedGraph case_graph(const PowerCase& c) {
    const int n = static_cast<int>(c.buses.size());
    std::vector<Edge> edges;
    edges.reserve(c.branches.size());
    for (const auto& bus : c.buses)
        if (!(bus.v > 0.0)) throw InputError("bus voltage magnitudes must be positive");
    std::map<std::pair<int, int>, std::size_t> index;
    for (const auto& br : c.branches) {
        if (br.from < 0 || br.from >= n || br.to < 0 || br.to >= n) throw InputError("branch bus index out of range");
        if (!(br.susceptance > 0.0)) throw InputError("branch susceptances must be positive");
        const double a = c.buses[static_cast<std::size_t>(br.from)].v * c.buses[static_cast<std::size_t>(br.to)].v *
                         br.susceptance;
        // parallel circuits act as one edge with the summed susceptance
        const auto key = std::minmax(br.from, br.to);
        if (const auto it = index.find({key.first, key.second}); it != index.end()) {
            edges[it->second].weight += a;
            continue;
        }
        index.emplace(std::pair{key.first, key.second}, edges.size());
        edges.push_back({br.from, br.to, a});
    }
    return {n, std::move(edges)};
}

FlowNetworkProblem case_to_problem(const PowerCase& c, double gamma) {
    if (gamma >= kPi / 2.0 - 1e-9)
        throw GammaError("gamma must be below pi/2 for the sine flow function to be certified increasing");
    return {case_graph(c), FlowFunction::sine(), balanced_supply(c).p, gamma};
}

double congestion(const Vector& f, const WeightedGraph& g) {
    double worst = 0.0;
    for (int e = 0; e < g.edge_count(); ++e) worst = std::max(worst, std::abs(f[e]) / g.edge(e).weight);
    return worst;
}

double congestion(const Solution& solution, const FlowNetworkProblem& problem) {
    return congestion(solution.f, problem.graph());
}

double ptc_upper_bracket(const FlowNetworkProblem& profile) {
    const auto& g = profile.graph();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.node_count(); ++i) {
        const double pi = std::abs(profile.p()[i]);
        if (pi == 0.0) continue;
        double reach = 0.0;
        for (int e : g.incident_edges(i)) reach += profile.capacity()[e];
        best = std::min(best, reach / pi);
    }
    return std::isfinite(best) ? best : 0.0;
}

namespace {

std::optional<Vector> flow_at_scale(const FlowNetworkProblem& profile, const CycleBasis& basis, const IntVector& u,
                                    double scale, double rho) {
    const WindingSolver solver(profile.with_supply(scale * profile.p()), basis);
    auto [f, report] = solver.iterate(u, rho);
    if (!report.feasible) return std::nullopt;
    return f;
}

}  // namespace

bool exists_at_scale(const FlowNetworkProblem& profile, const CycleBasis& basis, const IntVector& u, double scale,
                     double rho) {
    return flow_at_scale(profile, basis, u, scale, rho).has_value();
}

SweepResult ptc(const FlowNetworkProblem& profile, const CycleBasis& basis, const WindingVector& u,
                const SweepOptions& options) {
    if (!(options.tol > 0.0)) throw InputError("PTC tolerance must be positive");
    SweepResult r;
    r.u = u;
    r.exists = exists_at_scale(profile, basis, u.values, 0.0, options.rho);
    if (!r.exists) return r;

    double lo = 0.0;
    double hi = ptc_upper_bracket(profile);
    if (exists_at_scale(profile, basis, u.values, hi, options.rho)) {
        lo = hi;
    } else {
        while (hi - lo > options.tol) {
            const double mid = 0.5 * (lo + hi);
            (exists_at_scale(profile, basis, u.values, mid, options.rho) ? lo : hi) = mid;
        }
    }
    r.ptc = lo;
    r.ptc_upper = hi;

    const int samples = std::max(options.samples, 2);
    for (int k = 0; k < samples; ++k) {
        const double scale = lo * k / (samples - 1);
        if (const auto f = flow_at_scale(profile, basis, u.values, scale, options.rho)) {
            CongestionSample sample{scale, congestion(*f, profile.graph()), {}};
            for (const auto& c : basis.cycles) sample.loop_flows.push_back(loop_flow(c, *f));
            r.congestion.push_back(std::move(sample));
        }
    }
    if (const auto f = flow_at_scale(profile, basis, u.values, lo, options.rho))
        for (const auto& c : basis.cycles) r.loop_flows.push_back(loop_flow(c, *f));
    return r;
}

std::vector<SweepResult> sweep(const FlowNetworkProblem& profile, const CycleBasis& basis,
                               const SweepOptions& options) {
    if (options.jobs < 1) throw InputError("jobs must be at least 1");
    const WindingEnumerator candidates(basis, profile.gamma());
    const std::size_t count = candidates.count();
    std::vector<SweepResult> out(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (std::size_t i = cursor.fetch_add(1); i < count; i = cursor.fetch_add(1)) {
            try {
                out[i] = ptc(profile, basis, candidates[i], options);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(options.jobs), count);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

namespace {

PowerCase ring_case(const std::string& name, int n, int source, int sink) {
    PowerCase c;
    c.name = name;
    c.buses.assign(static_cast<std::size_t>(n), Bus{});
    for (int i = 0; i < n; ++i) c.branches.push_back({i, (i + 1) % n, 1.0});
    if (source >= 0) c.buses[static_cast<std::size_t>(source)].p = 1.0;
    if (sink >= 0) c.buses[static_cast<std::size_t>(sink)].p = -1.0;
    return c;
}

// s pentagons in a chain; consecutive pentagons share one node
PowerCase expo_case(int s) {
    if (s < 1 || s > 12) throw UnknownCaseError("expo(s) needs 1 <= s <= 12");
    PowerCase c;
    c.name = "expo(" + std::to_string(s) + ")";
    c.buses.assign(static_cast<std::size_t>(4 * s + 1), Bus{});
    for (int k = 0; k < s; ++k) {
        const int base = 4 * k;
        for (int j = 0; j < 4; ++j) c.branches.push_back({base + j, base + j + 1, 1.0});
        c.branches.push_back({base + 4, base, 1.0});
    }
    return c;
}

}  // namespace

const std::vector<double>& rts24_modified_injections() {
    static const std::vector<double> p = {8.40,    9.27,    -268.48, -99.14, -79.96, -68.63, 63.65, -142.41,
                                          -245.21, 95.83,   100.00,  0.00,   -193.50, -143.39, -153.00, 0.00,
                                          0.00,    0.00,    26.57,   100.00, 0.00,    0.00,    990.00,  0.00};
    return p;
}

std::vector<std::vector<int>> rts24_cycle_sequences() {
    const std::vector<std::vector<int>> one_based = {
        {2, 1, 3, 9, 4},          {5, 1, 3, 9, 8, 10},          {10, 6, 2, 4, 9, 8},
        {11, 10, 8, 9},           {12, 10, 8, 9},               {13, 11, 9, 12, 23},
        {13, 12, 23},             {16, 15, 24, 3, 9, 11, 14},   {21, 15, 24, 3, 9, 11, 14, 16, 17, 22},
        {21, 18, 17, 22},         {23, 20, 19, 16, 14, 11, 9, 12},
    };
    std::vector<std::vector<int>> out;
    for (const auto& seq : one_based) {
        std::vector<int> s;
        for (int v : seq) s.push_back(v - 1);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::string> builtin_case_names() {
    return {"ring12-sym", "ring12-asym", "pentagon", "expo(2)", "expo(3)", "rts24-mod"};
}

PowerCase builtin_case(const std::string& name, const std::filesystem::path& data_file) {
    if (name == "ring12-sym") return ring_case(name, 12, 11, 5);
    if (name == "ring12-asym") return ring_case(name, 12, 11, 2);
    if (name == "pentagon") return ring_case(name, 5, -1, -1);
    static const std::regex expo(R"(expo(?:\((\d+)\)|:?(\d+)))");
    std::smatch m;
    if (std::regex_match(name, m, expo)) return expo_case(std::stoi(m[1].matched ? m[1].str() : m[2].str()));
    if (name == "rts24-mod") {
        if (data_file.empty() || !std::filesystem::exists(data_file))
            throw MissingDataError("rts24-mod needs a case file with the RTS-24 voltages and branch susceptances");
        PowerCase c = load_case(data_file);
        const auto& p = rts24_modified_injections();
        if (c.buses.size() != p.size()) throw InputError("rts24-mod case file must have 24 buses");
        if (c.base_mva <= 0.0) c.base_mva = 100.0;
        for (std::size_t i = 0; i < p.size(); ++i) c.buses[i].p = p[i];
        c.name = name;
        return c;
    }
    throw UnknownCaseError("unknown case '" + name + "'");
}

std::vector<Branch> branches_from_matpower(const std::vector<MatpowerBranch>& records) {
    std::vector<Branch> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        if (!(r.x > 0.0)) throw InputError("MATPOWER branch reactance must be positive");
        out.push_back({r.fbus - 1, r.tbus - 1, 1.0 / r.x});
    }
    return out;
}

}  // namespace torusflow
