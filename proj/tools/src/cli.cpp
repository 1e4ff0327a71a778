#include "torusflow/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "torusflow/elastic.hpp"
#include "torusflow/errors.hpp"
#include "torusflow/flows.hpp"
#include "torusflow/io.hpp"
#include "torusflow/powerflow.hpp"

namespace torusflow::cli {

namespace {

constexpr double kDefaultCaseGamma = kPi / 2.0 - 0.01;

struct Loaded {
    FlowNetworkProblem problem;
    std::optional<std::vector<std::vector<int>>> cycles;
};

Loaded load(const RunConfig& c) {
    if (!c.input.empty()) {
        const Json j = read_json_file(c.input);
        if (j.contains("buses")) return {case_to_problem(case_from_json(j), c.gamma.value_or(kDefaultCaseGamma)), {}};
        if (j.contains("energy")) {
            auto e = elastic_from_json(j, c.gamma);
            return {e.problem.flow_problem(e.tau, e.gamma), cycles_from_json(j)};
        }
        return {problem_from_json(j, c.gamma), cycles_from_json(j)};
    }
    if (!c.case_name.empty()) {
        const PowerCase pc = builtin_case(c.case_name, c.data);
        Loaded out{case_to_problem(pc, c.gamma.value_or(kDefaultCaseGamma)), {}};
        if (c.case_name == "rts24-mod") out.cycles = rts24_cycle_sequences();
        return out;
    }
    throw InputError("no input: give a problem file or --case <name>");
}

std::optional<CycleBasis> basis_for(const Loaded& l, BasisKind kind) {
    const auto& g = l.problem.graph();
    if (g.is_acyclic()) return std::nullopt;
    if (kind == BasisKind::custom) {
        if (!l.cycles) throw InputError("--basis custom needs a \"cycles\" list in the input");
        return basis_from_node_sequences(g, *l.cycles);
    }
    return make_basis(g, kind);
}

std::string format_or(const RunConfig& c, const char* fallback) {
    const std::string f = c.format.empty() ? fallback : c.format;
    if (f != "json" && f != "csv") throw InputError("--format must be json or csv");
    return f;
}

void emit(const RunConfig& c, std::ostream& out, const std::string& text) {
    if (c.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(c.out, std::ios::binary);
    if (!file) throw InputError("cannot write " + c.out);
    file << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

template <class T>
std::string join(const std::vector<T>& items, const std::string& sep = ",") {
    std::ostringstream s;
    for (std::size_t i = 0; i < items.size(); ++i) s << (i ? sep : "") << items[i];
    return s.str();
}

}  // namespace

void RunConfig::validate() const {
    if (gamma && !(*gamma >= 0.0 && *gamma < kPi)) throw GammaError("--gamma must lie in [0, pi)");
    if (!(rho > 0.0)) throw InputError("--rho must be positive");
    if (jobs < 1) throw InputError("--jobs must be at least 1");
    if (!(tol > 0.0)) throw InputError("--tol must be positive");
    if (samples < 2) throw InputError("--samples must be at least 2");
    if (size < 1) throw InputError("--size must be positive");
}

int cmd_solve(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const Loaded l = load(c);
    const auto basis = basis_for(l, c.basis);
    const SolveOptions options{c.rho, c.basis, c.jobs};
    const auto solutions = basis ? solve_all(l.problem, *basis, options) : solve_all(l.problem, options);
    const CycleBasis* b = basis ? &*basis : nullptr;
    if (format_or(c, "json") == "csv")
        emit(c, out, solutions_csv(l.problem, b, solutions));
    else
        emit(c, out, dump(solutions_document(l.problem, b, solutions, c.rho)));
    if (solutions.empty()) {
        err << "no solution satisfies |delta_e| <= gamma\n";
        return kNoSolution;
    }
    return kFound;
}

int cmd_windings(const RunConfig& c, std::ostream& out, std::ostream&) {
    const Loaded l = load(c);
    const double gamma = l.problem.gamma();
    const auto basis = basis_for(l, c.basis);
    const bool csv = format_or(c, "json") == "csv";
    if (!basis) {
        if (csv)
            emit(c, out, "cycle,length,bound,max_winding\n# acyclic: unique-solution regime, 1 candidate\n");
        else
            emit(c, out, dump({{"acyclic", true}, {"message", "acyclic: unique-solution regime"}, {"gamma", gamma},
                               {"cycles", Json::array()}, {"candidates", 1}}));
        return kFound;
    }
    const WindingEnumerator box(*basis, gamma);
    if (csv) {
        std::ostringstream s;
        s << "cycle,length,bound,max_winding,nodes\n";
        for (int i = 0; i < basis->size(); ++i) {
            const auto& cyc = basis->cycles[static_cast<std::size_t>(i)];
            s << i << ',' << cyc.length() << ',' << box.bounds()[static_cast<std::size_t>(i)] << ','
              << max_winding_magnitude(cyc.length()) << ',' << join(cyc.nodes(), " ") << '\n';
        }
        s << "# candidates " << box.count() << '\n';
        emit(c, out, s.str());
        return kFound;
    }
    Json cycles = Json::array();
    for (int i = 0; i < basis->size(); ++i) {
        const auto& cyc = basis->cycles[static_cast<std::size_t>(i)];
        cycles.push_back({{"nodes", cyc.nodes()},
                          {"length", cyc.length()},
                          {"bound", box.bounds()[static_cast<std::size_t>(i)]},
                          {"max_winding", max_winding_magnitude(cyc.length())}});
    }
    emit(c, out, dump({{"acyclic", false}, {"basis", to_string(basis->kind)}, {"gamma", gamma}, {"cycles", cycles},
                       {"candidates", box.count()}}));
    return kFound;
}

int cmd_basis(const RunConfig& c, std::ostream& out, std::ostream&) {
    const Loaded l = load(c);
    const auto basis = basis_for(l, c.basis);
    if (!basis) {
        emit(c, out, dump({{"kind", "none"}, {"cycles", Json::array()}, {"message", "acyclic: no cycles"}}));
        return kFound;
    }
    if (format_or(c, "json") == "csv") {
        std::ostringstream s;
        s << "cycle,length,nodes,signed_vector\n";
        for (int i = 0; i < basis->size(); ++i) {
            const auto& cyc = basis->cycles[static_cast<std::size_t>(i)];
            s << i << ',' << cyc.length() << ',' << join(cyc.nodes(), " ") << ',' << join(cyc.signed_vector(), " ")
              << '\n';
        }
        emit(c, out, s.str());
        return kFound;
    }
    Json j = to_json(*basis);
    j["total_length"] = basis->total_length();
    j["signed_vectors"] = Json::array();
    for (const auto& cyc : basis->cycles) j["signed_vectors"].push_back(cyc.signed_vector());
    if (basis->kind == BasisKind::fundamental) j["tree_edges"] = basis->tree_edges;
    emit(c, out, dump(j));
    return kFound;
}

int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream&) {
    const Loaded l = load(c);
    const auto basis = basis_for(l, c.basis);
    if (!basis) throw InputError("sweep needs a graph with cycles");
    const SweepOptions options{c.tol, c.samples, c.rho, c.jobs};
    const auto results = sweep(l.problem, *basis, options);
    if (format_or(c, "csv") == "json") {
        Json rows = Json::array();
        for (const auto& r : results) {
            Json curve = Json::array();
            for (const auto& s : r.congestion)
                curve.push_back({{"P", s.scale}, {"congestion", s.congestion}, {"loop_flows", s.loop_flows}});
            rows.push_back({{"u", r.u.values},
                            {"exists", r.exists},
                            {"ptc", r.ptc},
                            {"ptc_upper", r.ptc_upper},
                            {"loop_flows", r.loop_flows},
                            {"curve", curve}});
        }
        emit(c, out, dump({{"gamma", l.problem.gamma()}, {"tol", c.tol}, {"results", rows}}));
        return kFound;
    }
    std::ostringstream s;
    for (int i = 0; i < basis->size(); ++i) s << "u_" << i << ',';
    s << "ptc,P,exists,congestion";
    for (int i = 0; i < basis->size(); ++i) s << ",loop_" << i;
    s << '\n';
    for (const auto& r : results) {
        const std::string u = join(r.u.values);
        if (!r.exists) {
            s << u << ",0,0,0,";
            for (int i = 0; i < basis->size(); ++i) s << ',';
            s << '\n';
            continue;
        }
        for (const auto& sample : r.congestion) {
            s << u << ',' << format_double(r.ptc) << ',' << format_double(sample.scale) << ",1,"
              << format_double(sample.congestion);
            for (double v : sample.loop_flows) s << ',' << format_double(v);
            s << '\n';
        }
    }
    emit(c, out, s.str());
    return kFound;
}

int cmd_decompose(const RunConfig& c, std::ostream& out, std::ostream&) {
    const Loaded l = load(c);
    const auto& g = l.problem.graph();
    std::vector<std::pair<IntVector, Vector>> flows;
    std::optional<CycleBasis> basis;
    if (!c.solutions.empty()) {
        const Json doc = read_json_file(c.solutions);
        for (auto& s : stored_solutions_from_json(doc)) flows.emplace_back(std::move(s.u), std::move(s.f));
        const auto cycles = doc.contains("basis") ? doc["basis"].value("cycles", std::vector<std::vector<int>>{})
                                                  : std::vector<std::vector<int>>{};
        if (!cycles.empty()) basis = basis_from_node_sequences(g, cycles);
    } else {
        basis = basis_for(l, c.basis);
        const SolveOptions options{c.rho, c.basis, c.jobs};
        const auto sols = basis ? solve_all(l.problem, *basis, options) : solve_all(l.problem, options);
        for (const auto& s : sols) flows.emplace_back(s.u.values, s.f);
    }
    Json rows = Json::array();
    for (const auto& [u, f] : flows) {
        if (f.size() != g.edge_count()) throw InputError("stored flow has the wrong length");
        const auto d = decompose_flow(g, f);
        Json loops = Json::array();
        if (basis)
            for (const auto& cyc : basis->cycles) loops.push_back(loop_flow(cyc, f));
        rows.push_back({{"u", u},
                        {"cutset", std::vector<double>(d.cutset.data(), d.cutset.data() + d.cutset.size())},
                        {"cyclic", std::vector<double>(d.cyclic.data(), d.cyclic.data() + d.cyclic.size())},
                        {"loop_flows", loops}});
    }
    emit(c, out, dump({{"decompositions", rows}}));
    return kFound;
}

int cmd_check(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.solutions.empty()) throw InputError("check needs --solutions <report.json>");
    const Loaded l = load(c);
    const auto& g = l.problem.graph();
    const Json doc = read_json_file(c.solutions);
    const auto stored = stored_solutions_from_json(doc);
    std::optional<CycleBasis> basis;
    const auto cycles = doc.contains("basis") ? doc["basis"].value("cycles", std::vector<std::vector<int>>{})
                                              : std::vector<std::vector<int>>{};
    if (!cycles.empty()) basis = basis_from_node_sequences(g, cycles);

    bool all_ok = true;
    Json rows = Json::array();
    for (const auto& s : stored) {
        if (s.f.size() != g.edge_count() || s.theta.size() != g.node_count())
            throw InputError("stored solution does not match the problem size");
        Json row = {{"u", s.u}};
        Json failed = Json::array();
        try {
            const PhaseVector theta(s.theta);
            const SolutionReport r = verify_solution(l.problem, s.f, theta, basis ? &*basis : nullptr,
                                                     basis ? &s.u : nullptr);
            row["report"] = to_json(r);
            if (!(r.balance_residual < kResidualTolerance)) failed.push_back("balance");
            if (!(r.physics_residual < kResidualTolerance)) failed.push_back("physics");
            if (r.constraint_margin < -r.margin_tolerance) failed.push_back("constraint");
            if (!r.winding_matches) failed.push_back("winding");
        } catch (const PuncturedTorusError& e) {
            failed.push_back("punctured");
            row["error"] = e.what();
        }
        row["failed"] = failed;
        row["ok"] = failed.empty();
        if (!failed.empty()) {
            all_ok = false;
            err << "solution u=[" << join(s.u) << "] failed:";
            for (const auto& f : failed) err << ' ' << f.get<std::string>();
            err << '\n';
        }
        rows.push_back(row);
    }
    emit(c, out, dump({{"ok", all_ok}, {"checked", stored.size()}, {"results", rows}}));
    return all_ok ? kFound : kVerificationFailure;
}

int cmd_gen(const RunConfig& c, std::ostream& out, std::ostream&) {
    if (!c.case_name.empty()) {
        emit(c, out, dump(to_json(builtin_case(c.case_name, c.data))));
        return kFound;
    }
    const int n = c.size;
    std::vector<Edge> edges;
    std::mt19937_64 rng(c.seed);
    if (c.family == "ring") {
        if (n < 3) throw InputError("ring needs --size >= 3");
        for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
    } else if (c.family == "complete") {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
    } else if (c.family == "tree") {
        for (int i = 1; i < n; ++i)
            edges.push_back({static_cast<int>(std::uniform_int_distribution<int>(0, i - 1)(rng)), i, 1.0});
    } else if (c.family == "grid") {
        // size x size lattice
        for (int r = 0; r < n; ++r)
            for (int k = 0; k < n; ++k) {
                const int v = r * n + k;
                if (k + 1 < n) edges.push_back({v, v + 1, 1.0});
                if (r + 1 < n) edges.push_back({v, v + n, 1.0});
            }
    } else {
        throw InputError("--family must be ring, complete, tree or grid");
    }
    const int nodes = c.family == "grid" ? n * n : n;
    const WeightedGraph g(nodes, edges);
    std::uniform_real_distribution<double> draw(-c.load, c.load);
    Vector p(nodes);
    for (int i = 0; i < nodes; ++i) p[i] = draw(rng);
    p.array() -= p.mean();
    const FlowNetworkProblem problem(g, FlowFunction::sine(), p, c.gamma.value_or(1.4));
    emit(c, out, dump(to_json(problem)));
    return kFound;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
    try {
        c.validate();
        if (c.command == "solve") return cmd_solve(c, out, err);
        if (c.command == "windings") return cmd_windings(c, out, err);
        if (c.command == "basis") return cmd_basis(c, out, err);
        if (c.command == "sweep") return cmd_sweep(c, out, err);
        if (c.command == "decompose") return cmd_decompose(c, out, err);
        if (c.command == "check") return cmd_check(c, out, err);
        if (c.command == "gen") return cmd_gen(c, out, err);
        throw InputError("unknown command '" + c.command + "'");
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInternalError;
    }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Find every solution of flow and elastic network problems on the n-torus"};
    app.require_subcommand(1);
    RunConfig config;
    std::string basis = "fundamental";
    double gamma = 0.0;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"solve", "all solutions with certificates"},
        {"windings", "candidate winding vectors per basis cycle"},
        {"basis", "print the cycle basis"},
        {"sweep", "power transmission capacity per winding vector"},
        {"decompose", "cutset/cycle split of solution flows"},
        {"check", "re-verify a solutions report"},
        {"gen", "write a built-in case or a random problem"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("input", config.input, "problem, elastic problem or case JSON");
        sub->add_option("--case", config.case_name, "built-in case (ring12-sym, ring12-asym, pentagon, expo(s), rts24-mod)");
        sub->add_option("--data", config.data, "case file backing rts24-mod");
        sub->add_option("--gamma", gamma, "angle bound in [0, pi)");
        sub->add_option("--rho", config.rho, "step tolerance of the projection iteration");
        sub->add_option("--basis", basis, "fundamental, minimum or custom")
            ->check(CLI::IsMember({"fundamental", "minimum", "custom"}));
        sub->add_option("--format", config.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--jobs", config.jobs, "worker threads");
        sub->add_option("--out", config.out, "output file (stdout by default)");
        sub->add_option("--seed", config.seed, "random seed for gen");
        if (name == "check" || name == "decompose")
            sub->add_option("--solutions", config.solutions, "solutions report from solve");
        if (name == "sweep") {
            sub->add_option("--tol", config.tol, "bisection tolerance on the scale");
            sub->add_option("--samples", config.samples, "congestion samples per winding vector");
        }
        if (name == "gen") {
            sub->add_option("--family", config.family, "ring, complete, tree or grid");
            sub->add_option("--size", config.size, "node count (grid: side length)");
            sub->add_option("--load", config.load, "injection magnitude bound");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kFound : kInputError;
    }
    for (auto* sub : app.get_subcommands()) {
        config.command = sub->get_name();
        if (sub->count("--gamma") > 0) config.gamma = gamma;
    }
    try {
        config.basis = basis_kind_from_string(basis);
    } catch (const std::exception& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    }
    return run(config, out, err);
}

}  // namespace torusflow::cli
