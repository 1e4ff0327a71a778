#include "torusflow/flows.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "torusflow/errors.hpp"
#include "torusflow/projection.hpp"

namespace torusflow {

namespace {

std::atomic<std::size_t> g_runs{0};
std::atomic<std::size_t> g_pairs{0};
std::atomic<std::size_t> g_violations{0};

constexpr double kContractionSlack = 1e-12;
constexpr double kBalanceTolerance = 1e-10;
constexpr int kBudgetMargin = 10;

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

FlowNetworkProblem::FlowNetworkProblem(WeightedGraph graph, std::vector<FlowFunction> flow_functions, Vector p,
                                       double gamma)
    : graph_(std::move(graph)), flows_(std::move(flow_functions)), p_(std::move(p)), gamma_(gamma) {
    const int m = graph_.edge_count();
    if (static_cast<int>(flows_.size()) != m) throw InputError("need exactly one flow function per edge");
    if (p_.size() != graph_.node_count()) throw InputError("supply vector length differs from the node count");
    if (!p_.allFinite()) throw InputError("supply vector has non-finite entries");
    if (std::abs(p_.sum()) > kBalanceTolerance)
        throw InputError("supply vector is not balanced (sum = " + std::to_string(p_.sum()) + ")");
    if (!(gamma_ >= 0.0 && gamma_ < kPi)) throw GammaError("gamma must lie in [0, pi)");

    std::vector<SlopeBounds> bounds;
    bounds.reserve(flows_.size());
    for (const auto& h : flows_) bounds.push_back(h.slope_bounds(gamma_));
    const bool all_decreasing =
        m > 0 && std::all_of(bounds.begin(), bounds.end(), [](const SlopeBounds& b) { return b.lmax < -kMinimumSlope; });
    sign_ = all_decreasing ? -1.0 : 1.0;

    const Vector a = graph_.weights();
    capacity_.resize(m);
    lmin_.resize(m);
    lmax_.resize(m);
    extended_.reserve(flows_.size());
    for (int e = 0; e < m; ++e) {
        const FlowFunction h = all_decreasing ? flows_[static_cast<std::size_t>(e)].negated()
                                              : flows_[static_cast<std::size_t>(e)];
        try {
            extended_.emplace_back(h, gamma_);
        } catch (const MonotonicityError& err) {
            throw MonotonicityError("edge " + std::to_string(e) + ": " + err.what());
        }
        const auto& ext = extended_.back();
        lmin_[e] = ext.bounds().lmin;
        lmax_[e] = ext.bounds().lmax;
        capacity_[e] = a[e] * std::abs(ext.capacity());
        rate_ = std::max(rate_, 1.0 - lmin_[e] / lmax_[e]);
    }
}

FlowNetworkProblem::FlowNetworkProblem(WeightedGraph graph, const FlowFunction& h, Vector p, double gamma)
    : FlowNetworkProblem(graph, std::vector<FlowFunction>(static_cast<std::size_t>(graph.edge_count()), h),
                         std::move(p), gamma) {}

FlowNetworkProblem FlowNetworkProblem::with_supply(Vector p) const {
    FlowNetworkProblem out = *this;
    if (p.size() != graph_.node_count()) throw InputError("supply vector length differs from the node count");
    if (std::abs(p.sum()) > kBalanceTolerance) throw InputError("supply vector is not balanced");
    out.p_ = std::move(p);
    return out;
}

bool SolutionReport::certified() const noexcept {
    return balance_residual < kResidualTolerance && physics_residual < kResidualTolerance &&
           constraint_margin >= -margin_tolerance && winding_matches;
}

bool IterationReport::contraction_holds() const {
    for (std::size_t k = 1; k < weighted_steps.size(); ++k)
        if (weighted_steps[k] > rate * weighted_steps[k - 1] + kContractionSlack) return false;
    return true;
}

ContractionStatistics contraction_statistics() {
    return {g_runs.load(), g_pairs.load(), g_violations.load()};
}

FeasibilityCheck check_feasibility(const FlowNetworkProblem& problem, const Vector& f) {
    if (f.size() != problem.graph().edge_count()) throw InputError("flow vector length differs from the edge count");
    FeasibilityCheck out;
    out.margins = problem.capacity() - f.cwiseAbs();
    for (int e = 0; e < f.size(); ++e) {
        if (out.margins[e] < -kFeasibilitySlack) {
            out.feasible = false;
            out.infeasible_edges.push_back(e);
        } else if (out.margins[e] < kFeasibilitySlack) {
            out.boundary = true;
        }
    }
    return out;
}

SolutionReport verify_solution(const FlowNetworkProblem& problem, const Vector& f, const PhaseVector& theta,
                               const CycleBasis* basis, const IntVector* u) {
    const auto& g = problem.graph();
    if (f.size() != g.edge_count()) throw InputError("flow vector length differs from the edge count");
    SolutionReport r;
    r.balance_residual = inf_norm(incidence_matrix(g) * f - problem.p());
    const Vector delta = edge_differences(g, theta).values;
    double worst_angle = 0.0;
    for (int e = 0; e < g.edge_count(); ++e) {
        const double a = g.edge(e).weight;
        const auto& h = problem.flow_functions()[static_cast<std::size_t>(e)];
        r.physics_residual = std::max(r.physics_residual, std::abs(f[e] - a * h.value(delta[e])));
        worst_angle = std::max(worst_angle, std::abs(delta[e]));
        // flows inside the feasibility slack may overshoot gamma by slack / (a h'(gamma))
        const double slope = std::abs(problem.extended()[static_cast<std::size_t>(e)].base().derivative(problem.gamma()));
        if (std::abs(f[e]) > problem.capacity()[e] - kFeasibilitySlack && slope > 0.0) {
            r.boundary = true;
            r.margin_tolerance = std::max(r.margin_tolerance, 1e-9 + 2.0 * kFeasibilitySlack / (a * slope));
        }
    }
    r.constraint_margin = problem.gamma() - worst_angle;
    if (basis != nullptr && u != nullptr) {
        if (static_cast<int>(u->size()) != basis->size()) throw InputError("winding vector length differs from the basis");
        for (int i = 0; i < basis->size(); ++i) {
            const double raw = winding_number_raw(basis->cycles[static_cast<std::size_t>(i)], theta);
            const double dev = std::abs(raw - (*u)[static_cast<std::size_t>(i)]);
            r.winding_deviation = std::max(r.winding_deviation, dev);
            if (dev > 1e-6) r.winding_matches = false;
        }
    }
    return r;
}

std::optional<Solution> acyclic_solve(const FlowNetworkProblem& problem) {
    const auto& g = problem.graph();
    if (!g.is_acyclic()) throw CyclicGraphError("graph has cycles; use solve_all");
    const Matrix b = incidence_matrix(g);
    const Vector a = g.weights();
    const Vector f = a.asDiagonal() * (b.transpose() * (laplacian_pinv(g) * problem.p()));
    if (!check_feasibility(problem, f).feasible) return std::nullopt;

    Vector y(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e)
        y[e] = problem.extended()[static_cast<std::size_t>(e)].inverse(problem.orientation() * f[e] / a[e]);
    const Vector x = pinv_with_ones_kernel(b * b.transpose()) * (b * y);

    Solution s;
    s.f = f;
    s.theta = PhaseVector(x).canonical();
    s.report = verify_solution(problem, s.f, s.theta);
    return s;
}

WindingSolver::WindingSolver(const FlowNetworkProblem& problem, const CycleBasis& basis)
    : problem_(problem), geometry_(problem.graph(), basis), weights_(problem.graph().weights()),
      internal_p_(problem.orientation() * problem.p()) {
    const auto& g = problem_.graph();
    const Vector d = problem_.lmin();
    const Vector da = d.cwiseProduct(weights_);
    step_matrix_ = cycle_projection(g, d).matrix * da.asDiagonal();
    const Matrix& b = geometry_.incidence();
    recover_matrix_ = laplacian_pinv(g) * b * weights_.asDiagonal();
    sqrt_inv_weight_ = da.cwiseSqrt().cwiseInverse();
    kappa_ = std::sqrt(static_cast<double>(g.edge_count()) * da.maxCoeff() / da.minCoeff());
}

Vector WindingSolver::cutset_flow() const {
    const Matrix& b = geometry_.incidence();
    return problem_.orientation() * (weights_.asDiagonal() * (b.transpose() * (laplacian_pinv(problem_.graph()) * internal_p_)));
}

Vector WindingSolver::edge_angles(const Vector& f_internal) const {
    Vector y(f_internal.size());
    for (Eigen::Index e = 0; e < f_internal.size(); ++e)
        y[e] = problem_.extended()[static_cast<std::size_t>(e)].inverse(f_internal[e] / weights_[e]);
    return y;
}

Vector WindingSolver::internal_map(const IntVector& u, const Vector& f_internal) const {
    return f_internal - step_matrix_ * (edge_angles(f_internal) - geometry_.offset(u));
}

Vector WindingSolver::map(const IntVector& u, const Vector& f) const {
    if (f.size() != problem_.graph().edge_count()) throw InputError("flow vector length differs from the edge count");
    if (inf_norm(geometry_.incidence() * f - problem_.p()) >= kResidualTolerance)
        throw BalanceError("flow does not meet the supply vector (B f != p)");
    const double s = problem_.orientation();
    return s * internal_map(u, s * f);
}

std::pair<Vector, IterationReport> WindingSolver::iterate(const IntVector& u, double rho, const Vector* start) const {
    if (!(rho > 0.0)) throw InputError("rho must be positive");
    const double s = problem_.orientation();
    IterationReport report;
    report.rate = problem_.contraction_rate();

    Vector f = start != nullptr ? Vector(s * *start) : Vector(s * cutset_flow());
    if (start != nullptr && inf_norm(geometry_.incidence() * f - internal_p_) >= kResidualTolerance)
        throw BalanceError("starting flow does not meet the supply vector");
    Vector next = internal_map(u, f);
    const double first_step = inf_norm(next - f);

    // stop once the a-posteriori error bound rate/(1-rate) * kappa * step is below rho too
    const double tol =
        report.rate > 0.0 ? rho * std::min(1.0, (1.0 - report.rate) / (report.rate * kappa_)) : rho;
    int budget = kBudgetMargin;
    if (first_step >= tol && report.rate > 0.0) {
        const double need = std::log(tol / (kappa_ * first_step)) / std::log(report.rate);
        budget += static_cast<int>(std::ceil(std::max(0.0, need)));
    } else if (first_step >= tol) {
        budget += 1;
    }
    report.budget = budget;

    for (int k = 1;; ++k) {
        const Vector diff = next - f;
        const double step = inf_norm(diff);
        report.weighted_steps.push_back(diff.cwiseProduct(sqrt_inv_weight_).norm());
        f = std::move(next);
        report.iterations = k;
        report.final_step = step;
        if (step < tol) break;
        if (k >= 2 * budget)
            throw ConvergenceBudgetError("projection iteration exceeded twice its analytic budget of " +
                                         std::to_string(budget) + " steps");
        next = internal_map(u, f);
    }

    g_runs.fetch_add(1);
    if (report.weighted_steps.size() > 1) g_pairs.fetch_add(report.weighted_steps.size() - 1);
    if (!report.contraction_holds()) g_violations.fetch_add(1);

    Vector external = s * f;
    const auto feas = check_feasibility(problem_, external);
    report.feasible = feas.feasible;
    report.infeasible_edges = feas.infeasible_edges;
    return {std::move(external), std::move(report)};
}

PhaseVector WindingSolver::recover(const IntVector& u, const Vector& f) const {
    const auto feas = check_feasibility(problem_, f);
    if (!feas.feasible)
        throw FeasibilityError("flow exceeds capacity on edge " + std::to_string(feas.infeasible_edges.front()));
    const Vector y = edge_angles(problem_.orientation() * f) - geometry_.offset(u);
    const Vector x = recover_matrix_ * y;
    return geometry_.polytope_to_torus(x, u).canonical();
}

std::optional<Solution> WindingSolver::solve(const WindingVector& u, double rho) const {
    auto [f, report] = iterate(u.values, rho);
    if (!report.feasible) return std::nullopt;
    Solution s;
    s.theta = recover(u.values, f);
    s.f = std::move(f);
    s.u = u;
    s.report = verify_solution(problem_, s.f, s.theta, &basis(), &u.values);
    s.report.iterations = report.iterations;
    s.report.final_step = report.final_step;
    if (!s.report.certified())
        throw Error("solution for a feasible winding vector failed certification (balance " +
                    std::to_string(s.report.balance_residual) + ", physics " +
                    std::to_string(s.report.physics_residual) + ", margin " +
                    std::to_string(s.report.constraint_margin) + ")");
    return s;
}

Vector winding_fixed_point_map(const FlowNetworkProblem& problem, const CycleBasis& basis, const IntVector& u,
                               const Vector& f) {
    return WindingSolver(problem, basis).map(u, f);
}

std::pair<Vector, IterationReport> projection_iteration(const FlowNetworkProblem& problem, const CycleBasis& basis,
                                                        const IntVector& u, double rho) {
    return WindingSolver(problem, basis).iterate(u, rho);
}

PhaseVector recover_phases(const FlowNetworkProblem& problem, const CycleBasis& basis, const IntVector& u,
                           const Vector& f) {
    return WindingSolver(problem, basis).recover(u, f);
}

std::vector<Solution> solve_all(const FlowNetworkProblem& problem, const SolveOptions& options) {
    if (problem.graph().is_acyclic()) {
        auto s = acyclic_solve(problem);
        return s ? std::vector<Solution>{std::move(*s)} : std::vector<Solution>{};
    }
    return solve_all(problem, make_basis(problem.graph(), options.basis), options);
}

std::vector<Solution> solve_all(const FlowNetworkProblem& problem, const CycleBasis& basis,
                                const SolveOptions& options) {
    if (problem.graph().is_acyclic()) return solve_all(problem, options);
    if (options.jobs < 1) throw InputError("jobs must be at least 1");
    const WindingSolver solver(problem, basis);
    const WindingEnumerator candidates(basis, problem.gamma());
    const std::size_t count = candidates.count();

    std::vector<std::optional<Solution>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (std::size_t i = cursor.fetch_add(1); i < count; i = cursor.fetch_add(1)) {
            try {
                slots[i] = solver.solve(candidates[i], options.rho);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(options.jobs), count));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    std::vector<Solution> out;
    for (std::size_t i = 0; i < count; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        if (slots[i]) out.push_back(std::move(*slots[i]));
    }
    return out;
}

FlowDecomposition decompose_flow(const WeightedGraph& g, const Vector& f) {
    if (f.size() != g.edge_count()) throw InputError("flow vector length differs from the edge count");
    const Matrix b = incidence_matrix(g);
    FlowDecomposition d;
    d.cutset = g.weights().asDiagonal() * (b.transpose() * (laplacian_pinv(g) * (b * f)));
    d.cyclic = f - d.cutset;
    return d;
}

double loop_flow(const Cycle& cycle, const Vector& f) {
    const auto& v = cycle.signed_vector();
    if (static_cast<Eigen::Index>(v.size()) != f.size()) throw InputError("flow vector length differs from the edge count");
    double s = 0.0;
    for (std::size_t e = 0; e < v.size(); ++e) s += v[e] * f[static_cast<Eigen::Index>(e)];
    return s;
}

}  // namespace torusflow
