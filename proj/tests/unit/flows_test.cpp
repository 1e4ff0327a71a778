#include <gtest/gtest.h>

#include <random>

#include "graphs.hpp"
#include "torusflow/errors.hpp"
#include "torusflow/flows.hpp"
#include "torusflow/projection.hpp"

using namespace torusflow;

namespace {

const double kSplayFlow = std::sin(2.0 * kPi / 5.0);

FlowNetworkProblem pentagon_problem(double gamma = 1.4) {
    return {testsupport::pentagon(), FlowFunction::sine(), Vector::Zero(5), gamma};
}

Vector random_balanced(std::mt19937_64& rng, int n, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Vector p(n);
    for (auto& x : p) x = u(rng);
    p.array() -= p.mean();
    return p;
}

/// Independent check of the three problem equations.
void expect_solves(const FlowNetworkProblem& problem, const Vector& f, const PhaseVector& theta, double tol) {
    const auto& g = problem.graph();
    EXPECT_LT((incidence_matrix(g) * f - problem.p()).cwiseAbs().maxCoeff(), tol);
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& ed = g.edge(e);
        const double d = wrap_angle(theta[ed.to] - theta[ed.from]);
        EXPECT_NEAR(f[e], ed.weight * problem.flow_functions()[e].value(d), tol);
        EXPECT_LE(std::abs(d), problem.gamma() + tol);
    }
}

}  // namespace

TEST(Problem, ValidatesInput) {
    const auto g = testsupport::triangle();
    Vector p(3);
    p << 1.0, 0.0, 0.0;
    EXPECT_THROW(FlowNetworkProblem(g, FlowFunction::sine(), p, 1.0), InputError);
    EXPECT_THROW(FlowNetworkProblem(g, FlowFunction::sine(), Vector::Zero(2), 1.0), InputError);
    EXPECT_THROW(FlowNetworkProblem(g, FlowFunction::sine(), Vector::Zero(3), 3.5), GammaError);
    EXPECT_THROW(FlowNetworkProblem(g, FlowFunction::sine(), Vector::Zero(3), kPi / 2.0), MonotonicityError);
    EXPECT_THROW(FlowNetworkProblem(g, std::vector<FlowFunction>{FlowFunction::sine(), FlowFunction::sine().negated(),
                                                                 FlowFunction::sine()},
                                    Vector::Zero(3), 1.0),
                 MonotonicityError);
}

TEST(Problem, ContractionRate) {
    const auto problem = pentagon_problem(1.4);
    EXPECT_NEAR(problem.contraction_rate(), 1.0 - std::cos(1.4), 1e-15);
    EXPECT_NEAR(problem.capacity()[0], std::sin(1.4), 1e-15);
    const FlowNetworkProblem lin(testsupport::pentagon(), FlowFunction::linear(), Vector::Zero(5), 2.5);
    EXPECT_EQ(lin.contraction_rate(), 0.0);
}

TEST(AcyclicSolve, PathExamples) {
    const auto g = testsupport::path(2);
    Vector p(2);
    p << 0.5, -0.5;
    const auto s = acyclic_solve(FlowNetworkProblem(g, FlowFunction::sine(), p, kPi / 3.0));
    ASSERT_TRUE(s.has_value());
    // the edge points 0 -> 1 and node 0 is the source, so the flow runs against the orientation
    EXPECT_NEAR(s->f[0], -0.5, 1e-15);
    EXPECT_NEAR(ccw_difference(s->theta[1], s->theta[0]), -kPi / 6.0, 1e-14);
    EXPECT_TRUE(s->report.certified());

    p << 0.9, -0.9;
    EXPECT_FALSE(acyclic_solve(FlowNetworkProblem(g, FlowFunction::sine(), p, kPi / 3.0)).has_value());

    const auto zero = acyclic_solve(FlowNetworkProblem(g, FlowFunction::sine(), Vector::Zero(2), 1.0));
    ASSERT_TRUE(zero.has_value());
    EXPECT_EQ(zero->f[0], 0.0);
    EXPECT_LT(zero->theta.values().cwiseAbs().maxCoeff(), 1e-15);
}

TEST(AcyclicSolve, RandomTreesAndThreshold) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 20; ++t) {
        const int n = 2 + static_cast<int>(rng() % 9);
        const auto g = testsupport::random_tree(rng, n);
        const Vector p = random_balanced(rng, n, 1.0);
        const FlowNetworkProblem base(g, FlowFunction::sine(), p, 1.3);
        const Vector cut = incidence_matrix(g).transpose() * laplacian_pinv(g) * p;
        const double threshold = std::sin(1.3) / cut.cwiseAbs().maxCoeff();
        for (double scale : {0.5 * threshold, 0.999 * threshold, 1.001 * threshold, 2.0 * threshold}) {
            const auto problem = base.with_supply(scale * p);
            const auto s = acyclic_solve(problem);
            EXPECT_EQ(s.has_value(), scale < threshold);
            if (s) expect_solves(problem, s->f, s->theta, 1e-9);
        }
    }
    EXPECT_THROW((void)acyclic_solve(pentagon_problem()), CyclicGraphError);
}

TEST(FixedPointMap, Examples) {
    const auto problem = pentagon_problem();
    const auto basis = fundamental_cycle_basis(problem.graph());
    EXPECT_LT(winding_fixed_point_map(problem, basis, {0}, Vector::Zero(5)).cwiseAbs().maxCoeff(), 1e-15);
    const Vector splay = Vector::Constant(5, kSplayFlow);
    EXPECT_LT((winding_fixed_point_map(problem, basis, {1}, splay) - splay).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_THROW((void)winding_fixed_point_map(problem, basis, {0}, Vector::Unit(5, 0)), BalanceError);
}

TEST(FixedPointMap, IdentityOnTrees) {
    std::mt19937_64 rng(4);
    const auto g = testsupport::random_tree(rng, 6);
    const FlowNetworkProblem problem(g, FlowFunction::sine(), Vector::Zero(6), 1.0);
    CycleBasis empty;
    empty.node_count = 6;
    empty.edge_count = 5;
    const WindingSolver solver(problem, empty);
    const Vector f = solver.cutset_flow();
    EXPECT_LT((solver.map({}, f) - f).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(FixedPointMap, PreservesBalance) {
    std::mt19937_64 rng(19);
    for (int t = 0; t < 20; ++t) {
        const auto g = testsupport::random_connected(rng, 6 + static_cast<int>(rng() % 5), 3);
        const Vector p = random_balanced(rng, g.node_count(), 0.3);
        const FlowNetworkProblem problem(g, FlowFunction::sine(), p, 1.2);
        const WindingSolver solver(problem, fundamental_cycle_basis(g));
        const Matrix proj = cycle_projection(g, Vector::Ones(g.edge_count())).matrix;
        const Vector f = solver.cutset_flow() + proj * Vector::Random(g.edge_count());
        IntVector u(static_cast<std::size_t>(g.cycle_rank()), 0);
        u[0] = 1;
        const Vector tf = solver.map(u, f);
        EXPECT_LT((incidence_matrix(g) * tf - p).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(ProjectionIteration, PentagonExamples) {
    const auto problem = pentagon_problem();
    const auto basis = fundamental_cycle_basis(problem.graph());
    const auto [f0, r0] = projection_iteration(problem, basis, {0});
    EXPECT_LT(f0.cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_TRUE(r0.feasible);

    const auto [f1, r1] = projection_iteration(problem, basis, {1});
    EXPECT_LT((f1 - Vector::Constant(5, kSplayFlow)).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_TRUE(r1.feasible);
    EXPECT_TRUE(r1.contraction_holds());
    EXPECT_LE(r1.iterations, r1.budget);
    EXPECT_LT(r1.final_step, 1e-10);

    const auto [f3, r3] = projection_iteration(problem, basis, {3});
    EXPECT_FALSE(r3.feasible);
    EXPECT_EQ(r3.infeasible_edges.size(), 5U);
    EXPECT_TRUE(r3.contraction_holds());
}

TEST(ProjectionIteration, UniqueFixedPointFromRandomStarts) {
    std::mt19937_64 rng(31);
    const auto g = testsupport::pentagon_chain(2);
    const Vector p = random_balanced(rng, g.node_count(), 0.1);
    const FlowNetworkProblem problem(g, FlowFunction::sine(), p, 1.4);
    const WindingSolver solver(problem, fundamental_cycle_basis(g));
    const Matrix proj = cycle_projection(g, Vector::Ones(g.edge_count())).matrix;
    const IntVector u{1, -1};
    const Vector reference = solver.iterate(u).first;
    for (int t = 0; t < 20; ++t) {
        const Vector start = solver.cutset_flow() + 2.0 * proj * Vector::Random(g.edge_count());
        const auto [f, report] = solver.iterate(u, kDefaultRho, &start);
        EXPECT_LT((f - reference).cwiseAbs().maxCoeff(), 1e-7);
        EXPECT_TRUE(report.contraction_holds());
    }
}

TEST(Feasibility, SplayFlowExamples) {
    const Vector splay = Vector::Constant(5, kSplayFlow);
    EXPECT_TRUE(check_feasibility(pentagon_problem(1.4), splay).feasible);
    const auto tight = check_feasibility(pentagon_problem(1.2), splay);
    EXPECT_FALSE(tight.feasible);
    EXPECT_EQ(tight.infeasible_edges, (std::vector<int>{0, 1, 2, 3, 4}));
    EXPECT_NEAR(tight.margins[0], std::sin(1.2) - kSplayFlow, 1e-15);
    EXPECT_TRUE(check_feasibility(pentagon_problem(0.1), Vector::Zero(5)).feasible);
}

TEST(RecoverPhases, PentagonSplayAndZero) {
    const auto problem = pentagon_problem();
    const auto basis = fundamental_cycle_basis(problem.graph());
    const auto zero = recover_phases(problem, basis, {0}, Vector::Zero(5));
    EXPECT_LT(zero.values().cwiseAbs().maxCoeff(), 1e-15);
    const auto splay = recover_phases(problem, basis, {1}, Vector::Constant(5, kSplayFlow));
    Vector expected(5);
    for (int i = 0; i < 5; ++i) expected[i] = 2.0 * kPi * i / 5.0;
    EXPECT_LT(distance_modulo_rotation(splay, PhaseVector(expected)), 1e-12);
    EXPECT_EQ(splay[0], 0.0);
    EXPECT_THROW((void)recover_phases(pentagon_problem(1.2), basis, {1}, Vector::Constant(5, kSplayFlow)),
                 FeasibilityError);
}

TEST(RecoverPhases, AgreesWithAcyclicSolve) {
    std::mt19937_64 rng(37);
    const auto g = testsupport::random_tree(rng, 7);
    const FlowNetworkProblem problem(g, FlowFunction::sine(), random_balanced(rng, 7, 0.3), 1.2);
    const auto s = acyclic_solve(problem);
    ASSERT_TRUE(s.has_value());
    CycleBasis empty;
    empty.node_count = 7;
    empty.edge_count = 6;
    EXPECT_LT(distance_modulo_rotation(recover_phases(problem, empty, {}, s->f), s->theta), 1e-12);
}

TEST(SolveAll, PentagonHasThreeSolutions) {
    const auto problem = pentagon_problem();
    const auto solutions = solve_all(problem);
    ASSERT_EQ(solutions.size(), 3U);
    for (int k = 0; k < 3; ++k) {
        EXPECT_EQ(solutions[k].u.values, (IntVector{k - 1}));
        EXPECT_TRUE(solutions[k].report.certified());
        expect_solves(problem, solutions[k].f, solutions[k].theta, 1e-8);
    }
    // loop flows strictly increase with the winding number on a single cycle
    const Cycle c = make_basis(problem.graph(), BasisKind::fundamental).cycles[0];
    EXPECT_LT(loop_flow(c, solutions[0].f), loop_flow(c, solutions[1].f));
    EXPECT_LT(loop_flow(c, solutions[1].f), loop_flow(c, solutions[2].f));
    EXPECT_NEAR(loop_flow(c, solutions[2].f), 5.0 * kSplayFlow, 1e-9);
}

TEST(SolveAll, ExpoFamilyCountsAndBijection) {
    for (int s = 1; s <= 3; ++s) {
        const auto g = testsupport::pentagon_chain(s);
        const FlowNetworkProblem problem(g, FlowFunction::sine(), Vector::Zero(g.node_count()), 1.4);
        const auto solutions = solve_all(problem, {.jobs = 3});
        EXPECT_EQ(solutions.size(), static_cast<std::size_t>(std::pow(3, s)));
        for (std::size_t i = 0; i < solutions.size(); ++i)
            for (std::size_t j = i + 1; j < solutions.size(); ++j) {
                EXPECT_NE(solutions[i].u, solutions[j].u);
                EXPECT_GT((solutions[i].f - solutions[j].f).cwiseAbs().maxCoeff(), 1e-6);
                EXPECT_LT(solutions[i].u.values, solutions[j].u.values);
            }
    }
}

TEST(SolveAll, MinimumBasisAgreesWithFundamental) {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 5; ++t) {
        const auto g = testsupport::random_connected(rng, 7, 3, false);
        const FlowNetworkProblem problem(g, FlowFunction::sine(), random_balanced(rng, 7, 0.2), 1.45);
        auto a = solve_all(problem, {.basis = BasisKind::fundamental});
        auto b = solve_all(problem, {.basis = BasisKind::minimum});
        ASSERT_EQ(a.size(), b.size());
        // same flows, possibly in another order
        for (const auto& sa : a) {
            const bool found = std::any_of(b.begin(), b.end(), [&](const Solution& sb) {
                return (sa.f - sb.f).cwiseAbs().maxCoeff() < 1e-8;
            });
            EXPECT_TRUE(found);
        }
    }
}

TEST(SolveAll, CompleteGraphHasAtMostOne) {
    std::mt19937_64 rng(47);
    for (int t = 0; t < 10; ++t) {
        const auto g = testsupport::complete(4);
        const FlowNetworkProblem problem(g, FlowFunction::sine(), random_balanced(rng, 4, 0.5), 1.0);
        EXPECT_LE(solve_all(problem).size(), 1U);
    }
}

TEST(SolveAll, TreesDelegate) {
    const auto g = testsupport::path(4);
    Vector p(4);
    p << 0.2, 0.1, -0.1, -0.2;
    const FlowNetworkProblem problem(g, FlowFunction::sine(), p, 1.0);
    const auto solutions = solve_all(problem);
    ASSERT_EQ(solutions.size(), 1U);
    EXPECT_TRUE(solutions[0].u.values.empty());
    expect_solves(problem, solutions[0].f, solutions[0].theta, 1e-12);
}

TEST(SolveAll, ParallelMatchesSerial) {
    const auto g = testsupport::pentagon_chain(3);
    std::mt19937_64 rng(53);
    const FlowNetworkProblem problem(g, FlowFunction::sine(), random_balanced(rng, g.node_count(), 0.1), 1.4);
    const auto a = solve_all(problem, {.jobs = 1});
    const auto b = solve_all(problem, {.jobs = 8});
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].u, b[i].u);
        EXPECT_EQ(a[i].f, b[i].f);
        EXPECT_EQ(a[i].theta.values(), b[i].theta.values());
    }
    EXPECT_THROW((void)solve_all(problem, {.jobs = 0}), InputError);
}

TEST(SolveAll, DecreasingFlowFunctionsAreNegated) {
    std::mt19937_64 rng(59);
    const auto g = testsupport::pentagon();
    const Vector p = random_balanced(rng, 5, 0.2);
    const FlowNetworkProblem problem(g, FlowFunction::sine().negated(), p, 1.4);
    EXPECT_EQ(problem.orientation(), -1.0);
    const auto solutions = solve_all(problem);
    // (f, theta) solves the negated problem iff (-f, theta) solves the sin problem with supply -p
    const auto mirrored = solve_all(FlowNetworkProblem(g, FlowFunction::sine(), -p, 1.4));
    ASSERT_EQ(solutions.size(), mirrored.size());
    ASSERT_FALSE(solutions.empty());
    for (std::size_t i = 0; i < solutions.size(); ++i) {
        EXPECT_LT((solutions[i].f + mirrored[i].f).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_EQ(solutions[i].u, mirrored[i].u);
    }
    for (const auto& s : solutions) {
        EXPECT_TRUE(s.report.certified());
        expect_solves(problem, s.f, s.theta, 1e-8);
    }
}

TEST(SolveAll, LinearFamilyHasClosedForm) {
    // linear h on a unit ring: f_e = delta_e and the balance forces equal deltas 2 pi u / n
    const auto g = testsupport::ring(7);
    const FlowNetworkProblem problem(g, FlowFunction::linear(), Vector::Zero(7), 2.8);
    const auto solutions = solve_all(problem);
    ASSERT_EQ(solutions.size(), 7U);
    for (const auto& s : solutions)
        EXPECT_LT((s.f - Vector::Constant(7, kTwoPi * s.u.values[0] / 7.0)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Verify, FlagsBrokenSolutions) {
    const auto problem = pentagon_problem();
    const auto basis = fundamental_cycle_basis(problem.graph());
    auto s = solve_all(problem)[2];
    EXPECT_TRUE(verify_solution(problem, s.f, s.theta, &basis, &s.u.values).certified());
    Vector f = s.f;
    f[0] += 1e-6;
    EXPECT_FALSE(verify_solution(problem, f, s.theta, &basis, &s.u.values).certified());
    const IntVector wrong{0};
    const auto r = verify_solution(problem, s.f, s.theta, &basis, &wrong);
    EXPECT_FALSE(r.winding_matches);
    EXPECT_FALSE(r.certified());
    EXPECT_FALSE(verify_solution(pentagon_problem(1.2), s.f, s.theta).certified());
}

TEST(Decompose, Examples) {
    const auto g = testsupport::pentagon();
    const Vector splay = Vector::Constant(5, kSplayFlow);
    const auto d = decompose_flow(g, splay);
    EXPECT_LT(d.cutset.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((d.cyclic - splay).cwiseAbs().maxCoeff(), 1e-12);

    std::mt19937_64 rng(61);
    const auto h = testsupport::random_connected(rng, 8, 4);
    const Vector x = Vector::Random(8);
    const Vector grad = h.weights().asDiagonal() * incidence_matrix(h).transpose() * x;
    EXPECT_LT(decompose_flow(h, grad).cyclic.cwiseAbs().maxCoeff(), 1e-10);

    const Vector f = Vector::Random(h.edge_count());
    const auto parts = decompose_flow(h, f);
    EXPECT_LT((parts.cutset + parts.cyclic - f).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((incidence_matrix(h) * parts.cyclic).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(LoopFlow, Examples) {
    const auto g = testsupport::pentagon();
    const Cycle c(g, {0, 1, 2, 3, 4});
    EXPECT_EQ(loop_flow(c, Vector::Zero(5)), 0.0);
    EXPECT_NEAR(loop_flow(c, Vector::Constant(5, kSplayFlow)), 4.755283, 1e-6);
    EXPECT_NEAR(loop_flow(c.reversed(), Vector::Constant(5, kSplayFlow)), -4.755283, 1e-6);
}
