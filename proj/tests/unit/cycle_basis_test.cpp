#include <gtest/gtest.h>

#include <random>

#include "graphs.hpp"
#include "oracles.hpp"
#include "torusflow/cycle_basis.hpp"
#include "torusflow/errors.hpp"

using namespace torusflow;

namespace {

void expect_valid_basis(const WeightedGraph& g, const CycleBasis& basis) {
    ASSERT_EQ(basis.size(), g.cycle_rank());
    const Matrix c = basis.matrix();
    const Matrix b = incidence_matrix(g);
    EXPECT_EQ((b * c.transpose()).cwiseAbs().maxCoeff(), 0.0);
    if (basis.size() > 0) {
        Eigen::FullPivLU<Matrix> lu(c);
        EXPECT_EQ(lu.rank(), basis.size());
    }
}

}  // namespace

TEST(Cycle, SignedVectorFollowsTraversal) {
    const auto g = testsupport::triangle();
    const Cycle c(g, {0, 1, 2});
    EXPECT_EQ(c.signed_vector(), (IntVector{1, 1, 1}));
    EXPECT_EQ(c.reversed().signed_vector(), (IntVector{-1, -1, -1}));
    EXPECT_EQ(c.length(), 3);
}

TEST(Cycle, RejectsNonCycles) {
    const auto g = testsupport::square_with_diagonal();
    EXPECT_THROW(Cycle(g, {0, 1}), InputError);
    EXPECT_THROW(Cycle(g, {0, 1, 0, 3}), InputError);
    EXPECT_THROW(Cycle(g, {0, 2, 3}), InputError);
}

TEST(Cycle, RotateToMinNode) {
    const auto g = testsupport::pentagon();
    Cycle c(g, {3, 4, 0, 1, 2});
    c.rotate_to_min_node();
    EXPECT_EQ(c.nodes(), (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(FundamentalBasis, TriangleHasOneCycle) {
    const auto basis = fundamental_cycle_basis(testsupport::triangle());
    ASSERT_EQ(basis.size(), 1);
    EXPECT_EQ(basis.tree_edges, (std::vector<int>{0, 1}));
    EXPECT_EQ(basis.owned_edges, (std::vector<int>{2}));
    EXPECT_EQ(basis.cycles[0].signed_vector()[2], 1);
}

TEST(FundamentalBasis, SquareWithDiagonal) {
    const auto g = testsupport::square_with_diagonal();
    const auto basis = fundamental_cycle_basis(g);
    expect_valid_basis(g, basis);
    EXPECT_EQ(basis.tree_edges, (std::vector<int>{0, 1, 2}));
    EXPECT_EQ(basis.total_length(), 7);
    // each owned edge appears with coefficient +1 in exactly its own cycle
    for (int i = 0; i < basis.size(); ++i)
        for (int k = 0; k < basis.size(); ++k)
            EXPECT_EQ(basis.cycles[k].signed_vector()[basis.owned_edges[i]], i == k ? 1 : 0);
}

TEST(FundamentalBasis, CompleteK4UsesTrianglesThroughRoot) {
    const auto g = testsupport::complete(4);
    const auto basis = fundamental_cycle_basis(g);
    expect_valid_basis(g, basis);
    for (const auto& c : basis.cycles) {
        EXPECT_EQ(c.length(), 3);
        EXPECT_EQ(c.nodes().front(), 0);
    }
}

TEST(FundamentalBasis, RandomGraphsAreValid) {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 25; ++t) {
        const auto g = testsupport::random_connected(rng, 3 + static_cast<int>(rng() % 9), 1 + static_cast<int>(rng() % 6));
        expect_valid_basis(g, fundamental_cycle_basis(g));
    }
}

TEST(MinimumBasis, SquareWithDiagonalGivesBothTriangles) {
    const auto g = testsupport::square_with_diagonal();
    const auto basis = minimum_cycle_basis(g);
    ASSERT_EQ(basis.size(), 2);
    EXPECT_EQ(basis.total_length(), 6);
    // (0,1,3) and (1,2,3), each oriented so its lowest-index edge has +1
    EXPECT_EQ(basis.cycles[0].signed_vector(), (IntVector{1, 0, 0, 1, 1}));
    EXPECT_EQ(basis.cycles[1].signed_vector(), (IntVector{0, 1, 1, 0, -1}));
}

TEST(MinimumBasis, KnownTotals) {
    EXPECT_EQ(minimum_cycle_basis(testsupport::complete(4)).total_length(), 9);
    EXPECT_EQ(minimum_cycle_basis(testsupport::grid(2, 3)).total_length(), 8);
    EXPECT_EQ(minimum_cycle_basis(testsupport::pentagon_chain(3)).total_length(), 15);
}

TEST(MinimumBasis, MatchesExhaustiveOracle) {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 30; ++t) {
        const int n = 3 + static_cast<int>(rng() % 6);
        const auto g = testsupport::random_connected(rng, n, 1 + static_cast<int>(rng() % 5));
        if (g.is_acyclic()) continue;
        const auto basis = minimum_cycle_basis(g);
        expect_valid_basis(g, basis);
        EXPECT_EQ(basis.total_length(), oracle::minimum_basis_length(g));
        EXPECT_LE(basis.total_length(), fundamental_cycle_basis(g).total_length());
    }
}

TEST(CycleBases, AcyclicGraphsHaveNone) {
    EXPECT_THROW((void)fundamental_cycle_basis(testsupport::path(4)), AcyclicGraphError);
    EXPECT_THROW((void)minimum_cycle_basis(testsupport::path(4)), AcyclicGraphError);
}

TEST(CycleBases, CustomFromSequences) {
    const auto g = testsupport::square_with_diagonal();
    const auto basis = basis_from_node_sequences(g, {{0, 1, 3}, {1, 2, 3}});
    EXPECT_EQ(basis.kind, BasisKind::custom);
    expect_valid_basis(g, basis);
    EXPECT_THROW((void)basis_from_node_sequences(g, {{0, 1, 3}}), RankError);
    EXPECT_THROW((void)basis_from_node_sequences(g, {{0, 1, 3}, {3, 1, 0}}), RankError);
    EXPECT_THROW((void)make_basis(g, BasisKind::custom), BasisKindError);
}

TEST(CycleBases, KindStrings) {
    EXPECT_EQ(basis_kind_from_string("minimum"), BasisKind::minimum);
    EXPECT_EQ(to_string(BasisKind::fundamental), "fundamental");
    EXPECT_THROW((void)basis_kind_from_string("shortest"), InputError);
}

TEST(CycleEdgePinv, IsARightInverse) {
    std::mt19937_64 rng(29);
    for (int t = 0; t < 20; ++t) {
        const auto g = testsupport::random_connected(rng, 4 + static_cast<int>(rng() % 7), 1 + static_cast<int>(rng() % 5));
        for (auto kind : {BasisKind::fundamental, BasisKind::minimum}) {
            const auto basis = make_basis(g, kind);
            const Matrix c = basis.matrix();
            const Matrix cp = cycle_edge_pinv(basis);
            EXPECT_LT((c * cp - Matrix::Identity(basis.size(), basis.size())).cwiseAbs().maxCoeff(), 1e-10);
            // columns of C^dagger lie in the cycle space
            EXPECT_LT((incidence_matrix(g) * cp).cwiseAbs().maxCoeff(), 1e-10);
        }
    }
}

TEST(ShiftSolve, FundamentalIsSupportedOnOwnedEdges) {
    const auto g = testsupport::complete(5);
    const auto basis = fundamental_cycle_basis(g);
    IntVector u(static_cast<std::size_t>(basis.size()));
    for (int i = 0; i < basis.size(); ++i) u[i] = i % 3 - 1;
    const IntVector z = integer_shift_solve(basis, u);
    for (int e : basis.tree_edges) EXPECT_EQ(z[e], 0);
    Vector zv(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) zv[e] = z[e];
    const Vector cu = basis.matrix() * zv;
    for (int i = 0; i < basis.size(); ++i) EXPECT_EQ(cu[i], u[i]);
}

TEST(ShiftSolve, MinimumBasisRoundTrips) {
    const auto g = testsupport::grid(3, 3);
    const auto basis = minimum_cycle_basis(g);
    const IntVector u{1, -1, 0, 2};
    const IntVector z = shift_solve(g, basis, u);
    Vector zv(g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) zv[e] = z[e];
    const Vector cu = basis.matrix() * zv;
    for (int i = 0; i < basis.size(); ++i) EXPECT_NEAR(cu[i], u[i], 1e-12);
    EXPECT_THROW((void)integer_shift_solve(basis, u), BasisKindError);
}

TEST(Fingerprint, DependsOnCycles) {
    const auto g = testsupport::square_with_diagonal();
    EXPECT_NE(fundamental_cycle_basis(g).fingerprint(), minimum_cycle_basis(g).fingerprint());
    EXPECT_EQ(minimum_cycle_basis(g).fingerprint(), minimum_cycle_basis(g).fingerprint());
}
