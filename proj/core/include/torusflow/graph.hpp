#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace torusflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// An oriented edge e = (i, j) with positive weight a_ij.
struct Edge {
    int from = 0;
    int to = 0;
    double weight = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Connected undirected graph whose edges carry an orientation and an order.
///
/// The orientation only fixes signs: column e of the incidence matrix has
/// -1 at `from` and +1 at `to`, so (B^T x)_e = x_to - x_from. Construction
/// validates connectivity, simple-graph structure and positive weights and
/// throws InputError (SingularityError when disconnected) otherwise.
class WeightedGraph {
public:
    WeightedGraph() = default;
    WeightedGraph(int node_count, std::vector<Edge> edges);

    [[nodiscard]] int node_count() const noexcept { return n_; }
    [[nodiscard]] int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const Edge& edge(int e) const { return edges_.at(static_cast<std::size_t>(e)); }

    /// Dimension of the cycle space, m - n + 1.
    [[nodiscard]] int cycle_rank() const noexcept { return edge_count() - n_ + 1; }
    [[nodiscard]] bool is_acyclic() const noexcept { return cycle_rank() == 0; }

    /// Edge indices incident to `node`, in input order.
    [[nodiscard]] const std::vector<int>& incident_edges(int node) const {
        return adjacency_.at(static_cast<std::size_t>(node));
    }
    /// The endpoint of edge `e` that is not `node`.
    [[nodiscard]] int opposite(int e, int node) const;
    /// Index of the edge joining a and b (either orientation), or -1.
    [[nodiscard]] int find_edge(int a, int b) const;

    /// Diagonal entries of A = diag(a_ij).
    [[nodiscard]] Vector weights() const;

    friend bool operator==(const WeightedGraph& lhs, const WeightedGraph& rhs) {
        return lhs.n_ == rhs.n_ && lhs.edges_ == rhs.edges_;
    }

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adjacency_;
};

/// n x m incidence matrix (+1 at the sink `to`, -1 at the source `from`).
[[nodiscard]] Matrix incidence_matrix(const WeightedGraph& g);

/// Weighted Laplacian L = B A B^T.
[[nodiscard]] Matrix laplacian(const WeightedGraph& g);

/// Moore-Penrose pseudoinverse of a symmetric PSD matrix whose kernel is
/// exactly span{1}: (M + J/n)^{-1} - J/n with J the all-ones matrix.
[[nodiscard]] Matrix pinv_with_ones_kernel(const Matrix& m);

/// L^dagger for the weighted Laplacian.
[[nodiscard]] Matrix laplacian_pinv(const WeightedGraph& g);

/// Spanning tree grown from node 0 by sweeping the edge list in input order.
/// Returns the n-1 tree edge indices in the order they were taken.
[[nodiscard]] std::vector<int> spanning_tree(const WeightedGraph& g);

/// True when every node is reachable from node 0.
[[nodiscard]] bool is_connected(int node_count, const std::vector<Edge>& edges);

}  // namespace torusflow
