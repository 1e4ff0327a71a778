#include "torusflow/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <string>

#include "torusflow/errors.hpp"

namespace torusflow {

bool is_connected(int node_count, const std::vector<Edge>& edges) {
    if (node_count <= 0) return false;
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(node_count));
    for (const auto& e : edges) {
        adj[static_cast<std::size_t>(e.from)].push_back(e.to);
        adj[static_cast<std::size_t>(e.to)].push_back(e.from);
    }
    std::vector<char> seen(static_cast<std::size_t>(node_count), 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop();
        for (int w : adj[static_cast<std::size_t>(v)]) {
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++reached;
                frontier.push(w);
            }
        }
    }
    return reached == node_count;
}

WeightedGraph::WeightedGraph(int node_count, std::vector<Edge> edges)
    : n_(node_count), edges_(std::move(edges)) {
    if (n_ < 1) throw InputError("graph needs at least one node");
    std::set<std::pair<int, int>> seen;
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        const auto& e = edges_[k];
        const std::string where = "edge " + std::to_string(k);
        if (e.from < 0 || e.from >= n_ || e.to < 0 || e.to >= n_)
            throw InputError(where + ": node index out of range");
        if (e.from == e.to) throw InputError(where + ": self-loop");
        if (!(e.weight > 0.0)) throw InputError(where + ": weight must be strictly positive");
        const auto key = std::minmax(e.from, e.to);
        if (!seen.insert({key.first, key.second}).second)
            throw InputError(where + ": duplicate undirected edge");
    }
    if (!is_connected(n_, edges_)) throw SingularityError("graph is not connected");

    adjacency_.assign(static_cast<std::size_t>(n_), {});
    for (int k = 0; k < edge_count(); ++k) {
        adjacency_[static_cast<std::size_t>(edges_[static_cast<std::size_t>(k)].from)].push_back(k);
        adjacency_[static_cast<std::size_t>(edges_[static_cast<std::size_t>(k)].to)].push_back(k);
    }
}

int WeightedGraph::opposite(int e, int node) const {
    const auto& ed = edge(e);
    return ed.from == node ? ed.to : ed.from;
}

int WeightedGraph::find_edge(int a, int b) const {
    for (int e : incident_edges(a)) {
        if (opposite(e, a) == b) return e;
    }
    return -1;
}

Vector WeightedGraph::weights() const {
    Vector w(edge_count());
    for (int e = 0; e < edge_count(); ++e) w[e] = edges_[static_cast<std::size_t>(e)].weight;
    return w;
}

Matrix incidence_matrix(const WeightedGraph& g) {
    Matrix b = Matrix::Zero(g.node_count(), g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        b(g.edge(e).from, e) = -1.0;
        b(g.edge(e).to, e) = 1.0;
    }
    return b;
}

Matrix laplacian(const WeightedGraph& g) {
    Matrix l = Matrix::Zero(g.node_count(), g.node_count());
    for (const auto& e : g.edges()) {
        l(e.from, e.from) += e.weight;
        l(e.to, e.to) += e.weight;
        l(e.from, e.to) -= e.weight;
        l(e.to, e.from) -= e.weight;
    }
    return l;
}

Matrix pinv_with_ones_kernel(const Matrix& m) {
    const auto n = m.rows();
    const Matrix j = Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
    Eigen::LDLT<Matrix> ldlt(m + j);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw SingularityError("matrix kernel is larger than span{1}");
    Matrix inv = ldlt.solve(Matrix::Identity(n, n));
    Matrix out = inv - j;
    // symmetrize away round-off
    return 0.5 * (out + out.transpose());
}

Matrix laplacian_pinv(const WeightedGraph& g) {
    if (!is_connected(g.node_count(), g.edges())) throw SingularityError("graph is not connected");
    return pinv_with_ones_kernel(laplacian(g));
}

std::vector<int> spanning_tree(const WeightedGraph& g) {
    // Grow from node 0: sweep the edge list in input order, taking every edge
    // with exactly one endpoint in the tree, until a sweep adds nothing.
    std::vector<int> tree;
    tree.reserve(static_cast<std::size_t>(g.node_count() - 1));
    std::vector<char> in_tree(static_cast<std::size_t>(g.node_count()), 0);
    in_tree[0] = 1;
    bool grew = true;
    while (grew && static_cast<int>(tree.size()) < g.node_count() - 1) {
        grew = false;
        for (int e = 0; e < g.edge_count(); ++e) {
            const auto& ed = g.edge(e);
            const bool a = in_tree[static_cast<std::size_t>(ed.from)] != 0;
            const bool b = in_tree[static_cast<std::size_t>(ed.to)] != 0;
            if (a != b) {
                in_tree[static_cast<std::size_t>(a ? ed.to : ed.from)] = 1;
                tree.push_back(e);
                grew = true;
            }
        }
    }
    if (static_cast<int>(tree.size()) != g.node_count() - 1)
        throw SingularityError("graph is not connected");
    return tree;
}

}  // namespace torusflow
