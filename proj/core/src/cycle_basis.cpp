#include "torusflow/cycle_basis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <queue>
#include <set>

#include "torusflow/errors.hpp"

namespace torusflow {

namespace {

constexpr double kRankTolerance = 1e-8;

// GF(2) row stored as 64-bit words, used by the greedy independence filter.
class Gf2Basis {
public:
    explicit Gf2Basis(int bits) : words_((static_cast<std::size_t>(bits) + 63) / 64) {}

    bool insert(std::vector<std::uint64_t> row) {
        for (const auto& [pivot, basis_row] : rows_) {
            if (test(row, pivot)) xor_into(row, basis_row);
        }
        const int pivot = lowest_bit(row);
        if (pivot < 0) return false;
        // keep rows fully reduced against the new pivot
        for (auto& [p, r] : rows_) {
            if (test(r, pivot)) xor_into(r, row);
        }
        rows_.emplace_back(pivot, std::move(row));
        return true;
    }

    [[nodiscard]] std::vector<std::uint64_t> make_row(const IntVector& signs) const {
        std::vector<std::uint64_t> row(words_, 0);
        for (std::size_t e = 0; e < signs.size(); ++e) {
            if (signs[e] != 0) row[e / 64] |= (std::uint64_t{1} << (e % 64));
        }
        return row;
    }

private:
    static bool test(const std::vector<std::uint64_t>& row, int bit) {
        return ((row[static_cast<std::size_t>(bit) / 64] >> (bit % 64)) & 1U) != 0;
    }
    static void xor_into(std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& src) {
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] ^= src[k];
    }
    static int lowest_bit(const std::vector<std::uint64_t>& row) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (row[k] != 0) return static_cast<int>(k * 64) + std::countr_zero(row[k]);
        }
        return -1;
    }

    std::size_t words_;
    std::vector<std::pair<int, std::vector<std::uint64_t>>> rows_;
};

int numeric_rank(const Matrix& m) {
    if (m.size() == 0) return 0;
    Eigen::ColPivHouseholderQR<Matrix> qr(m);
    qr.setThreshold(kRankTolerance);
    return static_cast<int>(qr.rank());
}

// Orients a cycle so its lowest-index edge is traversed positively.
Cycle orient_by_lowest_edge(Cycle c) {
    const auto& s = c.signed_vector();
    const auto it = std::find_if(s.begin(), s.end(), [](int v) { return v != 0; });
    if (it != s.end() && *it < 0) c = c.reversed();
    c.rotate_to_min_node();
    return c;
}

}  // namespace

Cycle::Cycle(const WeightedGraph& g, std::vector<int> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() >= 2 && nodes_.front() == nodes_.back()) nodes_.pop_back();
    if (nodes_.size() < 3) throw InputError("a cycle needs at least three nodes");
    std::set<int> distinct(nodes_.begin(), nodes_.end());
    if (distinct.size() != nodes_.size()) throw InputError("cycle repeats a node");
    signs_.assign(static_cast<std::size_t>(g.edge_count()), 0);
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        const int a = nodes_[k];
        const int b = nodes_[(k + 1) % nodes_.size()];
        if (a < 0 || a >= g.node_count()) throw InputError("cycle node out of range");
        const int e = g.find_edge(a, b);
        if (e < 0)
            throw InputError("cycle nodes " + std::to_string(a) + " and " + std::to_string(b) +
                             " are not adjacent");
        signs_[static_cast<std::size_t>(e)] = g.edge(e).from == a ? 1 : -1;
    }
}

Vector Cycle::as_vector() const {
    Vector v(static_cast<Eigen::Index>(signs_.size()));
    for (std::size_t e = 0; e < signs_.size(); ++e) v[static_cast<Eigen::Index>(e)] = signs_[e];
    return v;
}

Cycle Cycle::reversed() const {
    Cycle out = *this;
    std::reverse(out.nodes_.begin(), out.nodes_.end());
    for (auto& s : out.signs_) s = -s;
    return out;
}

void Cycle::rotate_to_min_node() {
    const auto it = std::min_element(nodes_.begin(), nodes_.end());
    std::rotate(nodes_.begin(), it, nodes_.end());
}

std::string to_string(BasisKind kind) {
    switch (kind) {
        case BasisKind::fundamental: return "fundamental";
        case BasisKind::minimum: return "minimum";
        case BasisKind::custom: return "custom";
    }
    return "custom";
}

BasisKind basis_kind_from_string(const std::string& name) {
    if (name == "fundamental") return BasisKind::fundamental;
    if (name == "minimum") return BasisKind::minimum;
    if (name == "custom") return BasisKind::custom;
    throw InputError("unknown basis kind '" + name + "' (expected fundamental, minimum or custom)");
}

int CycleBasis::total_length() const {
    int total = 0;
    for (const auto& c : cycles) total += c.length();
    return total;
}

Matrix CycleBasis::matrix() const {
    Matrix c(size(), edge_count);
    for (int i = 0; i < size(); ++i) c.row(i) = cycles[static_cast<std::size_t>(i)].as_vector().transpose();
    return c;
}

std::uint64_t CycleBasis::fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t x) {
        for (int k = 0; k < 8; ++k) {
            h ^= (x >> (8 * k)) & 0xffU;
            h *= 1099511628211ULL;
        }
    };
    mix(static_cast<std::uint64_t>(node_count));
    mix(static_cast<std::uint64_t>(edge_count));
    for (const auto& c : cycles) {
        for (int v : c.nodes()) mix(static_cast<std::uint64_t>(v));
        mix(~std::uint64_t{0});
    }
    return h;
}

CycleBasis fundamental_cycle_basis(const WeightedGraph& g) {
    if (g.is_acyclic()) throw AcyclicGraphError("graph has no cycles (m = n - 1)");
    CycleBasis basis;
    basis.kind = BasisKind::fundamental;
    basis.node_count = g.node_count();
    basis.edge_count = g.edge_count();
    basis.tree_edges = spanning_tree(g);

    const auto n = static_cast<std::size_t>(g.node_count());
    std::vector<char> is_tree(static_cast<std::size_t>(g.edge_count()), 0);
    for (int e : basis.tree_edges) is_tree[static_cast<std::size_t>(e)] = 1;

    // root the tree at node 0
    std::vector<int> parent(n, -1), depth(n, 0);
    std::vector<std::vector<int>> tree_adj(n);
    for (int e : basis.tree_edges) {
        tree_adj[static_cast<std::size_t>(g.edge(e).from)].push_back(g.edge(e).to);
        tree_adj[static_cast<std::size_t>(g.edge(e).to)].push_back(g.edge(e).from);
    }
    std::vector<char> seen(n, 0);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = 1;
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop();
        for (int w : tree_adj[static_cast<std::size_t>(v)]) {
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                parent[static_cast<std::size_t>(w)] = v;
                depth[static_cast<std::size_t>(w)] = depth[static_cast<std::size_t>(v)] + 1;
                frontier.push(w);
            }
        }
    }

    for (int e = 0; e < g.edge_count(); ++e) {
        if (is_tree[static_cast<std::size_t>(e)]) continue;
        const int i = g.edge(e).from;
        const int j = g.edge(e).to;
        // tree path j -> i; the cycle is i -> j -> ... -> i
        std::vector<int> up_j{j}, up_i{i};
        int a = j, b = i;
        while (a != b) {
            if (depth[static_cast<std::size_t>(a)] >= depth[static_cast<std::size_t>(b)]) {
                a = parent[static_cast<std::size_t>(a)];
                up_j.push_back(a);
            } else {
                b = parent[static_cast<std::size_t>(b)];
                up_i.push_back(b);
            }
        }
        // up_j ends at the common ancestor, up_i ends at it too
        std::vector<int> seq{i};
        seq.insert(seq.end(), up_j.begin(), up_j.end());
        for (auto it = up_i.rbegin() + 1; it != up_i.rend(); ++it) {
            if (*it != i) seq.push_back(*it);
        }
        Cycle c(g, seq);
        c.rotate_to_min_node();
        basis.cycles.push_back(std::move(c));
        basis.owned_edges.push_back(e);
    }
    return basis;
}

CycleBasis minimum_cycle_basis(const WeightedGraph& g) {
    if (g.is_acyclic()) throw AcyclicGraphError("graph has no cycles (m = n - 1)");
    const int n = g.node_count();
    const int m = g.edge_count();

    struct Candidate {
        int length;
        std::vector<int> nodes;
    };
    std::vector<Candidate> candidates;
    std::set<std::vector<int>> seen_edge_sets;

    for (int root = 0; root < n; ++root) {
        std::vector<int> parent(static_cast<std::size_t>(n), -1), parent_edge(static_cast<std::size_t>(n), -1),
            dist(static_cast<std::size_t>(n), -1);
        std::queue<int> frontier;
        frontier.push(root);
        dist[static_cast<std::size_t>(root)] = 0;
        while (!frontier.empty()) {
            const int v = frontier.front();
            frontier.pop();
            for (int e : g.incident_edges(v)) {
                const int w = g.opposite(e, v);
                if (dist[static_cast<std::size_t>(w)] < 0) {
                    dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
                    parent[static_cast<std::size_t>(w)] = v;
                    parent_edge[static_cast<std::size_t>(w)] = e;
                    frontier.push(w);
                }
            }
        }
        auto path_to_root = [&](int v) {
            std::vector<int> path{v};
            while (v != root) {
                v = parent[static_cast<std::size_t>(v)];
                path.push_back(v);
            }
            return path;
        };
        for (int e = 0; e < m; ++e) {
            const int x = g.edge(e).from;
            const int y = g.edge(e).to;
            if (parent_edge[static_cast<std::size_t>(x)] == e || parent_edge[static_cast<std::size_t>(y)] == e) continue;
            const auto px = path_to_root(x);
            const auto py = path_to_root(y);
            std::set<int> on_px(px.begin(), px.end());
            bool simple = true;
            for (std::size_t k = 0; k + 1 < py.size(); ++k) {
                if (on_px.count(py[k]) != 0) {
                    simple = false;
                    break;
                }
            }
            if (!simple) continue;
            // root ... x, y ... (back to root)
            std::vector<int> seq(px.rbegin(), px.rend());
            seq.insert(seq.end(), py.begin(), py.end() - 1);
            if (seq.size() < 3) continue;
            Cycle c(g, seq);
            std::vector<int> edge_set;
            for (int k = 0; k < m; ++k) {
                if (c.signed_vector()[static_cast<std::size_t>(k)] != 0) edge_set.push_back(k);
            }
            if (!seen_edge_sets.insert(edge_set).second) continue;
            candidates.push_back({c.length(), c.nodes()});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.length < b.length; });

    CycleBasis basis;
    basis.kind = BasisKind::minimum;
    basis.node_count = n;
    basis.edge_count = m;
    Gf2Basis gf2(m);
    const int wanted = g.cycle_rank();
    for (const auto& cand : candidates) {
        if (basis.size() == wanted) break;
        Cycle c(g, cand.nodes);
        if (gf2.insert(gf2.make_row(c.signed_vector()))) basis.cycles.push_back(orient_by_lowest_edge(std::move(c)));
    }
    if (basis.size() != wanted) throw RankError("Horton candidates do not span the cycle space");
    return basis;
}

CycleBasis basis_from_node_sequences(const WeightedGraph& g, const std::vector<std::vector<int>>& sequences) {
    CycleBasis basis;
    basis.kind = BasisKind::custom;
    basis.node_count = g.node_count();
    basis.edge_count = g.edge_count();
    for (const auto& seq : sequences) basis.cycles.emplace_back(g, seq);
    if (basis.size() != g.cycle_rank())
        throw RankError("a cycle basis needs exactly m - n + 1 = " + std::to_string(g.cycle_rank()) + " cycles");
    if (numeric_rank(basis.matrix()) != g.cycle_rank()) throw RankError("cycles are linearly dependent");
    return basis;
}

CycleBasis make_basis(const WeightedGraph& g, BasisKind kind) {
    switch (kind) {
        case BasisKind::fundamental: return fundamental_cycle_basis(g);
        case BasisKind::minimum: return minimum_cycle_basis(g);
        case BasisKind::custom: break;
    }
    throw BasisKindError("custom bases must be built from explicit node sequences");
}

Matrix cycle_edge_pinv(const CycleBasis& basis) {
    const Matrix c = basis.matrix();
    const int k = basis.size();
    if (numeric_rank(c) < k) throw RankError("cycle-edge matrix is rank deficient");
    const Matrix gram = c * c.transpose();
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success) throw RankError("cycle-edge Gram matrix is not positive definite");
    return c.transpose() * llt.solve(Matrix::Identity(k, k));
}

IntVector integer_shift_solve(const CycleBasis& basis, std::span<const int> u) {
    if (basis.kind != BasisKind::fundamental || basis.owned_edges.size() != basis.cycles.size())
        throw BasisKindError("integer_shift_solve needs a fundamental cycle basis");
    if (static_cast<int>(u.size()) != basis.size()) throw InputError("winding vector has the wrong length");
    IntVector z(static_cast<std::size_t>(basis.edge_count), 0);
    for (int i = 0; i < basis.size(); ++i) {
        const int e = basis.owned_edges[static_cast<std::size_t>(i)];
        const int sign = basis.cycles[static_cast<std::size_t>(i)].signed_vector()[static_cast<std::size_t>(e)];
        z[static_cast<std::size_t>(e)] = sign * u[static_cast<std::size_t>(i)];
    }
    return z;
}

IntVector shift_solve(const WeightedGraph& g, const CycleBasis& basis, std::span<const int> u) {
    if (basis.kind == BasisKind::fundamental && basis.owned_edges.size() == basis.cycles.size())
        return integer_shift_solve(basis, u);
    if (static_cast<int>(u.size()) != basis.size()) throw InputError("winding vector has the wrong length");
    const CycleBasis fundamental = fundamental_cycle_basis(g);
    // C_F = R C_Sigma with R = C_F C_Sigma^dagger, so C_Sigma z = u iff C_F z = R u.
    const Matrix r = fundamental.matrix() * cycle_edge_pinv(basis);
    Vector uv(basis.size());
    for (int i = 0; i < basis.size(); ++i) uv[i] = u[static_cast<std::size_t>(i)];
    const Vector ru = r * uv;
    IntVector u_fund(static_cast<std::size_t>(ru.size()));
    for (Eigen::Index i = 0; i < ru.size(); ++i) {
        const double rounded = std::round(ru[i]);
        if (std::abs(ru[i] - rounded) > 1e-9)
            throw NonIntegerWindingError("winding vector has no integral shift in this basis");
        u_fund[static_cast<std::size_t>(i)] = static_cast<int>(rounded);
    }
    return integer_shift_solve(fundamental, u_fund);
}

}  // namespace torusflow
