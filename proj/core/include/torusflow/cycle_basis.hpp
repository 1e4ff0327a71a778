#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "torusflow/graph.hpp"

namespace torusflow {

using IntVector = std::vector<int>;

/// A simple cycle of a graph, stored both as its node sequence and as its
/// signed cycle vector v in {-1, 0, +1}^m (B v = 0).
class Cycle {
public:
    Cycle() = default;

    /// Builds the cycle that visits `nodes` in order and closes back to the
    /// first node. Throws InputError when consecutive nodes are not adjacent,
    /// a node repeats, or fewer than three nodes are given.
    Cycle(const WeightedGraph& g, std::vector<int> nodes);

    /// Node sequence without the repeated closing node.
    [[nodiscard]] const std::vector<int>& nodes() const noexcept { return nodes_; }
    /// Number of nodes (= number of edges) on the cycle, n_sigma.
    [[nodiscard]] int length() const noexcept { return static_cast<int>(nodes_.size()); }
    [[nodiscard]] const IntVector& signed_vector() const noexcept { return signs_; }
    [[nodiscard]] Vector as_vector() const;

    /// The same cycle traversed backwards (v -> -v).
    [[nodiscard]] Cycle reversed() const;

    /// Rotates the node sequence to start at its smallest node.
    void rotate_to_min_node();

    friend bool operator==(const Cycle&, const Cycle&) = default;

private:
    std::vector<int> nodes_;
    IntVector signs_;
};

enum class BasisKind { fundamental, minimum, custom };

[[nodiscard]] std::string to_string(BasisKind kind);
[[nodiscard]] BasisKind basis_kind_from_string(const std::string& name);

/// m - n + 1 independent cycles spanning Ker(B).
struct CycleBasis {
    BasisKind kind = BasisKind::custom;
    int node_count = 0;
    int edge_count = 0;
    std::vector<Cycle> cycles;
    /// Spanning-tree edges (fundamental bases only).
    std::vector<int> tree_edges;
    /// owned_edges[i] is the single non-tree edge of cycle i (fundamental only).
    std::vector<int> owned_edges;

    [[nodiscard]] int size() const noexcept { return static_cast<int>(cycles.size()); }
    [[nodiscard]] int total_length() const;
    /// Cycle-edge matrix C_Sigma, one signed cycle vector per row.
    [[nodiscard]] Matrix matrix() const;
    /// FNV-1a hash of the cycle node sequences.
    [[nodiscard]] std::uint64_t fingerprint() const;
};

[[nodiscard]] CycleBasis fundamental_cycle_basis(const WeightedGraph& g);

/// Horton's minimum cycle basis for unit edge lengths: candidate cycles made
/// of two BFS shortest paths plus one edge, sorted by length, then filtered
/// greedily for GF(2) independence.
[[nodiscard]] CycleBasis minimum_cycle_basis(const WeightedGraph& g);

/// Wraps user-chosen cycles (node sequences) as a basis after checking that
/// they are m - n + 1 linearly independent cycles.
[[nodiscard]] CycleBasis basis_from_node_sequences(const WeightedGraph& g,
                                                   const std::vector<std::vector<int>>& sequences);

[[nodiscard]] CycleBasis make_basis(const WeightedGraph& g, BasisKind kind);

/// Right pseudoinverse C_Sigma^dagger = C^T (C C^T)^{-1}, an m x (m-n+1) matrix.
/// Throws RankError when C_Sigma is numerically rank deficient.
[[nodiscard]] Matrix cycle_edge_pinv(const CycleBasis& basis);

/// Integer z with C_Sigma z = u, supported on the non-tree edges. Only valid
/// for fundamental bases (BasisKindError otherwise).
[[nodiscard]] IntVector integer_shift_solve(const CycleBasis& basis, std::span<const int> u);

/// Integer z with C_Sigma z = u for any basis, routed through the fundamental
/// basis of `g`. Throws NonIntegerWindingError if u has no integral preimage.
[[nodiscard]] IntVector shift_solve(const WeightedGraph& g, const CycleBasis& basis,
                                    std::span<const int> u);

}  // namespace torusflow
