#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace bperc {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

// Undirected (multi)graph in CSR form. Parallel edges and self-loops are
// permitted; a self-loop occupies two adjacency slots of its node, so
// sum of degrees == 2 * edge_count always holds. Each undirected edge has
// one EdgeId shared by its two directed slots (per-edge weights are drawn
// once per edge, whichever direction fires).
struct Graph {
    std::uint64_t node_count = 0;
    std::uint64_t edge_count = 0;
    std::vector<std::uint64_t> offsets;   // node_count + 1
    std::vector<NodeId> neighbors;        // 2 * edge_count
    std::vector<EdgeId> edge_ids;         // parallel to neighbors
    std::vector<std::uint32_t> community; // empty when unpartitioned
    bool is_multigraph = false;

    std::uint64_t degree(NodeId v) const { return offsets[v + 1] - offsets[v]; }
    std::span<const NodeId> neighbors_of(NodeId v) const {
        return {neighbors.data() + offsets[v], neighbors.data() + offsets[v + 1]};
    }
    std::span<const EdgeId> edges_of(NodeId v) const {
        return {edge_ids.data() + offsets[v], edge_ids.data() + offsets[v + 1]};
    }
    std::uint32_t community_of(NodeId v) const {
        return community.empty() ? 0u : community[v];
    }
    std::uint32_t community_count() const;

    std::vector<std::uint32_t> degree_sequence() const;
    bool has_edge_ids() const { return !edge_ids.empty(); }

    // Build from an undirected edge list; edge ids are positions in `edges`.
    // Unit-weight engines never look at edge ids; skipping them halves the
    // build's scattered writes.
    static Graph from_edges(std::uint64_t n, const std::vector<std::pair<NodeId, NodeId>>& edges,
                            bool is_multigraph, bool with_edge_ids = true);
};

// Degree list plus the derived quantities used by the critical-point
// formulas: exact mean, max, and the empirical distribution p(d).
struct DegreeSequence {
    std::vector<std::uint32_t> degrees;

    double mean() const;
    std::uint32_t max() const;
    // (d, p(d)) pairs sorted by d, summing to 1
    std::vector<std::pair<std::uint32_t, double>> empirical() const;
};

}  // namespace bperc
