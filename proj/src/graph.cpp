#include "bperc/graph.hpp"

#include <algorithm>
#include <map>

#include "bperc/errors.hpp"
#include "bperc/rng.hpp"

namespace bperc {

std::uint32_t Graph::community_count() const {
    if (community.empty()) return 1;
    std::uint32_t k = 0;
    for (std::uint32_t c : community) k = std::max(k, c + 1);
    return k;
}

std::vector<std::uint32_t> Graph::degree_sequence() const {
    std::vector<std::uint32_t> out(node_count);
    for (std::uint64_t v = 0; v < node_count; ++v)
        out[v] = static_cast<std::uint32_t>(degree(static_cast<NodeId>(v)));
    return out;
}

Graph Graph::from_edges(std::uint64_t n, const std::vector<std::pair<NodeId, NodeId>>& edges,
                        bool is_multigraph, bool with_edge_ids) {
    Graph g;
    g.node_count = n;
    g.edge_count = edges.size();
    g.is_multigraph = is_multigraph;
    g.offsets.assign(n + 1, 0);
    for (const auto& [u, v] : edges) {
        ++g.offsets[u + 1];
        ++g.offsets[v + 1];
    }
    for (std::uint64_t i = 0; i < n; ++i) g.offsets[i + 1] += g.offsets[i];
    g.neighbors.resize(2 * edges.size());
    if (with_edge_ids) {
        std::vector<std::uint64_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
        g.edge_ids.resize(2 * edges.size());
        for (std::size_t e = 0; e < edges.size(); ++e) {
            const auto [u, v] = edges[e];
            g.neighbors[cursor[u]] = v;
            g.edge_ids[cursor[u]++] = static_cast<EdgeId>(e);
            g.neighbors[cursor[v]] = u;
            g.edge_ids[cursor[v]++] = static_cast<EdgeId>(e);
        }
    } else {
        std::vector<std::uint64_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
        for (const auto& [u, v] : edges) {
            g.neighbors[cursor[u]++] = v;
            g.neighbors[cursor[v]++] = u;
        }
    }
    return g;
}

double DegreeSequence::mean() const {
    if (degrees.empty()) return 0.0;
    std::uint64_t total = 0;
    for (std::uint32_t d : degrees) total += d;
    return static_cast<double>(total) / static_cast<double>(degrees.size());
}

std::uint32_t DegreeSequence::max() const {
    std::uint32_t m = 0;
    for (std::uint32_t d : degrees) m = std::max(m, d);
    return m;
}

std::vector<std::pair<std::uint32_t, double>> DegreeSequence::empirical() const {
    std::map<std::uint32_t, std::uint64_t> counts;
    for (std::uint32_t d : degrees) ++counts[d];
    std::vector<std::pair<std::uint32_t, double>> pd;
    pd.reserve(counts.size());
    const double n = static_cast<double>(degrees.size());
    for (const auto& [d, c] : counts) pd.emplace_back(d, static_cast<double>(c) / n);
    return pd;
}

}  // namespace bperc
