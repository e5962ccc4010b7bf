#include "bperc/graph_models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "bperc/errors.hpp"

namespace bperc {

namespace {

void check_prob(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0))
        throw SpecError(std::string(what) + " probability outside [0,1]: " + std::to_string(p));
}

// Append all Bernoulli(p) hits over pair indices [0, total) via `emit`.
template <typename Emit>
void bernoulli_pairs(Rng& rng, std::uint64_t total, double p, Emit emit) {
    for (BernoulliScan scan(rng, total, p); !scan.done(); scan.step()) emit(scan.value());
}

// Decode linear index e over unordered pairs (u < v) of 0..n-1.
std::pair<NodeId, NodeId> triangular_decode(std::uint64_t e, std::uint64_t n) {
    // offset(u) = u*(n-1) - u*(u-1)/2 is the first index of row u
    const double nd = static_cast<double>(n);
    double guess = nd - 0.5 - std::sqrt((nd - 0.5) * (nd - 0.5) - 2.0 * static_cast<double>(e));
    std::uint64_t u = static_cast<std::uint64_t>(std::max(0.0, guess));
    auto offset = [n](std::uint64_t row) { return row * (n - 1) - row * (row - 1) / 2; };
    while (u + 1 < n && offset(u + 1) <= e) ++u;
    while (u > 0 && offset(u) > e) --u;
    const std::uint64_t v = u + 1 + (e - offset(u));
    return {static_cast<NodeId>(u), static_cast<NodeId>(v)};
}

}  // namespace

void validate(const GraphSpec& spec) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ErImplicit> || std::is_same_v<T, ErExplicit>) {
                if (s.n < 1) throw SpecError("n must be >= 1");
                check_prob(s.p, "edge");
            } else if constexpr (std::is_same_v<T, GnM>) {
                if (s.n < 1) throw SpecError("n must be >= 1");
            } else if constexpr (std::is_same_v<T, ConfigModel>) {
                if (s.degrees.empty()) throw SpecError("empty degree sequence");
            } else if constexpr (std::is_same_v<T, PowerLawConfig>) {
                if (s.n < 1) throw SpecError("n must be >= 1");
                if (s.d_min > s.d_max) throw SpecError("d_min > d_max");
            } else if constexpr (std::is_same_v<T, BlockModel>) {
                const std::size_t k = s.sizes.size();
                if (k == 0) throw SpecError("block model needs at least one community");
                if (s.p.size() != k) throw SpecError("block matrix size mismatch");
                for (std::size_t i = 0; i < k; ++i) {
                    if (s.sizes[i] < 1) throw SpecError("community sizes must be >= 1");
                    if (s.p[i].size() != k) throw SpecError("block matrix is not square");
                    for (std::size_t j = 0; j < k; ++j) {
                        check_prob(s.p[i][j], "block");
                        if (s.p[i][j] != s.p[j][i])
                            throw SpecError("block probability matrix must be symmetric");
                    }
                }
            }
        },
        spec);
}

std::uint64_t spec_node_count(const GraphSpec& spec) {
    return std::visit(
        [](const auto& s) -> std::uint64_t {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ErImplicit> || std::is_same_v<T, ErExplicit> ||
                          std::is_same_v<T, GnM> || std::is_same_v<T, PowerLawConfig>) {
                return s.n;
            } else if constexpr (std::is_same_v<T, ConfigModel>) {
                return s.degrees.size();
            } else if constexpr (std::is_same_v<T, BlockModel>) {
                std::uint64_t n = 0;
                for (auto nk : s.sizes) n += nk;
                return n;
            } else {
                return 0;  // edge list: unknown until ingested
            }
        },
        spec);
}

std::string spec_name(const GraphSpec& spec) {
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ErImplicit>) return "gnp";
            else if constexpr (std::is_same_v<T, ErExplicit>) return "gnp-explicit";
            else if constexpr (std::is_same_v<T, GnM>) return "gnm";
            else if constexpr (std::is_same_v<T, ConfigModel>) return "config";
            else if constexpr (std::is_same_v<T, PowerLawConfig>) return "powerlaw";
            else if constexpr (std::is_same_v<T, BlockModel>) return "block";
            else return "edgelist";
        },
        spec);
}

Graph config_model_from_degrees(std::span<const std::uint32_t> degrees, Rng& rng,
                                bool with_edge_ids) {
    std::vector<std::uint32_t> deg(degrees.begin(), degrees.end());
    std::uint64_t stub_total = 0;
    for (std::uint32_t d : deg) stub_total += d;
    if (stub_total % 2 != 0) {
        const auto it = std::max_element(deg.begin(), deg.end());
        warn("odd half-edge total; dropping one half-edge from node " +
             std::to_string(it - deg.begin()) + " (degree " + std::to_string(*it) + ")");
        --*it;
        --stub_total;
    }
    std::vector<NodeId> stubs;
    stubs.reserve(stub_total);
    for (NodeId v = 0; v < deg.size(); ++v)
        for (std::uint32_t k = 0; k < deg[v]; ++k) stubs.push_back(v);
    rng.shuffle(stubs);

    // CSR directly from the stub pairing; offsets are the degrees themselves
    Graph g;
    g.node_count = deg.size();
    g.edge_count = stub_total / 2;
    g.is_multigraph = true;
    g.offsets.assign(g.node_count + 1, 0);
    for (std::size_t v = 0; v < deg.size(); ++v) g.offsets[v + 1] = g.offsets[v] + deg[v];
    g.neighbors.resize(stub_total);
    std::vector<std::uint64_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
    if (with_edge_ids) {
        g.edge_ids.resize(stub_total);
        for (std::uint64_t e = 0; e < g.edge_count; ++e) {
            const NodeId u = stubs[2 * e], v = stubs[2 * e + 1];
            g.neighbors[cursor[u]] = v;
            g.edge_ids[cursor[u]++] = static_cast<EdgeId>(e);
            g.neighbors[cursor[v]] = u;
            g.edge_ids[cursor[v]++] = static_cast<EdgeId>(e);
        }
    } else {
        for (std::uint64_t e = 0; e < g.edge_count; ++e) {
            const NodeId u = stubs[2 * e], v = stubs[2 * e + 1];
            g.neighbors[cursor[u]++] = v;
            g.neighbors[cursor[v]++] = u;
        }
    }
    return g;
}

Graph matched_config_model(const Graph& g, Rng& rng) {
    const auto deg = g.degree_sequence();
    return config_model_from_degrees(deg, rng);
}

namespace {

Graph generate_block(const BlockModel& s, Rng& rng) {
    const std::size_t k = s.sizes.size();
    std::vector<std::uint64_t> offset(k + 1, 0);
    for (std::size_t i = 0; i < k; ++i) offset[i + 1] = offset[i] + s.sizes[i];
    const std::uint64_t n = offset[k];

    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::size_t i = 0; i < k; ++i) {
        // intra-community pairs
        const std::uint64_t ni = s.sizes[i];
        bernoulli_pairs(rng, ni * (ni - 1) / 2, s.p[i][i], [&](std::uint64_t e) {
            auto [u, v] = triangular_decode(e, ni);
            edges.emplace_back(static_cast<NodeId>(offset[i] + u),
                               static_cast<NodeId>(offset[i] + v));
        });
        // inter-community pairs
        for (std::size_t j = i + 1; j < k; ++j) {
            const std::uint64_t nj = s.sizes[j];
            bernoulli_pairs(rng, ni * nj, s.p[i][j], [&](std::uint64_t e) {
                edges.emplace_back(static_cast<NodeId>(offset[i] + e / nj),
                                   static_cast<NodeId>(offset[j] + e % nj));
            });
        }
    }
    Graph g = Graph::from_edges(n, edges, false);
    g.community.resize(n);
    for (std::size_t i = 0; i < k; ++i)
        for (std::uint64_t v = offset[i]; v < offset[i + 1]; ++v)
            g.community[v] = static_cast<std::uint32_t>(i);
    return g;
}

}  // namespace

Graph generate(const GraphSpec& spec, Rng& rng, bool with_edge_ids) {
    validate(spec);
    return std::visit(
        [&rng, with_edge_ids](const auto& s) -> Graph {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ErImplicit>) {
                throw SpecError("implicit-only: G(n,p) is consumed by the node process via "
                                "deferred decisions, never materialized");
            } else if constexpr (std::is_same_v<T, ErExplicit>) {
                std::vector<std::pair<NodeId, NodeId>> edges;
                bernoulli_pairs(rng, s.n * (s.n - 1) / 2, s.p, [&](std::uint64_t e) {
                    edges.push_back(triangular_decode(e, s.n));
                });
                return Graph::from_edges(s.n, edges, false, with_edge_ids);
            } else if constexpr (std::is_same_v<T, GnM>) {
                std::vector<std::pair<NodeId, NodeId>> edges;
                edges.reserve(s.m);
                for (std::uint64_t e = 0; e < s.m; ++e)
                    edges.emplace_back(static_cast<NodeId>(rng.below(s.n)),
                                       static_cast<NodeId>(rng.below(s.n)));
                return Graph::from_edges(s.n, edges, true, with_edge_ids);
            } else if constexpr (std::is_same_v<T, ConfigModel>) {
                return config_model_from_degrees(s.degrees, rng, with_edge_ids);
            } else if constexpr (std::is_same_v<T, PowerLawConfig>) {
                const auto seq = powerlaw_degree_sequence(s.n, s.beta, s.d_min, s.d_max);
                return config_model_from_degrees(seq.degrees, rng, with_edge_ids);
            } else if constexpr (std::is_same_v<T, BlockModel>) {
                return generate_block(s, rng);
            } else {
                return ingest_edge_list(s.path).graph;
            }
        },
        spec);
}

DegreeSequence quantile_degree_sequence(std::uint64_t n,
                                        const std::vector<std::pair<std::uint32_t, double>>& pd) {
    // d_i = inf{d : 1 - F(d) < i/n}; node multiplicity of degree d is
    // floor(n(1-F(d-))) - floor(n(1-F(d))). Sequence emitted descending.
    double total = 0.0;
    for (const auto& [d, p] : pd) total += p;
    if (std::abs(total - 1.0) > 1e-9) throw SpecError("degree distribution does not sum to 1");

    DegreeSequence seq;
    seq.degrees.reserve(n);
    double tail = 1.0;  // 1 - F(d-) going upward
    std::uint64_t prev_floor = n;
    std::vector<std::pair<std::uint32_t, std::uint64_t>> mult;
    for (const auto& [d, p] : pd) {
        tail -= p;
        const double g = std::max(0.0, tail) * static_cast<double>(n);
        const std::uint64_t fl = static_cast<std::uint64_t>(g);
        mult.emplace_back(d, prev_floor - fl);
        prev_floor = fl;
    }
    // leftover mass from rounding goes to the largest degree
    if (prev_floor > 0) mult.back().second += prev_floor;
    for (auto it = mult.rbegin(); it != mult.rend(); ++it)
        seq.degrees.insert(seq.degrees.end(), it->second, it->first);
    seq.degrees.resize(n, pd.front().first);
    return seq;
}

DegreeSequence powerlaw_degree_sequence(std::uint64_t n, double beta, std::uint32_t d_min,
                                        std::uint32_t d_max) {
    if (d_min > d_max) throw SpecError("d_min > d_max");
    if (beta > 1.0 && d_min >= 1) {
        const double zeta_cap = std::pow(static_cast<double>(n), 1.0 / (beta - 1.0));
        if (static_cast<double>(d_max) > zeta_cap * (1.0 + 1e-9))
            warn("d_max=" + std::to_string(d_max) + " exceeds n^(1/(beta-1))=" +
                 std::to_string(zeta_cap) + "; tail nodes of this degree are vanishingly rare");
    }
    std::vector<std::pair<std::uint32_t, double>> pd;
    double z = 0.0;
    for (std::uint32_t d = d_min; d <= d_max; ++d)
        z += std::pow(static_cast<double>(d == 0 ? 1 : d), -beta);
    for (std::uint32_t d = d_min; d <= d_max; ++d)
        pd.emplace_back(d, std::pow(static_cast<double>(d == 0 ? 1 : d), -beta) / z);
    return quantile_degree_sequence(n, pd);
}

IngestReport ingest_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open edge list: " + path);
    IngestReport report;
    std::unordered_map<std::uint64_t, NodeId> remap;
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::string line;
    std::uint64_t lineno = 0;
    auto intern = [&](std::uint64_t id) {
        auto [it, inserted] = remap.try_emplace(id, static_cast<NodeId>(report.original_ids.size()));
        if (inserted) report.original_ids.push_back(id);
        return it->second;
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos || line[i] == '#') continue;
        std::uint64_t ids[2];
        for (int k = 0; k < 2; ++k) {
            if (i == std::string::npos)
                throw SpecError(path + ":" + std::to_string(lineno) + ": expected two node ids");
            std::size_t end = line.find_first_of(" \t\r", i);
            const std::string tok = line.substr(i, end == std::string::npos ? end : end - i);
            try {
                std::size_t pos = 0;
                ids[k] = std::stoull(tok, &pos);
                if (pos != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw SpecError(path + ":" + std::to_string(lineno) + ": non-integer id '" + tok +
                                "'");
            }
            i = line.find_first_not_of(" \t\r", end);
        }
        if (i != std::string::npos)
            throw SpecError(path + ":" + std::to_string(lineno) + ": trailing tokens");
        if (ids[0] == ids[1]) {
            ++report.self_loops;
            continue;
        }
        NodeId u = intern(ids[0]), v = intern(ids[1]);
        if (u > v) std::swap(u, v);
        edges.emplace_back(u, v);
    }
    std::sort(edges.begin(), edges.end());
    const auto before = edges.size();
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    report.duplicate_edges = before - edges.size();
    report.graph = Graph::from_edges(report.original_ids.size(), edges, false);
    return report;
}

Graph simplify(const Graph& g) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::uint64_t u = 0; u < g.node_count; ++u) {
        std::vector<NodeId> nbrs;
        for (NodeId v : g.neighbors_of(static_cast<NodeId>(u)))
            if (v > u) nbrs.push_back(v);
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        for (NodeId v : nbrs) edges.emplace_back(static_cast<NodeId>(u), v);
    }
    Graph out = Graph::from_edges(g.node_count, edges, false);
    out.community = g.community;
    return out;
}

std::vector<std::uint32_t> read_degree_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open degree file: " + path);
    std::vector<std::uint32_t> degrees;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t i = line.find_first_not_of(" \t\r");
        if (i == std::string::npos || line[i] == '#') continue;
        try {
            std::size_t pos = 0;
            const unsigned long v = std::stoul(line.substr(i), &pos);
            degrees.push_back(static_cast<std::uint32_t>(v));
        } catch (const std::exception&) {
            throw SpecError(path + ":" + std::to_string(lineno) + ": expected one integer degree");
        }
    }
    return degrees;
}

}  // namespace bperc
