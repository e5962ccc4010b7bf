#pragma once

#include <optional>
#include <string>
#include <variant>

#include "bperc/distribution.hpp"
#include "bperc/graph.hpp"
#include "bperc/rng.hpp"

namespace bperc {

// Implicit G(n,p): consumed directly by the node process via deferred edge
// decisions, never materialized.
struct ErImplicit {
    std::uint64_t n;
    double p;
};

struct ErExplicit {
    std::uint64_t n;
    double p;
};

// Multigraph G~(n,M): M edges added sequentially, endpoints independent
// uniform; parallel edges and self-loops kept.
struct GnM {
    std::uint64_t n;
    std::uint64_t m;
};

struct ConfigModel {
    std::vector<std::uint32_t> degrees;
};

// Truncated power law p(d) ~ d^-beta on [d_min, d_max], realized through the
// deterministic quantile construction, then paired as a configuration model.
struct PowerLawConfig {
    std::uint64_t n;
    double beta;
    std::uint32_t d_min;
    std::uint32_t d_max;
};

// Block model: K communities, symmetric edge-probability matrix.
struct BlockModel {
    std::vector<std::uint64_t> sizes;
    std::vector<std::vector<double>> p;
};

struct FromEdgeList {
    std::string path;
};

using GraphSpec =
    std::variant<ErImplicit, ErExplicit, GnM, ConfigModel, PowerLawConfig, BlockModel, FromEdgeList>;

void validate(const GraphSpec& spec);
std::uint64_t spec_node_count(const GraphSpec& spec);
std::string spec_name(const GraphSpec& spec);

// Draws a graph from the spec. ErImplicit throws SpecError (implicit-only);
// FromEdgeList ignores the rng. with_edge_ids=false skips the per-edge id
// table (only unit-weight engines can use such a graph).
Graph generate(const GraphSpec& spec, Rng& rng, bool with_edge_ids = true);

// Uniform half-edge pairing. An odd stub total is repaired by dropping one
// half-edge from a maximum-degree node (with a warning).
Graph config_model_from_degrees(std::span<const std::uint32_t> degrees, Rng& rng,
                                bool with_edge_ids = true);

// Configuration-model multigraph over g's exact degree sequence.
Graph matched_config_model(const Graph& g, Rng& rng);

// d_i = inf{d : 1 - F_n(d) < i/n} for the truncated power law; deterministic.
DegreeSequence powerlaw_degree_sequence(std::uint64_t n, double beta, std::uint32_t d_min,
                                        std::uint32_t d_max);

// Deterministic quantile realization of an arbitrary discrete degree law.
DegreeSequence quantile_degree_sequence(std::uint64_t n,
                                        const std::vector<std::pair<std::uint32_t, double>>& pd);

struct IngestReport {
    Graph graph;                            // simple undirected graph, dense ids
    std::vector<std::uint64_t> original_ids; // original id of node i
    std::uint64_t duplicate_edges = 0;
    std::uint64_t self_loops = 0;
};

// Whitespace-separated "u v" pairs, '#' comment lines. Duplicates collapsed,
// self-loops dropped; both counted.
IngestReport ingest_edge_list(const std::string& path);

// Erase parallel edges and self-loops.
Graph simplify(const Graph& g);

// Degree-sequence file: one integer per line.
std::vector<std::uint32_t> read_degree_file(const std::string& path);

}  // namespace bperc
