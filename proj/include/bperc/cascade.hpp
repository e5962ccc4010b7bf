#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "bperc/graph.hpp"
#include "bperc/influence.hpp"
#include "bperc/rng.hpp"

namespace bperc {

// How the initially active set is chosen.
struct UniformCount {
    std::uint64_t a;
};
struct PerCommunity {
    std::vector<std::uint64_t> counts;
};
struct ExplicitSeeds {
    std::vector<NodeId> nodes;
};
using SeedSpec = std::variant<UniformCount, PerCommunity, ExplicitSeeds>;

std::vector<NodeId> draw_seeds(const Graph& g, const SeedSpec& spec, Rng& rng);

// One draw of the random environment on a fixed graph: a threshold per node,
// a weight per edge id. Engines run on a shared Realization so their final
// active sets can be compared point-for-point.
struct Realization {
    std::vector<double> thresholds;
    std::vector<double> weights;
    bool sequential = false;  // any negative weight: active-forever semantics
};

Realization draw_realization(const Graph& g, const InfluenceSpec& spec, Rng& rng);

struct CascadeOutcome {
    std::uint64_t final_active = 0;  // A*
    std::uint64_t steps = 0;         // T (node/edge uses, or generation rounds)
    std::vector<std::uint64_t> per_community_active;
    std::uint64_t marks_distributed = 0;
    std::uint64_t rng_seed = 0;  // echo, set by the caller
    // sampled (t, usable count) pairs
    std::optional<std::vector<std::pair<std::uint64_t, std::uint64_t>>> trajectory;
    // per-node active flags, recorded on request (oracle-equivalence checks)
    std::optional<std::vector<char>> active_set;

    double fraction(std::uint64_t n) const {
        return n == 0 ? 0.0 : static_cast<double>(final_active) / static_cast<double>(n);
    }
};

struct RunOptions {
    bool record_trajectory = false;
    bool record_active_set = false;
};

// Generation-by-generation least fixed point: activate every inactive node
// whose active-neighbor weight sum reaches its threshold, repeat until no
// change. Nonnegative weights only; this is the correctness oracle.
CascadeOutcome run_generations(const Graph& g, const Realization& real,
                               const std::vector<NodeId>& seeds, const RunOptions& opts = {});

// Integer-mark specialization of run_generations for unit weights: the
// bootstrap fixed point with per-node thresholds, no realization arrays.
// Identical final set as the node and edge processes (oracle equivalence).
CascadeOutcome run_generations_bootstrap(const Graph& g,
                                         const std::vector<std::uint32_t>& thresholds,
                                         const std::vector<NodeId>& seeds,
                                         const RunOptions& opts = {});

// Node-at-a-time process: each step one usable active node is selected
// uniformly, fires each incident edge once toward targets that are still
// inactive, counters accumulate atomically, activation is permanent.
// A* = T on termination.
CascadeOutcome run_node_process(const Graph& g, const Realization& real,
                                const std::vector<NodeId>& seeds, Rng& rng,
                                const RunOptions& opts = {});

// Same process over implicit G(n,p): edges out of the used node toward
// inactive nodes are revealed as independent Bernoulli(p) at use time.
// Seeds are nodes 0..a-1 (node labels are exchangeable here).
CascadeOutcome run_node_process_implicit(std::uint64_t n, double p, const InfluenceSpec& spec,
                                         std::uint64_t seed_count, Rng& rng,
                                         const RunOptions& opts = {});

struct EdgeProcessOptions {
    bool record_trajectory = false;
    bool record_active_set = false;
    // Replace the seed-to-nonseed initial usable set with this many targets
    // drawn uniformly over end-of-edges (degree-proportional).
    std::optional<std::uint64_t> initial_edge_override;
};

// Edge-at-a-time process for unit weights and integer thresholds >= 2:
// each step consumes one usable edge chosen uniformly, marking its target
// if still inactive; a node activating at r marks contributes its edges
// toward currently inactive neighbors.
CascadeOutcome run_edge_process(const Graph& g, const std::vector<std::uint32_t>& thresholds,
                                const std::vector<NodeId>& seeds, Rng& rng,
                                const EdgeProcessOptions& opts = {});

inline std::vector<std::uint32_t> threshold_rule_table(const Graph& g,
                                                       const std::function<std::uint32_t(
                                                           std::uint32_t)>& r_of_d) {
    std::vector<std::uint32_t> r(g.node_count);
    for (std::uint64_t v = 0; v < g.node_count; ++v)
        r[v] = r_of_d(static_cast<std::uint32_t>(g.degree(static_cast<NodeId>(v))));
    return r;
}

enum class BlockSchedule {
    Paired,         // one usable node per community per step, simultaneously
    GlobalUniform,  // single node per step, uniform among all usable
};

// Node process on a community-labelled graph, tracking per-community used
// and active counts. For nonnegative weights the final active set is
// schedule-independent and equals run_generations.
CascadeOutcome run_block_process(const Graph& g, const Realization& real,
                                 const std::vector<NodeId>& seeds, Rng& rng, BlockSchedule schedule,
                                 const RunOptions& opts = {});

}  // namespace bperc
