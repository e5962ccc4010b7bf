#include "bperc/cascade.hpp"

#include <algorithm>
#include <cassert>

#include "bperc/errors.hpp"

namespace bperc {

namespace {

// (t, usable-count) samples, decimated to a bounded point count.
class TrajectoryRecorder {
public:
    explicit TrajectoryRecorder(bool enabled) : enabled_(enabled) {}

    void record(std::uint64_t t, std::uint64_t usable) {
        if (!enabled_ || (t % stride_) != 0) return;
        points_.emplace_back(t, usable);
        if (points_.size() >= kMaxPoints) {
            std::vector<std::pair<std::uint64_t, std::uint64_t>> kept;
            kept.reserve(kMaxPoints / 2);
            for (std::size_t i = 0; i < points_.size(); i += 2) kept.push_back(points_[i]);
            points_.swap(kept);
            stride_ *= 2;
        }
    }

    void finish(CascadeOutcome& out) {
        if (enabled_) out.trajectory = std::move(points_);
    }

private:
    static constexpr std::size_t kMaxPoints = 2048;
    bool enabled_;
    std::uint64_t stride_ = 1;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> points_;
};

std::vector<std::uint64_t> per_community_counts(const Graph& g, const std::vector<char>& active) {
    std::vector<std::uint64_t> counts(g.community_count(), 0);
    for (std::uint64_t v = 0; v < g.node_count; ++v)
        if (active[v]) ++counts[g.community_of(static_cast<NodeId>(v))];
    return counts;
}

void check_seeds(std::uint64_t n, const std::vector<NodeId>& seeds) {
    if (seeds.size() > n) throw SpecError("seed count exceeds node count");
    for (NodeId s : seeds)
        if (s >= n) throw SpecError("seed id out of range: " + std::to_string(s));
}

}  // namespace

std::vector<NodeId> draw_seeds(const Graph& g, const SeedSpec& spec, Rng& rng) {
    return std::visit(
        [&](const auto& s) -> std::vector<NodeId> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, UniformCount>) {
                if (s.a > g.node_count) throw SpecError("seed count exceeds graph size");
                return sample_without_replacement(rng, g.node_count, s.a);
            } else if constexpr (std::is_same_v<T, PerCommunity>) {
                const std::uint32_t k = g.community_count();
                if (s.counts.size() != k)
                    throw SpecError("per-community seed list has " +
                                    std::to_string(s.counts.size()) + " entries, graph has " +
                                    std::to_string(k) + " communities");
                std::vector<std::vector<NodeId>> members(k);
                for (std::uint64_t v = 0; v < g.node_count; ++v)
                    members[g.community_of(static_cast<NodeId>(v))].push_back(
                        static_cast<NodeId>(v));
                std::vector<NodeId> seeds;
                for (std::uint32_t c = 0; c < k; ++c) {
                    if (s.counts[c] > members[c].size())
                        throw SpecError("community " + std::to_string(c) + " has " +
                                        std::to_string(members[c].size()) + " nodes, asked for " +
                                        std::to_string(s.counts[c]) + " seeds");
                    for (std::uint32_t idx :
                         sample_without_replacement(rng, members[c].size(), s.counts[c]))
                        seeds.push_back(members[c][idx]);
                }
                return seeds;
            } else {
                std::vector<NodeId> seeds = s.nodes;
                std::vector<NodeId> sorted = seeds;
                std::sort(sorted.begin(), sorted.end());
                if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                    throw SpecError("explicit seed list contains duplicates");
                check_seeds(g.node_count, seeds);
                return seeds;
            }
        },
        spec);
}

Realization draw_realization(const Graph& g, const InfluenceSpec& spec, Rng& rng) {
    Realization real;
    real.sequential = spec.sequential_semantics;
    real.thresholds.resize(g.node_count);
    for (auto& r : real.thresholds) r = spec.threshold.sample(rng);
    real.weights.resize(g.edge_count);
    for (auto& w : real.weights) w = spec.weight.sample(rng);
    return real;
}

CascadeOutcome run_generations(const Graph& g, const Realization& real,
                               const std::vector<NodeId>& seeds, const RunOptions& opts) {
    if (real.sequential)
        throw SpecError("run_generations needs nonnegative weights (order-dependent otherwise; "
                        "use run_node_process)");
    check_seeds(g.node_count, seeds);

    std::vector<char> active(g.node_count, 0);
    std::vector<double> counter(g.node_count, 0.0);
    std::vector<NodeId> frontier;
    for (NodeId s : seeds)
        if (!active[s]) {
            active[s] = 1;
            frontier.push_back(s);
        }

    CascadeOutcome out;
    out.final_active = frontier.size();
    std::vector<NodeId> next;
    while (!frontier.empty()) {
        next.clear();
        for (NodeId u : frontier) {
            const auto nbrs = g.neighbors_of(u);
            const auto eids = g.edges_of(u);
            for (std::size_t i = 0; i < nbrs.size(); ++i) {
                const NodeId v = nbrs[i];
                if (active[v]) continue;
                counter[v] += real.weights[eids[i]];
                ++out.marks_distributed;
                if (counter[v] >= real.thresholds[v]) {
                    active[v] = 1;
                    next.push_back(v);
                }
            }
        }
        // nodes flagged this round form the next generation
        if (!next.empty()) ++out.steps;
        out.final_active += next.size();
        frontier.swap(next);
    }
    out.per_community_active = per_community_counts(g, active);
    if (opts.record_active_set) out.active_set = std::move(active);
    return out;
}

CascadeOutcome run_generations_bootstrap(const Graph& g,
                                         const std::vector<std::uint32_t>& thresholds,
                                         const std::vector<NodeId>& seeds,
                                         const RunOptions& opts) {
    if (thresholds.size() != g.node_count)
        throw SpecError("bootstrap generations: threshold table size mismatch");
    check_seeds(g.node_count, seeds);
    std::vector<char> active(g.node_count, 0);
    std::vector<std::uint32_t> marks(g.node_count, 0);
    std::vector<NodeId> frontier, next;
    for (NodeId s : seeds)
        if (!active[s]) {
            active[s] = 1;
            frontier.push_back(s);
        }

    CascadeOutcome out;
    out.final_active = frontier.size();
    while (!frontier.empty()) {
        next.clear();
        for (NodeId u : frontier) {
            for (NodeId v : g.neighbors_of(u)) {
                if (active[v]) continue;
                ++marks[v];
                ++out.marks_distributed;
                if (marks[v] >= thresholds[v]) {
                    active[v] = 1;
                    next.push_back(v);
                }
            }
        }
        if (!next.empty()) ++out.steps;
        out.final_active += next.size();
        frontier.swap(next);
    }
    out.per_community_active = per_community_counts(g, active);
    if (opts.record_active_set) out.active_set = std::move(active);
    return out;
}

CascadeOutcome run_node_process(const Graph& g, const Realization& real,
                                const std::vector<NodeId>& seeds, Rng& rng,
                                const RunOptions& opts) {
    check_seeds(g.node_count, seeds);
    std::vector<char> active(g.node_count, 0);
    std::vector<double> counter(g.node_count, 0.0);
    std::vector<NodeId> usable;
    usable.reserve(seeds.size());
    for (NodeId s : seeds) {
        active[s] = 1;
        usable.push_back(s);
    }

    CascadeOutcome out;
    TrajectoryRecorder traj(opts.record_trajectory);
    std::vector<std::pair<NodeId, EdgeId>> scratch;
    while (!usable.empty()) {
        traj.record(out.steps, usable.size());
        const std::size_t pick = rng.index(usable.size());
        const NodeId z = usable[pick];
        usable[pick] = usable.back();
        usable.pop_back();
        ++out.steps;

        const auto nbrs = g.neighbors_of(z);
        const auto eids = g.edges_of(z);
        if (real.sequential) {
            // atomic per-edge influences in randomized order: with negative
            // weights the within-step order across parallel edges matters
            scratch.clear();
            for (std::size_t i = 0; i < nbrs.size(); ++i)
                if (!active[nbrs[i]]) scratch.emplace_back(nbrs[i], eids[i]);
            rng.shuffle(scratch);
            for (const auto& [v, e] : scratch) {
                if (active[v]) continue;  // activated earlier this step
                counter[v] += real.weights[e];
                ++out.marks_distributed;
                if (counter[v] >= real.thresholds[v]) {
                    active[v] = 1;
                    usable.push_back(v);
                }
            }
        } else {
            for (std::size_t i = 0; i < nbrs.size(); ++i) {
                const NodeId v = nbrs[i];
                if (active[v]) continue;
                counter[v] += real.weights[eids[i]];
                ++out.marks_distributed;
                if (counter[v] >= real.thresholds[v]) {
                    active[v] = 1;
                    usable.push_back(v);
                }
            }
        }
    }
    out.final_active = out.steps;  // every active node was used exactly once
    assert(out.final_active ==
           static_cast<std::uint64_t>(std::count(active.begin(), active.end(), 1)));
    out.per_community_active = per_community_counts(g, active);
    if (opts.record_active_set) out.active_set = std::move(active);
    traj.finish(out);
    return out;
}

CascadeOutcome run_node_process_implicit(std::uint64_t n, double p, const InfluenceSpec& spec,
                                         std::uint64_t seed_count, Rng& rng,
                                         const RunOptions& opts) {
    if (seed_count > n) throw SpecError("seed count exceeds n");
    if (!(p >= 0.0 && p <= 1.0)) throw SpecError("p outside [0,1]");

    // inactive[0..U) lists nodes never activated; per-node state is indexed
    // by node - seed_count. Thresholds are drawn lazily at the first mark.
    const std::uint64_t inactive_n = n - seed_count;
    std::vector<NodeId> inactive(inactive_n);
    for (std::uint64_t i = 0; i < inactive_n; ++i)
        inactive[i] = static_cast<NodeId>(seed_count + i);
    std::vector<double> counter(inactive_n, 0.0);
    std::vector<double> threshold(inactive_n, 0.0);
    std::vector<char> touched(inactive_n, 0);

    std::vector<NodeId> usable(seed_count);
    for (std::uint64_t i = 0; i < seed_count; ++i) usable[i] = static_cast<NodeId>(i);

    CascadeOutcome out;
    TrajectoryRecorder traj(opts.record_trajectory);
    std::vector<std::uint32_t> newly_active;  // positions, ascending
    const bool unit_weight = spec.weight.size() == 1;
    const double w0 = spec.weight.atoms()[0].value;

    while (!usable.empty()) {
        traj.record(out.steps, usable.size());
        const std::size_t pick = rng.index(usable.size());
        usable[pick] = usable.back();
        usable.pop_back();
        ++out.steps;

        // reveal this node's edges toward still-inactive nodes
        newly_active.clear();
        for (BernoulliScan scan(rng, inactive.size(), p); !scan.done(); scan.step()) {
            const auto pos = static_cast<std::uint32_t>(scan.value());
            const std::uint64_t slot = inactive[pos] - seed_count;
            if (!touched[slot]) {
                threshold[slot] = spec.threshold.sample(rng);
                touched[slot] = 1;
            }
            counter[slot] += unit_weight ? w0 : spec.weight.sample(rng);
            ++out.marks_distributed;
            if (counter[slot] >= threshold[slot]) newly_active.push_back(pos);
        }
        // removals deferred to keep scan positions valid; descending order
        // so each swap-remove only disturbs higher slots
        for (auto it = newly_active.rbegin(); it != newly_active.rend(); ++it) {
            const std::uint32_t pos = *it;
            usable.push_back(inactive[pos]);
            inactive[pos] = inactive.back();
            inactive.pop_back();
        }
    }
    out.final_active = out.steps;
    out.per_community_active = {out.final_active};
    traj.finish(out);
    return out;
}

CascadeOutcome run_edge_process(const Graph& g, const std::vector<std::uint32_t>& thresholds,
                                const std::vector<NodeId>& seeds, Rng& rng,
                                const EdgeProcessOptions& opts) {
    if (thresholds.size() != g.node_count)
        throw SpecError("edge process: threshold table size mismatch");
    for (std::uint64_t v = 0; v < g.node_count; ++v)
        if (thresholds[v] < 2)
            throw SpecError("edge process: threshold below 2 at node " + std::to_string(v) +
                            " (single-edge activation is the degenerate case)");
    check_seeds(g.node_count, seeds);

    std::vector<char> active(g.node_count, 0);
    std::vector<std::uint32_t> marks(g.node_count, 0);
    for (NodeId s : seeds) active[s] = 1;

    std::vector<NodeId> usable_edges;  // target endpoints of usable edges
    if (opts.initial_edge_override) {
        // degree-proportional targets: a uniform adjacency slot names its
        // neighbor with multiplicity equal to that neighbor's degree
        for (std::uint64_t k = 0; k < *opts.initial_edge_override; ++k)
            usable_edges.push_back(g.neighbors[rng.index(g.neighbors.size())]);
    } else {
        for (NodeId s : seeds)
            for (NodeId v : g.neighbors_of(s))
                if (!active[v]) usable_edges.push_back(v);
    }

    CascadeOutcome out;
    TrajectoryRecorder traj(opts.record_trajectory);
    while (!usable_edges.empty()) {
        traj.record(out.steps, usable_edges.size());
        const std::size_t pick = rng.index(usable_edges.size());
        const NodeId target = usable_edges[pick];
        usable_edges[pick] = usable_edges.back();
        usable_edges.pop_back();
        ++out.steps;
        if (active[target]) continue;  // endpoint activated since the edge became usable
        ++marks[target];
        ++out.marks_distributed;
        if (marks[target] >= thresholds[target]) {
            active[target] = 1;
            for (NodeId v : g.neighbors_of(target))
                if (!active[v]) usable_edges.push_back(v);
        }
    }
    out.final_active = std::count(active.begin(), active.end(), 1);
    out.per_community_active = per_community_counts(g, active);
    if (opts.record_active_set) out.active_set = std::move(active);
    traj.finish(out);
    return out;
}

CascadeOutcome run_block_process(const Graph& g, const Realization& real,
                                 const std::vector<NodeId>& seeds, Rng& rng,
                                 BlockSchedule schedule, const RunOptions& opts) {
    if (g.community.empty())
        throw SpecError("block process requires community labels");
    check_seeds(g.node_count, seeds);
    const std::uint32_t k = g.community_count();

    std::vector<char> active(g.node_count, 0);
    std::vector<double> counter(g.node_count, 0.0);
    std::vector<std::vector<NodeId>> usable(k);
    std::uint64_t usable_total = 0;
    for (NodeId s : seeds)
        if (!active[s]) {
            active[s] = 1;
            usable[g.community_of(s)].push_back(s);
            ++usable_total;
        }

    CascadeOutcome out;
    TrajectoryRecorder traj(opts.record_trajectory);
    std::vector<std::pair<NodeId, EdgeId>> scratch;
    std::vector<NodeId> fired;

    auto fire = [&](NodeId z) {
        const auto nbrs = g.neighbors_of(z);
        const auto eids = g.edges_of(z);
        if (real.sequential) {
            scratch.clear();
            for (std::size_t i = 0; i < nbrs.size(); ++i)
                if (!active[nbrs[i]]) scratch.emplace_back(nbrs[i], eids[i]);
            rng.shuffle(scratch);
            for (const auto& [v, e] : scratch) {
                if (active[v]) continue;
                counter[v] += real.weights[e];
                ++out.marks_distributed;
                if (counter[v] >= real.thresholds[v]) {
                    active[v] = 1;
                    usable[g.community_of(v)].push_back(v);
                    ++usable_total;
                }
            }
        } else {
            for (std::size_t i = 0; i < nbrs.size(); ++i) {
                const NodeId v = nbrs[i];
                if (active[v]) continue;
                counter[v] += real.weights[eids[i]];
                ++out.marks_distributed;
                if (counter[v] >= real.thresholds[v]) {
                    active[v] = 1;
                    usable[g.community_of(v)].push_back(v);
                    ++usable_total;
                }
            }
        }
    };

    while (usable_total > 0) {
        traj.record(out.steps, usable_total);
        ++out.steps;
        if (schedule == BlockSchedule::GlobalUniform) {
            // pick uniformly over the union of the per-community pools
            std::uint64_t flat = rng.below(usable_total);
            for (std::uint32_t c = 0; c < k; ++c) {
                if (flat < usable[c].size()) {
                    const NodeId z = usable[c][flat];
                    usable[c][flat] = usable[c].back();
                    usable[c].pop_back();
                    --usable_total;
                    fire(z);
                    break;
                }
                flat -= usable[c].size();
            }
        } else {
            // one node per community per step, communities in index order
            fired.clear();
            for (std::uint32_t c = 0; c < k; ++c) {
                if (usable[c].empty()) continue;
                const std::size_t pick = rng.index(usable[c].size());
                fired.push_back(usable[c][pick]);
                usable[c][pick] = usable[c].back();
                usable[c].pop_back();
                --usable_total;
            }
            for (NodeId z : fired) fire(z);
        }
    }
    out.final_active = std::count(active.begin(), active.end(), 1);
    out.per_community_active = per_community_counts(g, active);
    if (opts.record_active_set) out.active_set = std::move(active);
    traj.finish(out);
    return out;
}

}  // namespace bperc
