#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "bperc/cascade.hpp"
#include "bperc/criticality.hpp"
#include "bperc/graph_models.hpp"

namespace bperc {

// Degree-dependent (or constant) integer activation threshold.
struct ThresholdRule {
    enum class Kind { Constant, Log2, Sqrt } kind = Kind::Constant;
    std::uint32_t r = 2;

    std::uint32_t operator()(std::uint32_t d) const;
    std::string name() const;
    static ThresholdRule parse(const std::string& text);  // "const:<r>" | "log2" | "sqrt"
};

enum class Engine { Auto, NodeProcess, EdgeProcess, Generations };

struct SweepPlan {
    GraphSpec graph = ErImplicit{1000, 0.01};
    // exactly one of the two must be set
    std::optional<InfluenceSpec> influence;
    std::optional<ThresholdRule> rule;

    std::vector<std::uint64_t> grid;  // seed counts, strictly increasing
    std::uint32_t runs = 200;
    std::uint64_t master_seed = 1;
    bool fresh_graph = true;  // redraw graph, seeds and randomness every run
    bool simplify_graph = false;  // erase parallel edges/self-loops (comparison runs)
    Engine engine = Engine::Auto;
    BlockSchedule schedule = BlockSchedule::GlobalUniform;
    unsigned workers = 0;      // 0 = hardware concurrency
    double work_budget = 0.0;  // estimated elementary ops; 0 disables the check

    std::string describe() const;  // resolved configuration, for echoing
};

struct SweepPoint {
    std::uint64_t a = 0;
    double mean_fraction = 0.0;
    double stddev = 0.0;
    std::uint32_t runs = 0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::uint64_t node_count = 0;
    std::optional<CriticalPrediction> prediction;
    std::optional<double> transition;  // 0.5-crossing estimate when bracketed
    std::vector<std::string> warnings;
};

// Monte-Carlo sweep over the seed grid. Deterministic for a fixed plan
// (including master_seed) regardless of worker count: every run draws from
// a stream derived from (master_seed, point, run) and aggregation order is
// fixed.
SweepResult run_sweep(const SweepPlan& plan);

// One cascade under the plan's engine resolution, rng stream derived from
// (master_seed, 0, run_index). Used by the simulate CLI.
CascadeOutcome run_single(const SweepPlan& plan, const SeedSpec& seeds, std::uint64_t run_index,
                          bool trajectory);

// First 0.5-crossing of the mean-fraction curve, interpolated in log a.
// Throws NoTransitionError when the curve never brackets 1/2.
double locate_transition(const SweepResult& result);

// Bisects the bracketing interval `levels` times with `runs` extra cascades
// at each geometric midpoint, inserting the new points into `result`.
double refine_transition(const SweepPlan& plan, SweepResult& result, int levels,
                         std::uint32_t runs);

struct AllocationOutcome {
    std::vector<std::uint64_t> allocation;
    double mean_fraction = 0.0;
    double std_error = 0.0;
    std::vector<double> mean_fraction_by_community;
};

struct PlacementResult {
    std::vector<AllocationOutcome> rows;
    std::size_t best_allocation = 0;        // by mean fraction
    std::size_t argmax_community = 0;       // argmax n_k p_kk^r
    bool argmax_allocation_dominates = false;  // single-community allocation in
                                               // argmax community beats all rows
                                               // by >= 3 pooled std errors
};

// Mean final fraction per seed allocation on a block model, all allocations
// sharing the total seed budget.
PlacementResult seed_placement_experiment(const BlockModel& spec, const InfluenceSpec& influence,
                                          const std::vector<std::vector<std::uint64_t>>& allocations,
                                          std::uint32_t runs, std::uint64_t master_seed,
                                          unsigned workers = 0);

// CSV: one '#' metadata line, a header, then one row per grid point.
void write_csv(std::ostream& os, const SweepPlan& plan, const SweepResult& result);

// "key = value" sections mirroring SweepPlan; parse errors carry line numbers.
SweepPlan parse_plan_file(const std::string& path);
SweepPlan parse_plan_text(const std::string& text, const std::string& origin);

// log-spaced integer grid (deduplicated, endpoints included)
std::vector<std::uint64_t> log_grid(std::uint64_t lo, std::uint64_t hi, std::size_t count);

}  // namespace bperc
