#include "bperc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "bperc/errors.hpp"

namespace bperc {

namespace {

// salts for derived rng streams; grid points use their own index
constexpr std::uint64_t kGraphSalt = 0x0000000100000000ULL;
constexpr std::uint64_t kRefineSalt = 0x0000000200000000ULL;
constexpr std::uint64_t kPlacementSalt = 0x0000000300000000ULL;

void parallel_tasks(unsigned workers, std::size_t count,
                    const std::function<void(std::size_t)>& fn) {
    if (workers == 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        workers = hw == 0 ? 1 : hw;
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

InfluenceSpec basic_influence(std::uint32_t r) {
    return InfluenceSpec::make(DiscreteDistribution::constant(static_cast<double>(r)),
                               DiscreteDistribution::constant(1.0));
}

}  // namespace

std::uint32_t ThresholdRule::operator()(std::uint32_t d) const {
    switch (kind) {
        case Kind::Constant: return r;
        case Kind::Log2:
            return std::max<std::uint32_t>(
                2, static_cast<std::uint32_t>(std::ceil(std::log2(std::max(1u, d)))));
        case Kind::Sqrt:
            return std::max<std::uint32_t>(
                2, static_cast<std::uint32_t>(std::ceil(std::sqrt(static_cast<double>(d)))));
    }
    return 2;
}

std::string ThresholdRule::name() const {
    switch (kind) {
        case Kind::Constant: return "const:" + std::to_string(r);
        case Kind::Log2: return "log2";
        case Kind::Sqrt: return "sqrt";
    }
    return "?";
}

ThresholdRule ThresholdRule::parse(const std::string& text) {
    if (text == "log2") return {Kind::Log2, 0};
    if (text == "sqrt") return {Kind::Sqrt, 0};
    if (text.rfind("const:", 0) == 0) {
        const long r = std::strtol(text.c_str() + 6, nullptr, 10);
        if (r < 2) throw SpecError("threshold rule: r must be >= 2");
        return {Kind::Constant, static_cast<std::uint32_t>(r)};
    }
    throw SpecError("unknown threshold rule '" + text + "' (const:<r> | log2 | sqrt)");
}

namespace {

enum class Mode { ImplicitNode, ExplicitNode, ExplicitEdge, ExplicitFast, Block, Generations };

struct SweepContext {
    const SweepPlan* plan = nullptr;
    std::uint64_t n = 0;
    Mode mode = Mode::ImplicitNode;
    std::optional<InfluenceSpec> influence;  // resolved (const rules become specs)
    std::optional<ThresholdRule> rule;       // only for edge mode
    std::optional<Graph> shared_graph;
    std::optional<CriticalPrediction> prediction;
    std::vector<std::string> warnings;
    double est_edges_per_run = 0.0;
};

DegreeDistribution spec_degree_distribution(const GraphSpec& spec, const Graph* shared) {
    if (const auto* cm = std::get_if<ConfigModel>(&spec)) {
        DegreeSequence seq{cm->degrees};
        return seq.empirical();
    }
    if (const auto* pl = std::get_if<PowerLawConfig>(&spec))
        return powerlaw_degree_sequence(pl->n, pl->beta, pl->d_min, pl->d_max).empirical();
    if (shared) {
        DegreeSequence seq{shared->degree_sequence()};
        return seq.empirical();
    }
    throw SpecError("no degree distribution available for this graph spec");
}

SweepContext prepare(const SweepPlan& plan) {
    if (plan.grid.empty()) throw SpecError("sweep grid is empty");
    for (std::size_t i = 0; i < plan.grid.size(); ++i) {
        if (plan.grid[i] < 1) throw SpecError("grid entries must be >= 1");
        if (i > 0 && plan.grid[i] <= plan.grid[i - 1])
            throw SpecError("grid must be strictly increasing");
    }
    if (plan.runs < 1) throw SpecError("runs must be >= 1");
    if (plan.influence.has_value() == plan.rule.has_value())
        throw SpecError("exactly one of influence spec / threshold rule must be given");
    validate(plan.graph);

    SweepContext ctx;
    ctx.plan = &plan;
    ctx.influence = plan.influence;
    ctx.rule = plan.rule;
    if (ctx.rule && ctx.rule->kind == ThresholdRule::Kind::Constant && !ctx.influence)
        ctx.influence = basic_influence(ctx.rule->r);

    const bool is_implicit = std::holds_alternative<ErImplicit>(plan.graph);
    const bool is_block = std::holds_alternative<BlockModel>(plan.graph);
    const bool is_edgelist = std::holds_alternative<FromEdgeList>(plan.graph);

    // materialize shared graphs: fixed input graphs always, generated graphs
    // when fresh_graph is off
    if (plan.simplify_graph && is_implicit)
        throw SpecError("simplify applies to materialized graphs only");
    if (is_edgelist) {
        if (plan.fresh_graph)
            ctx.warnings.push_back("edge-list graph is a fixed input; fresh_graph ignored");
        Rng rng(derive_stream(plan.master_seed, kGraphSalt, 0));
        ctx.shared_graph = generate(plan.graph, rng);
        if (plan.simplify_graph) ctx.shared_graph = simplify(*ctx.shared_graph);
    } else if (!plan.fresh_graph && !is_implicit) {
        Rng rng(derive_stream(plan.master_seed, kGraphSalt, 0));
        ctx.shared_graph = generate(plan.graph, rng);
        if (plan.simplify_graph) ctx.shared_graph = simplify(*ctx.shared_graph);
    }
    ctx.n = ctx.shared_graph ? ctx.shared_graph->node_count : spec_node_count(plan.graph);
    for (std::uint64_t a : plan.grid)
        if (a > ctx.n) throw SpecError("grid seed count exceeds node count");

    // engine resolution
    if (is_implicit) {
        if (!ctx.influence)
            throw SpecError("implicit G(n,p) needs an influence spec (or a constant rule)");
        if (plan.engine == Engine::EdgeProcess || plan.engine == Engine::Generations)
            throw SpecError("implicit G(n,p) supports only the node process");
        ctx.mode = Mode::ImplicitNode;
    } else if (is_block) {
        if (!ctx.influence)
            throw SpecError("block sweeps need an influence spec or a constant rule");
        ctx.mode = Mode::Block;
    } else {
        switch (plan.engine) {
            case Engine::Auto:
                // unit weights, integer thresholds: the final set is engine
                // independent, so sweeps take the fixed-point engine
                ctx.mode = (ctx.rule || (ctx.influence && ctx.influence->is_basic_bootstrap()))
                               ? Mode::ExplicitFast
                               : Mode::ExplicitNode;
                break;
            case Engine::NodeProcess: ctx.mode = Mode::ExplicitNode; break;
            case Engine::EdgeProcess: ctx.mode = Mode::ExplicitEdge; break;
            case Engine::Generations: ctx.mode = Mode::Generations; break;
        }
        if ((ctx.mode == Mode::ExplicitEdge || ctx.mode == Mode::ExplicitFast) && !ctx.rule &&
            !(ctx.influence && ctx.influence->is_basic_bootstrap()))
            throw SpecError("edge process needs unit weights and integer thresholds");
        if ((ctx.mode == Mode::ExplicitNode || ctx.mode == Mode::Generations) && !ctx.influence)
            throw SpecError("node process needs an influence spec");
    }

    // attached prediction (best effort; failures degrade to a warning)
    try {
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, ErImplicit> || std::is_same_v<T, ErExplicit>) {
                    if (ctx.influence)
                        ctx.prediction =
                            critical_gnp(static_cast<double>(s.n), s.p,
                                         activation_profile(*ctx.influence));
                    ctx.est_edges_per_run = 0.5 * static_cast<double>(s.n) *
                                            static_cast<double>(s.n) * s.p;
                } else if constexpr (std::is_same_v<T, GnM>) {
                    if (ctx.rule && ctx.rule->kind == ThresholdRule::Kind::Constant)
                        ctx.prediction = critical_gnm(static_cast<double>(s.n),
                                                      static_cast<double>(s.m), ctx.rule->r);
                    ctx.est_edges_per_run = static_cast<double>(s.m);
                } else if constexpr (std::is_same_v<T, ConfigModel> ||
                                     std::is_same_v<T, PowerLawConfig> ||
                                     std::is_same_v<T, FromEdgeList>) {
                    const auto pd = spec_degree_distribution(ctx.plan->graph,
                                                             ctx.shared_graph ? &*ctx.shared_graph
                                                                              : nullptr);
                    if (ctx.rule) {
                        if (ctx.rule->kind == ThresholdRule::Kind::Constant)
                            ctx.prediction = critical_config(static_cast<double>(ctx.n), pd,
                                                             static_cast<int>(ctx.rule->r));
                        else
                            ctx.prediction = critical_config_numeric(
                                static_cast<double>(ctx.n), pd,
                                [rule = *ctx.rule](std::uint32_t d) { return rule(d); });
                    }
                    double dbar = 0.0;
                    for (const auto& [d, p] : pd) dbar += static_cast<double>(d) * p;
                    ctx.est_edges_per_run = 0.5 * dbar * static_cast<double>(ctx.n);
                } else if constexpr (std::is_same_v<T, BlockModel>) {
                    if (ctx.rule && ctx.rule->kind == ThresholdRule::Kind::Constant) {
                        const SeedBounds bounds =
                            block_seed_bounds(s.sizes, s.p, static_cast<int>(ctx.rule->r), 0.0);
                        CriticalPrediction p;
                        p.model = "block";
                        p.variant = "block-uniform-seeding";
                        p.rho_star = static_cast<int>(ctx.rule->r);
                        p.q_rho_star = 1.0;
                        p.a_c = bounds.uniform_bound;
                        p.t_c = std::numeric_limits<double>::quiet_NaN();
                        ctx.prediction = p;
                    } else if (ctx.influence && ctx.influence->is_basic_bootstrap() &&
                               ctx.influence->threshold.size() == 1) {
                        const int r = static_cast<int>(ctx.influence->threshold.min_value());
                        const SeedBounds bounds = block_seed_bounds(s.sizes, s.p, r, 0.0);
                        CriticalPrediction p;
                        p.model = "block";
                        p.variant = "block-uniform-seeding";
                        p.rho_star = r;
                        p.q_rho_star = 1.0;
                        p.a_c = bounds.uniform_bound;
                        p.t_c = std::numeric_limits<double>::quiet_NaN();
                        ctx.prediction = p;
                    }
                    double pairs = 0.0;
                    for (std::size_t i = 0; i < s.sizes.size(); ++i)
                        for (std::size_t j = i; j < s.sizes.size(); ++j) {
                            const double cnt = i == j ? 0.5 * static_cast<double>(s.sizes[i]) *
                                                            static_cast<double>(s.sizes[i] - 1)
                                                      : static_cast<double>(s.sizes[i]) *
                                                            static_cast<double>(s.sizes[j]);
                            pairs += cnt * s.p[i][j];
                        }
                    ctx.est_edges_per_run = pairs;
                }
            },
            plan.graph);
    } catch (const std::exception& e) {
        ctx.warnings.push_back(std::string("no analytic prediction: ") + e.what());
    }

    const double runs_total =
        static_cast<double>(plan.grid.size()) * static_cast<double>(plan.runs);
    const double estimate =
        runs_total * (static_cast<double>(ctx.n) + 2.0 * ctx.est_edges_per_run);
    if (plan.work_budget > 0.0 && estimate > plan.work_budget)
        throw BudgetError("estimated work " + fmt(estimate) + " elementary ops exceeds budget " +
                          fmt(plan.work_budget));
    if (estimate > 2e11)
        warn("sweep estimate is " + fmt(estimate) + " elementary ops; this will take a while");
    return ctx;
}

// one cascade
CascadeOutcome execute_run(const SweepContext& ctx, const SeedSpec& seed_spec, Rng& rng,
                           bool trajectory = false) {
    const SweepPlan& plan = *ctx.plan;
    const RunOptions opts{trajectory};
    if (ctx.mode == Mode::ImplicitNode) {
        const auto* count = std::get_if<UniformCount>(&seed_spec);
        if (!count)
            throw SpecError("implicit G(n,p) runs take a uniform seed count");
        const auto& er = std::get<ErImplicit>(plan.graph);
        return run_node_process_implicit(er.n, er.p, *ctx.influence, count->a, rng, opts);
    }
    const bool needs_edge_ids =
        ctx.mode == Mode::ExplicitNode || ctx.mode == Mode::Generations || ctx.mode == Mode::Block;
    const Graph* g = ctx.shared_graph ? &*ctx.shared_graph : nullptr;
    Graph fresh;
    if (!g) {
        fresh = generate(plan.graph, rng, needs_edge_ids || plan.simplify_graph);
        if (plan.simplify_graph) fresh = simplify(fresh);
        g = &fresh;
    }
    const std::vector<NodeId> seeds = draw_seeds(*g, seed_spec, rng);
    auto integer_thresholds = [&](Rng& r) {
        std::vector<std::uint32_t> thresholds;
        if (ctx.rule) {
            thresholds = threshold_rule_table(
                *g, [rule = *ctx.rule](std::uint32_t d) { return rule(d); });
        } else {
            thresholds.resize(g->node_count);
            for (auto& t : thresholds)
                t = static_cast<std::uint32_t>(ctx.influence->threshold.sample(r));
        }
        return thresholds;
    };
    switch (ctx.mode) {
        case Mode::ExplicitEdge: {
            EdgeProcessOptions eopts;
            eopts.record_trajectory = trajectory;
            return run_edge_process(*g, integer_thresholds(rng), seeds, rng, eopts);
        }
        case Mode::ExplicitFast:
            return run_generations_bootstrap(*g, integer_thresholds(rng), seeds);
        case Mode::ExplicitNode: {
            const Realization real = draw_realization(*g, *ctx.influence, rng);
            return run_node_process(*g, real, seeds, rng, opts);
        }
        case Mode::Generations: {
            const Realization real = draw_realization(*g, *ctx.influence, rng);
            return run_generations(*g, real, seeds);
        }
        case Mode::Block: {
            const Realization real = draw_realization(*g, *ctx.influence, rng);
            return run_block_process(*g, real, seeds, rng, plan.schedule, opts);
        }
        default: break;
    }
    throw SpecError("unreachable engine mode");
}

SweepPoint aggregate_point(std::uint64_t a, const std::vector<std::uint64_t>& astars,
                           std::uint64_t n) {
    SweepPoint pt;
    pt.a = a;
    pt.runs = static_cast<std::uint32_t>(astars.size());
    double sum = 0.0;
    for (std::uint64_t v : astars) sum += static_cast<double>(v) / static_cast<double>(n);
    pt.mean_fraction = sum / static_cast<double>(astars.size());
    double ss = 0.0;
    for (std::uint64_t v : astars) {
        const double d = static_cast<double>(v) / static_cast<double>(n) - pt.mean_fraction;
        ss += d * d;
    }
    pt.stddev = astars.size() > 1 ? std::sqrt(ss / static_cast<double>(astars.size() - 1)) : 0.0;
    return pt;
}

}  // namespace

SweepResult run_sweep(const SweepPlan& plan) {
    SweepContext ctx = prepare(plan);
    const std::size_t points = plan.grid.size();
    const std::size_t total = points * plan.runs;
    std::vector<std::uint64_t> astar(total);

    parallel_tasks(plan.workers, total, [&](std::size_t task) {
        const std::size_t point = task / plan.runs;
        const std::size_t run = task % plan.runs;
        Rng rng(derive_stream(plan.master_seed, point, run));
        astar[task] = execute_run(ctx, UniformCount{plan.grid[point]}, rng).final_active;
    });

    SweepResult result;
    result.node_count = ctx.n;
    result.prediction = ctx.prediction;
    result.warnings = std::move(ctx.warnings);
    for (std::size_t point = 0; point < points; ++point) {
        std::vector<std::uint64_t> slice(astar.begin() + point * plan.runs,
                                         astar.begin() + (point + 1) * plan.runs);
        result.points.push_back(aggregate_point(plan.grid[point], slice, ctx.n));
    }
    // mean fraction should be nondecreasing in a up to noise
    for (std::size_t i = 0; i + 1 < result.points.size(); ++i) {
        const auto& lo = result.points[i];
        const auto& hi = result.points[i + 1];
        const double se = std::sqrt(lo.stddev * lo.stddev / lo.runs +
                                    hi.stddev * hi.stddev / hi.runs);
        if (hi.mean_fraction < lo.mean_fraction - 3.0 * se)
            result.warnings.push_back("non-monotone mean fraction between a=" +
                                      std::to_string(lo.a) + " and a=" + std::to_string(hi.a) +
                                      " (beyond 3 pooled std errors)");
    }
    try {
        result.transition = locate_transition(result);
    } catch (const NoTransitionError&) {
        result.transition.reset();
    }
    return result;
}

CascadeOutcome run_single(const SweepPlan& plan, const SeedSpec& seeds, std::uint64_t run_index,
                          bool trajectory) {
    SweepPlan single = plan;
    if (single.grid.empty()) single.grid = {1};
    SweepContext ctx = prepare(single);
    Rng rng(derive_stream(plan.master_seed, 0, run_index));
    CascadeOutcome out = execute_run(ctx, seeds, rng, trajectory);
    out.rng_seed = derive_stream(plan.master_seed, 0, run_index);
    return out;
}

double locate_transition(const SweepResult& result) {
    const auto& pts = result.points;
    if (pts.size() < 2) throw NoTransitionError("need at least two grid points");
    bool any_below = false;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i].mean_fraction < 0.5) any_below = true;
        if (pts[i].mean_fraction < 0.5 && pts[i + 1].mean_fraction >= 0.5) {
            const double x0 = std::log(static_cast<double>(pts[i].a));
            const double x1 = std::log(static_cast<double>(pts[i + 1].a));
            const double f0 = pts[i].mean_fraction, f1 = pts[i + 1].mean_fraction;
            return std::exp(x0 + (0.5 - f0) * (x1 - x0) / (f1 - f0));
        }
    }
    if (pts.back().mean_fraction < 0.5) any_below = true;
    throw NoTransitionError(any_below ? "no transition in range: curve never reaches 0.5"
                                      : "no transition in range: curve never drops below 0.5");
}

double refine_transition(const SweepPlan& plan, SweepResult& result, int levels,
                         std::uint32_t runs) {
    SweepContext ctx = prepare(plan);
    for (int level = 0; level < levels; ++level) {
        locate_transition(result);  // throws if no bracket
        std::size_t i = 0;
        while (!(result.points[i].mean_fraction < 0.5 &&
                 result.points[i + 1].mean_fraction >= 0.5))
            ++i;
        const std::uint64_t lo = result.points[i].a, hi = result.points[i + 1].a;
        const auto mid = static_cast<std::uint64_t>(
            std::llround(std::sqrt(static_cast<double>(lo) * static_cast<double>(hi))));
        if (mid <= lo || mid >= hi) break;  // integer grid exhausted
        std::vector<std::uint64_t> astars(runs);
        parallel_tasks(plan.workers, runs, [&](std::size_t run) {
            Rng rng(derive_stream(plan.master_seed, kRefineSalt + static_cast<std::uint64_t>(level),
                                  run));
            astars[run] = execute_run(ctx, UniformCount{mid}, rng).final_active;
        });
        const SweepPoint pt = aggregate_point(mid, astars, ctx.n);
        result.points.insert(result.points.begin() + static_cast<std::ptrdiff_t>(i) + 1, pt);
    }
    const double t = locate_transition(result);
    result.transition = t;
    return t;
}

PlacementResult seed_placement_experiment(const BlockModel& spec, const InfluenceSpec& influence,
                                          const std::vector<std::vector<std::uint64_t>>& allocations,
                                          std::uint32_t runs, std::uint64_t master_seed,
                                          unsigned workers) {
    validate(GraphSpec{spec});
    if (allocations.empty()) throw SpecError("no allocations given");
    const std::size_t k = spec.sizes.size();
    std::uint64_t total = 0;
    for (std::uint64_t c : allocations[0]) total += c;
    for (const auto& alloc : allocations) {
        if (alloc.size() != k) throw SpecError("allocation arity does not match community count");
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < k; ++i) {
            if (alloc[i] > spec.sizes[i])
                throw SpecError("allocation exceeds community size");
            sum += alloc[i];
        }
        if (sum != total) throw SpecError("allocations must share one total seed count");
    }

    PlacementResult out;
    const std::uint64_t n = spec_node_count(GraphSpec{spec});
    for (std::size_t ai = 0; ai < allocations.size(); ++ai) {
        std::vector<double> fractions(runs);
        std::vector<std::vector<double>> per_comm(runs);
        parallel_tasks(workers, runs, [&](std::size_t run) {
            Rng rng(derive_stream(master_seed, kPlacementSalt + ai, run));
            Graph g = generate(GraphSpec{spec}, rng);
            const auto seeds = draw_seeds(g, PerCommunity{allocations[ai]}, rng);
            const Realization real = draw_realization(g, influence, rng);
            const CascadeOutcome outcome =
                run_block_process(g, real, seeds, rng, BlockSchedule::GlobalUniform);
            fractions[run] = outcome.fraction(n);
            per_comm[run].resize(k);
            for (std::size_t c = 0; c < k; ++c)
                per_comm[run][c] = static_cast<double>(outcome.per_community_active[c]) /
                                   static_cast<double>(spec.sizes[c]);
        });
        AllocationOutcome row;
        row.allocation = allocations[ai];
        double sum = 0.0;
        for (double f : fractions) sum += f;
        row.mean_fraction = sum / runs;
        double ss = 0.0;
        for (double f : fractions) ss += (f - row.mean_fraction) * (f - row.mean_fraction);
        row.std_error = runs > 1 ? std::sqrt(ss / (runs - 1) / runs) : 0.0;
        row.mean_fraction_by_community.assign(k, 0.0);
        for (const auto& pc : per_comm)
            for (std::size_t c = 0; c < k; ++c) row.mean_fraction_by_community[c] += pc[c] / runs;
        out.rows.push_back(std::move(row));
    }

    for (std::size_t ai = 1; ai < out.rows.size(); ++ai)
        if (out.rows[ai].mean_fraction > out.rows[out.best_allocation].mean_fraction)
            out.best_allocation = ai;

    // argmax n_k p_kk^r, r from the (basic) influence threshold
    const int r = static_cast<int>(influence.threshold.min_value());
    double best_score = -1.0;
    for (std::size_t c = 0; c < k; ++c) {
        const double score =
            static_cast<double>(spec.sizes[c]) * std::pow(spec.p[c][c], r);
        if (score > best_score) {
            best_score = score;
            out.argmax_community = c;
        }
    }
    // is there a row putting everything into the argmax community, and does
    // it beat every other row by >= 3 pooled std errors?
    std::ptrdiff_t argmax_row = -1;
    for (std::size_t ai = 0; ai < allocations.size(); ++ai)
        if (allocations[ai][out.argmax_community] == total) argmax_row = static_cast<std::ptrdiff_t>(ai);
    if (argmax_row >= 0) {
        out.argmax_allocation_dominates = true;
        const auto& best = out.rows[static_cast<std::size_t>(argmax_row)];
        for (std::size_t ai = 0; ai < out.rows.size(); ++ai) {
            if (static_cast<std::ptrdiff_t>(ai) == argmax_row) continue;
            const auto& other = out.rows[ai];
            const double se = std::sqrt(best.std_error * best.std_error +
                                        other.std_error * other.std_error);
            const double gap = best.mean_fraction - other.mean_fraction;
            if (!(gap > 0.0 && gap >= 3.0 * se)) out.argmax_allocation_dominates = false;
        }
    }
    return out;
}

namespace {

std::string graph_params_string(const GraphSpec& spec) {
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ErImplicit> || std::is_same_v<T, ErExplicit>) {
                return "n=" + fmt(static_cast<double>(s.n)) + ";p=" + fmt(s.p);
            } else if constexpr (std::is_same_v<T, GnM>) {
                return "n=" + fmt(static_cast<double>(s.n)) + ";M=" + fmt(static_cast<double>(s.m));
            } else if constexpr (std::is_same_v<T, ConfigModel>) {
                DegreeSequence seq{s.degrees};
                return "n=" + std::to_string(s.degrees.size()) + ";dbar=" + fmt(seq.mean());
            } else if constexpr (std::is_same_v<T, PowerLawConfig>) {
                return "n=" + fmt(static_cast<double>(s.n)) + ";beta=" + fmt(s.beta) +
                       ";dmin=" + std::to_string(s.d_min) + ";dmax=" + std::to_string(s.d_max);
            } else if constexpr (std::is_same_v<T, BlockModel>) {
                std::string out = "sizes=";
                for (std::size_t i = 0; i < s.sizes.size(); ++i)
                    out += (i ? "|" : "") + std::to_string(s.sizes[i]);
                out += ";P=";
                for (std::size_t i = 0; i < s.p.size(); ++i)
                    for (std::size_t j = 0; j < s.p.size(); ++j)
                        out += ((i || j) ? "|" : "") + fmt(s.p[i][j]);
                return out;
            } else {
                return "path=" + s.path;
            }
        },
        spec);
}

}  // namespace

std::string SweepPlan::describe() const {
    std::ostringstream os;
    os << "graph=" << spec_name(graph) << " " << graph_params_string(graph);
    if (influence)
        os << " R=" << influence->threshold.to_string() << " W=" << influence->weight.to_string();
    if (rule) os << " rule=" << rule->name();
    os << " grid=[";
    for (std::size_t i = 0; i < grid.size(); ++i) os << (i ? "," : "") << grid[i];
    os << "] runs=" << runs << " master_seed=" << master_seed
       << " fresh_graph=" << (fresh_graph ? "true" : "false");
    if (simplify_graph) os << " simplify=true";
    switch (engine) {
        case Engine::Auto: os << " engine=auto"; break;
        case Engine::NodeProcess: os << " engine=node"; break;
        case Engine::EdgeProcess: os << " engine=edge"; break;
        case Engine::Generations: os << " engine=generations"; break;
    }
    if (std::holds_alternative<BlockModel>(graph))
        os << " schedule=" << (schedule == BlockSchedule::Paired ? "paired" : "uniform");
    os << " workers=" << workers;
    return os.str();
}

void write_csv(std::ostream& os, const SweepPlan& plan, const SweepResult& result) {
    const std::string model = spec_name(plan.graph);
    std::string params = graph_params_string(plan.graph);
    if (plan.influence)
        params += ";R=" + plan.influence->threshold.to_string() +
                  ";W=" + plan.influence->weight.to_string();
    if (plan.rule) params += ";rule=" + plan.rule->name();

    os << "# bperc sweep model=" << model << " n=" << result.node_count
       << " master_seed=" << plan.master_seed << " runs_per_point=" << plan.runs
       << " fresh_graph=" << (plan.fresh_graph ? 1 : 0)
       << " transition_convention=mean-fraction-0.5-log-interpolated";
    if (result.transition) os << " a_hat=" << fmt(*result.transition);
    os << "\n";
    os << "model,params,a,runs,mean_fraction,stddev,a_c_pred,t_c_pred,rho_star,q_rho_star\n";
    const std::string a_c = result.prediction ? fmt(result.prediction->a_c) : "";
    const std::string t_c = result.prediction ? fmt(result.prediction->t_c) : "";
    const std::string rho = result.prediction ? std::to_string(result.prediction->rho_star) : "";
    const std::string q = result.prediction ? fmt(result.prediction->q_rho_star) : "";
    for (const auto& pt : result.points) {
        os << model << ",\"" << params << "\"," << pt.a << "," << pt.runs << ","
           << fmt(pt.mean_fraction) << "," << fmt(pt.stddev) << "," << a_c << "," << t_c << ","
           << rho << "," << q << "\n";
    }
}

std::vector<std::uint64_t> log_grid(std::uint64_t lo, std::uint64_t hi, std::size_t count) {
    if (lo < 1 || hi < lo || count < 2) throw SpecError("bad log grid parameters");
    std::vector<std::uint64_t> grid;
    const double ratio = std::pow(static_cast<double>(hi) / static_cast<double>(lo),
                                  1.0 / static_cast<double>(count - 1));
    double v = static_cast<double>(lo);
    for (std::size_t i = 0; i < count; ++i, v *= ratio)
        grid.push_back(static_cast<std::uint64_t>(std::llround(v)));
    grid.back() = hi;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

// ---------------------------------------------------------------- plan files

namespace {

struct PlanKeys {
    std::map<std::string, std::pair<std::string, std::uint64_t>> values;  // key -> (value, line)
    std::string section;
};

[[noreturn]] void plan_error(const std::string& origin, std::uint64_t line,
                             const std::string& msg) {
    throw SpecError(origin + ":" + std::to_string(line) + ": " + msg);
}

double to_number(const std::string& origin, std::uint64_t line, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        plan_error(origin, line, "expected a number, got '" + v + "'");
    }
}

std::uint64_t to_count(const std::string& origin, std::uint64_t line, const std::string& v) {
    const double d = to_number(origin, line, v);
    if (d < 0 || d != std::floor(d) || d > 9e18)
        plan_error(origin, line, "expected a nonnegative integer, got '" + v + "'");
    return static_cast<std::uint64_t>(d);
}

bool to_bool(const std::string& origin, std::uint64_t line, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    plan_error(origin, line, "expected a boolean, got '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

SweepPlan parse_plan_text(const std::string& text, const std::string& origin) {
    std::map<std::string, std::map<std::string, std::pair<std::string, std::uint64_t>>> sections;
    std::string current;
    std::istringstream in(text);
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']') plan_error(origin, lineno, "unterminated section header");
            current = t.substr(1, t.size() - 2);
            if (current != "graph" && current != "influence" && current != "sweep")
                plan_error(origin, lineno, "unknown section [" + current + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) plan_error(origin, lineno, "expected 'key = value'");
        if (current.empty()) plan_error(origin, lineno, "key outside any section");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty()) plan_error(origin, lineno, "empty key or value");
        if (!sections[current].emplace(key, std::make_pair(value, lineno)).second)
            plan_error(origin, lineno, "duplicate key '" + key + "'");
    }

    const std::map<std::string, std::vector<std::string>> known{
        {"graph",
         {"model", "n", "p", "dbar", "M", "degfile", "degdist", "beta", "dmin", "dmax", "sizes",
          "P", "path"}},
        {"influence", {"R", "W", "r", "rule"}},
        {"sweep",
         {"grid", "grid_extra", "runs", "master_seed", "fresh_graph", "simplify", "workers",
          "budget", "engine", "schedule"}}};
    for (const auto& [section, keys] : sections)
        for (const auto& [key, value] : keys) {
            const auto& allowed = known.at(section);
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
                plan_error(origin, value.second,
                           "unknown key '" + key + "' in [" + section + "]");
        }

    auto& graph = sections["graph"];
    auto& influence = sections["influence"];
    auto& sweep = sections["sweep"];

    auto take = [&](auto& sec, const char* key) -> std::optional<std::pair<std::string, std::uint64_t>> {
        auto it = sec.find(key);
        if (it == sec.end()) return std::nullopt;
        auto out = it->second;
        sec.erase(it);
        return out;
    };
    auto require = [&](auto& sec, const char* key, const char* where) {
        auto v = take(sec, key);
        if (!v) throw SpecError(origin + ": missing key '" + std::string(key) + "' in [" + where + "]");
        return *v;
    };

    SweepPlan plan;

    // [graph]
    const auto model = require(graph, "model", "graph");
    const std::string m = model.first;
    auto num = [&](std::pair<std::string, std::uint64_t> kv) { return to_number(origin, kv.second, kv.first); };
    auto cnt = [&](std::pair<std::string, std::uint64_t> kv) { return to_count(origin, kv.second, kv.first); };
    if (m == "gnp" || m == "gnp-explicit") {
        const auto n = cnt(require(graph, "n", "graph"));
        double p;
        if (auto pv = take(graph, "p")) {
            p = num(*pv);
        } else {
            const auto dv = require(graph, "dbar", "graph");
            p = num(dv) / static_cast<double>(n);
        }
        if (m == "gnp") plan.graph = ErImplicit{n, p};
        else plan.graph = ErExplicit{n, p};
    } else if (m == "gnm") {
        const auto n = cnt(require(graph, "n", "graph"));
        std::uint64_t mm;
        if (auto mv = take(graph, "M")) mm = cnt(*mv);
        else {
            const auto dv = require(graph, "dbar", "graph");
            mm = static_cast<std::uint64_t>(std::llround(num(dv) * static_cast<double>(n) / 2.0));
        }
        plan.graph = GnM{n, mm};
    } else if (m == "config") {
        if (auto f = take(graph, "degfile")) {
            plan.graph = ConfigModel{read_degree_file(f->first)};
        } else {
            const auto n = cnt(require(graph, "n", "graph"));
            const auto dd = require(graph, "degdist", "graph");
            DegreeDistribution pd;
            for (const auto& part : split(dd.first, ',')) {
                const auto kv = split(part, ':');
                if (kv.size() != 2) plan_error(origin, dd.second, "degdist needs 'd:prob' entries");
                pd.emplace_back(static_cast<std::uint32_t>(to_count(origin, dd.second, kv[0])),
                                to_number(origin, dd.second, kv[1]));
            }
            std::sort(pd.begin(), pd.end());
            plan.graph = ConfigModel{quantile_degree_sequence(n, pd).degrees};
        }
    } else if (m == "powerlaw") {
        const auto n = cnt(require(graph, "n", "graph"));
        const double beta = num(require(graph, "beta", "graph"));
        const auto dmin = cnt(require(graph, "dmin", "graph"));
        const auto dmax = cnt(require(graph, "dmax", "graph"));
        plan.graph = PowerLawConfig{n, beta, static_cast<std::uint32_t>(dmin),
                                    static_cast<std::uint32_t>(dmax)};
    } else if (m == "block") {
        const auto sz = require(graph, "sizes", "graph");
        BlockModel bm;
        for (const auto& part : split(sz.first, ',')) bm.sizes.push_back(to_count(origin, sz.second, part));
        const auto pm = require(graph, "P", "graph");
        for (const auto& row : split(pm.first, ';')) {
            std::vector<double> r;
            for (const auto& cell : split(row, ',')) r.push_back(to_number(origin, pm.second, cell));
            bm.p.push_back(std::move(r));
        }
        plan.graph = std::move(bm);
    } else if (m == "edgelist") {
        plan.graph = FromEdgeList{require(graph, "path", "graph").first};
    } else {
        plan_error(origin, model.second, "unknown model '" + m + "'");
    }
    if (!graph.empty())
        plan_error(origin, graph.begin()->second.second,
                   "unknown key '" + graph.begin()->first + "' in [graph] for model " + m);

    // [influence]
    if (auto rv = take(influence, "r")) {
        plan.rule = ThresholdRule{ThresholdRule::Kind::Constant,
                                  static_cast<std::uint32_t>(cnt(*rv))};
    } else if (auto rule = take(influence, "rule")) {
        plan.rule = ThresholdRule::parse(rule->first);
    } else {
        const auto R = require(influence, "R", "influence");
        const auto W = require(influence, "W", "influence");
        try {
            plan.influence = InfluenceSpec::make(DiscreteDistribution::parse(R.first),
                                                 DiscreteDistribution::parse(W.first));
        } catch (const SpecError& e) {
            plan_error(origin, R.second, e.what());
        }
    }
    if (!influence.empty())
        plan_error(origin, influence.begin()->second.second,
                   "unknown key '" + influence.begin()->first + "' in [influence]");

    // [sweep]
    const auto grid = require(sweep, "grid", "sweep");
    if (grid.first.rfind("log:", 0) == 0) {
        const auto parts = split(grid.first.substr(4), ':');
        if (parts.size() != 3) plan_error(origin, grid.second, "grid = log:<lo>:<hi>:<count>");
        plan.grid = log_grid(to_count(origin, grid.second, parts[0]),
                             to_count(origin, grid.second, parts[1]),
                             to_count(origin, grid.second, parts[2]));
    } else {
        for (const auto& part : split(grid.first, ','))
            plan.grid.push_back(to_count(origin, grid.second, part));
    }
    if (auto extra = take(sweep, "grid_extra")) {
        for (const auto& part : split(extra->first, ','))
            plan.grid.push_back(to_count(origin, extra->second, part));
    }
    std::sort(plan.grid.begin(), plan.grid.end());
    plan.grid.erase(std::unique(plan.grid.begin(), plan.grid.end()), plan.grid.end());

    if (auto v = take(sweep, "runs")) plan.runs = static_cast<std::uint32_t>(cnt(*v));
    if (auto v = take(sweep, "master_seed")) plan.master_seed = cnt(*v);
    if (auto v = take(sweep, "fresh_graph")) plan.fresh_graph = to_bool(origin, v->second, v->first);
    if (auto v = take(sweep, "simplify")) plan.simplify_graph = to_bool(origin, v->second, v->first);
    if (auto v = take(sweep, "workers")) plan.workers = static_cast<unsigned>(cnt(*v));
    if (auto v = take(sweep, "budget")) plan.work_budget = num(*v);
    if (auto v = take(sweep, "engine")) {
        if (v->first == "auto") plan.engine = Engine::Auto;
        else if (v->first == "node") plan.engine = Engine::NodeProcess;
        else if (v->first == "edge") plan.engine = Engine::EdgeProcess;
        else if (v->first == "generations") plan.engine = Engine::Generations;
        else plan_error(origin, v->second, "engine must be auto|node|edge|generations");
    }
    if (auto v = take(sweep, "schedule")) {
        if (v->first == "paired") plan.schedule = BlockSchedule::Paired;
        else if (v->first == "uniform") plan.schedule = BlockSchedule::GlobalUniform;
        else plan_error(origin, v->second, "schedule must be paired|uniform");
    }
    if (!sweep.empty())
        plan_error(origin, sweep.begin()->second.second,
                   "unknown key '" + sweep.begin()->first + "' in [sweep]");
    return plan;
}

SweepPlan parse_plan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open plan file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_plan_text(ss.str(), path);
}

}  // namespace bperc
