// bperc: simulation lab and analytic predictor for threshold cascades on
// random graphs. Subcommands: predict, simulate, sweep, ingest, place-seeds,
// bounds-check. Exit codes: 0 ok, 2 validation error, 3 work budget exceeded.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "bperc/errors.hpp"
#include "bperc/harness.hpp"

using namespace bperc;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::uint64_t checked_count(double v, const char* what) {
    if (v < 0 || v != std::floor(v) || v > 9e18)
        throw SpecError(std::string(what) + " must be a nonnegative integer (got " + fmt(v) + ")");
    return static_cast<std::uint64_t>(v);
}

// numeric flags are doubles so scientific notation (--n 1e6) parses
struct ModelFlags {
    std::string model;
    double n = 0, p = -1, dbar = -1, m = -1, beta = 0;
    double dmin = -1, dmax = -1;
    std::string degfile, degdist, sizes, pmatrix, path;
    std::string R, W, rule;
    double r = -1;

    void attach(CLI::App* cmd, bool model_required = true) {
        auto* opt =
            cmd->add_option("--model", model, "gnp|gnp-explicit|gnm|config|powerlaw|block|edgelist");
        if (model_required) opt->required();
        cmd->add_option("--n", n, "node count");
        cmd->add_option("--p", p, "edge probability");
        cmd->add_option("--dbar", dbar, "mean degree (alternative to --p / --M)");
        cmd->add_option("--M", m, "edge count for gnm");
        cmd->add_option("--degfile", degfile, "degree sequence file, one integer per line");
        cmd->add_option("--degdist", degdist, "degree law 'd:prob,...' realized by quantiles");
        cmd->add_option("--beta", beta, "power-law exponent");
        cmd->add_option("--dmin", dmin, "power-law minimum degree");
        cmd->add_option("--dmax", dmax, "power-law maximum degree");
        cmd->add_option("--sizes", sizes, "block community sizes 'n1,n2,...'");
        cmd->add_option("--P", pmatrix, "block probability rows 'p11,p12;p21,p22'");
        cmd->add_option("--path", path, "edge list path");
        cmd->add_option("--R", R, "threshold distribution literal");
        cmd->add_option("--W", W, "weight distribution literal");
        cmd->add_option("--r", r, "constant integer threshold");
        cmd->add_option("--rule", rule, "degree-dependent threshold: log2 | sqrt");
    }

    // reuse the plan-file builder by rendering the flags as a plan fragment
    std::string plan_text(const std::string& sweep_section) const {
        std::ostringstream os;
        os << "[graph]\nmodel = " << model << "\n";
        if (n > 0) os << "n = " << fmt(n) << "\n";
        if (p >= 0) os << "p = " << fmt(p) << "\n";
        else if (dbar >= 0 && model != "config") os << "dbar = " << fmt(dbar) << "\n";
        if (m >= 0) os << "M = " << fmt(m) << "\n";
        if (!degfile.empty()) os << "degfile = " << degfile << "\n";
        if (!degdist.empty()) os << "degdist = " << degdist << "\n";
        if (model == "powerlaw")
            os << "beta = " << fmt(beta) << "\ndmin = " << fmt(dmin) << "\ndmax = " << fmt(dmax)
               << "\n";
        if (!sizes.empty()) os << "sizes = " << sizes << "\n";
        if (!pmatrix.empty()) os << "P = " << pmatrix << "\n";
        if (!path.empty()) os << "path = " << path << "\n";
        os << "[influence]\n";
        if (!R.empty()) os << "R = " << R << "\nW = " << (W.empty() ? "const:1" : W) << "\n";
        else if (!rule.empty()) os << "rule = " << rule << "\n";
        else if (r >= 0) os << "r = " << fmt(r) << "\n";
        else os << "r = 2\n";
        os << "[sweep]\n" << sweep_section;
        return os.str();
    }
};

std::uint64_t default_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void print_prediction(const CriticalPrediction& c) {
    std::cout << "model = " << c.model << "\n"
              << "variant = " << c.variant << "\n"
              << "rho_star = " << c.rho_star << "\n"
              << "q_rho_star = " << fmt(c.q_rho_star) << "\n";
    if (!std::isnan(c.d_star)) std::cout << "d_star = " << fmt(c.d_star) << "\n";
    std::cout << "t_c = " << fmt(c.t_c) << "\n"
              << "a_c = " << fmt(c.a_c) << "\n";
}

int cmd_predict(const ModelFlags& flags, double alpha, double epsilon, double gamma,
                double zeta) {
    // build a minimal plan to reuse spec construction, then predict directly
    const SweepPlan plan = parse_plan_text(flags.plan_text("grid = 1\nruns = 1\n"), "<flags>");
    std::cerr << "resolved: " << plan.describe() << "\n";

    if (const auto* er = std::get_if<ErImplicit>(&plan.graph)) {
        InfluenceSpec spec = plan.influence ? *plan.influence
                              : InfluenceSpec::make(
                                    DiscreteDistribution::constant(plan.rule ? plan.rule->r : 2),
                                    DiscreteDistribution::constant(1.0));
        const ActivationProfile profile = activation_profile(spec);
        const CriticalPrediction c = critical_gnp(static_cast<double>(er->n), er->p, profile);
        print_prediction(c);
        std::cout << "q_infinity = " << fmt(profile.q_infinity)
                  << (profile.q_infinity_exact ? " (exact)" : " (lower bound)") << "\n";
        if (alpha > 0) {
            const RateConstants rc = rate_constants(profile.rho_star, alpha, epsilon);
            std::cout << "alpha = " << fmt(alpha) << "\n";
            if (alpha > 1) {
                std::cout << "C1 = " << fmt(rc.c1) << "\n";
            } else {
                std::cout << "phi = " << fmt(rc.phi) << "\nC2 = " << fmt(rc.c2) << "\n"
                          << "predicted_subcritical_ratio = "
                          << fmt(rc.predicted_subcritical_ratio) << "\n";
            }
        }
        return 0;
    }
    if (const auto* gm = std::get_if<GnM>(&plan.graph)) {
        if (!plan.rule || plan.rule->kind != ThresholdRule::Kind::Constant)
            throw SpecError("gnm prediction needs a constant integer threshold (--r)");
        print_prediction(critical_gnm(static_cast<double>(gm->n), static_cast<double>(gm->m),
                                      static_cast<int>(plan.rule->r)));
        return 0;
    }
    if (const auto* bm = std::get_if<BlockModel>(&plan.graph)) {
        if (!plan.rule || plan.rule->kind != ThresholdRule::Kind::Constant)
            throw SpecError("block prediction needs a constant integer threshold (--r)");
        const int r = static_cast<int>(plan.rule->r);
        const BlockCriticality crit = block_critical(bm->sizes, bm->p, r);
        for (std::size_t k = 0; k < bm->sizes.size(); ++k) {
            std::cout << "community " << k << ": p_hat = " << fmt(crit.p_hat[k])
                      << "  a_c = " << fmt(crit.coupled[k].a_c)
                      << "  a_c_reduced = " << fmt(crit.reduced[k].a_c) << "\n";
        }
        const SeedBounds bounds = block_seed_bounds(bm->sizes, bm->p, r, epsilon);
        std::cout << "uniform_bound = " << fmt(bounds.uniform_bound) << "\n"
                  << "optimal_bound = " << fmt(bounds.optimal_bound) << "\n"
                  << "optimal_community = " << bounds.optimal_community << "\n";
        return 0;
    }
    // config / powerlaw / edgelist: configuration-model formulas over the
    // degree distribution
    DegreeDistribution pd;
    double n = 0;
    if (const auto* cm = std::get_if<ConfigModel>(&plan.graph)) {
        DegreeSequence seq{cm->degrees};
        pd = seq.empirical();
        n = static_cast<double>(cm->degrees.size());
    } else if (const auto* pl = std::get_if<PowerLawConfig>(&plan.graph)) {
        pd = powerlaw_degree_sequence(pl->n, pl->beta, pl->d_min, pl->d_max).empirical();
        n = static_cast<double>(pl->n);
    } else if (const auto* el = std::get_if<FromEdgeList>(&plan.graph)) {
        const auto report = ingest_edge_list(el->path);
        DegreeSequence seq{report.graph.degree_sequence()};
        pd = seq.empirical();
        n = static_cast<double>(report.graph.node_count);
    }
    if (!plan.rule) throw SpecError("degree-based prediction needs --r or --rule");
    if (plan.rule->kind == ThresholdRule::Kind::Constant) {
        print_prediction(critical_config(n, pd, static_cast<int>(plan.rule->r)));
    } else {
        print_prediction(critical_config_numeric(
            n, pd, [rule = *plan.rule](std::uint32_t d) { return rule(d); }));
    }
    if (gamma >= 0 && zeta > 0 && std::holds_alternative<PowerLawConfig>(plan.graph) &&
        plan.rule->kind == ThresholdRule::Kind::Constant) {
        const auto& pl = std::get<PowerLawConfig>(plan.graph);
        std::cout << "e_ac = "
                  << fmt(scaling_exponent_ac(static_cast<int>(plan.rule->r), pl.beta, gamma, zeta))
                  << "\n";
    }
    return 0;
}

SeedSpec parse_seed_spec(double a, const std::string& seed_list, const std::string& per_community) {
    if (!seed_list.empty()) {
        ExplicitSeeds s;
        std::stringstream ss(seed_list);
        std::string item;
        while (std::getline(ss, item, ','))
            s.nodes.push_back(static_cast<NodeId>(checked_count(std::stod(item), "seed id")));
        return s;
    }
    if (!per_community.empty()) {
        PerCommunity s;
        std::stringstream ss(per_community);
        std::string item;
        while (std::getline(ss, item, ','))
            s.counts.push_back(checked_count(std::stod(item), "per-community count"));
        return s;
    }
    return UniformCount{checked_count(a, "--a")};
}

int cmd_simulate(const ModelFlags& flags, double a, const std::string& seed_list,
                 const std::string& per_community, const std::string& engine,
                 const std::string& schedule, std::uint64_t master_seed, std::uint32_t runs,
                 const std::string& trajectory_path, bool simplify_graph) {
    std::string sweep = "grid = 1\nruns = 1\nmaster_seed = " + std::to_string(master_seed) + "\n";
    if (!engine.empty()) sweep += "engine = " + engine + "\n";
    if (!schedule.empty()) sweep += "schedule = " + schedule + "\n";
    SweepPlan plan = parse_plan_text(flags.plan_text(sweep), "<flags>");
    plan.simplify_graph = simplify_graph;
    std::cerr << "resolved: " << plan.describe() << "\n";
    const SeedSpec seeds = parse_seed_spec(a, seed_list, per_community);

    std::cout << "model,seed_spec,rng_seed,final_active,steps,per_community\n";
    for (std::uint32_t run = 0; run < runs; ++run) {
        const CascadeOutcome out = run_single(plan, seeds, run, !trajectory_path.empty());
        std::string seed_desc;
        if (const auto* u = std::get_if<UniformCount>(&seeds))
            seed_desc = "uniform:" + std::to_string(u->a);
        else if (std::holds_alternative<PerCommunity>(seeds))
            seed_desc = "per-community:" + per_community;
        else
            seed_desc = "explicit:" + seed_list;
        std::cout << spec_name(plan.graph) << "," << seed_desc << "," << out.rng_seed << ","
                  << out.final_active << "," << out.steps << ",";
        for (std::size_t c = 0; c < out.per_community_active.size(); ++c)
            std::cout << (c ? "|" : "") << out.per_community_active[c];
        std::cout << "\n";
        if (!trajectory_path.empty() && out.trajectory) {
            std::ofstream tf(trajectory_path + (runs > 1 ? "." + std::to_string(run) : ""));
            tf << "t,usable\n";
            for (const auto& [t, usable] : *out.trajectory) tf << t << "," << usable << "\n";
        }
    }
    return 0;
}

int cmd_sweep(const std::string& plan_path, ModelFlags& flags, const std::string& grid,
              const std::string& grid_extra, double runs, double master_seed_flag,
              bool have_seed_flag, double workers, const std::string& engine,
              const std::string& schedule, int fresh_graph, bool simplify_graph, double budget,
              int refine, double refine_runs, const std::string& out_path) {
    SweepPlan plan;
    if (!plan_path.empty()) {
        plan = parse_plan_file(plan_path);
    } else if (flags.model.empty()) {
        throw SpecError("sweep needs either --plan or --model");
    } else {
        std::ostringstream sweep;
        sweep << "grid = " << (grid.empty() ? "log:10:1000:7" : grid) << "\n";
        if (!grid_extra.empty()) sweep << "grid_extra = " << grid_extra << "\n";
        if (runs > 0) sweep << "runs = " << fmt(runs) << "\n";
        if (!engine.empty()) sweep << "engine = " << engine << "\n";
        if (!schedule.empty()) sweep << "schedule = " << schedule << "\n";
        plan = parse_plan_text(flags.plan_text(sweep.str()), "<flags>");
    }
    if (have_seed_flag) plan.master_seed = checked_count(master_seed_flag, "--master-seed");
    if (workers >= 0) plan.workers = static_cast<unsigned>(checked_count(workers, "--workers"));
    if (fresh_graph >= 0) plan.fresh_graph = fresh_graph != 0;
    if (simplify_graph) plan.simplify_graph = true;
    if (budget > 0) plan.work_budget = budget;

    std::cerr << "resolved: " << plan.describe() << "\n";
    if (plan.grid.size() > 10000 && out_path.empty())
        throw SpecError("--out is required for sweeps with more than 10^4 rows");

    SweepResult result = run_sweep(plan);
    if (refine > 0)
        refine_transition(plan, result, refine,
                          refine_runs > 0 ? static_cast<std::uint32_t>(refine_runs) : plan.runs);
    for (const auto& w : result.warnings) warn(w);
    if (result.prediction)
        std::cerr << "prediction: a_c = " << fmt(result.prediction->a_c)
                  << " (t_c = " << fmt(result.prediction->t_c)
                  << ", variant = " << result.prediction->variant << ")\n";
    if (result.transition) std::cerr << "transition: a_hat = " << fmt(*result.transition) << "\n";

    if (out_path.empty()) {
        write_csv(std::cout, plan, result);
    } else {
        std::ofstream out(out_path);
        if (!out) throw SpecError("cannot open output file: " + out_path);
        write_csv(out, plan, result);
        std::cerr << "wrote " << result.points.size() << " rows to " << out_path << "\n";
    }
    return 0;
}

int cmd_ingest(const std::string& path, const std::string& emit_degrees,
               const std::string& matched_config, std::uint64_t master_seed) {
    const IngestReport report = ingest_edge_list(path);
    DegreeSequence seq{report.graph.degree_sequence()};
    std::cout << "nodes = " << report.graph.node_count << "\n"
              << "edges = " << report.graph.edge_count << "\n"
              << "dbar = " << fmt(seq.mean()) << "\n"
              << "d_max = " << seq.max() << "\n"
              << "duplicate_edges_collapsed = " << report.duplicate_edges << "\n"
              << "self_loops_dropped = " << report.self_loops << "\n";

    auto write_nodemap = [&](const std::string& base) {
        std::ofstream nm(base + ".nodemap");
        nm << "# dense_id original_id\n";
        for (std::size_t i = 0; i < report.original_ids.size(); ++i)
            nm << i << " " << report.original_ids[i] << "\n";
    };
    if (!emit_degrees.empty()) {
        std::ofstream df(emit_degrees);
        for (std::uint64_t v = 0; v < report.graph.node_count; ++v)
            df << report.graph.degree(static_cast<NodeId>(v)) << "\n";
        write_nodemap(emit_degrees);
        std::cerr << "wrote degrees to " << emit_degrees << "\n";
    }
    if (!matched_config.empty()) {
        Rng rng(mix64(master_seed));
        const Graph matched = matched_config_model(report.graph, rng);
        std::ofstream ef(matched_config);
        ef << "# matched configuration model of " << path << " (master_seed=" << master_seed
           << ")\n";
        // emit each undirected edge once
        for (std::uint64_t u = 0; u < matched.node_count; ++u) {
            const auto nbrs = matched.neighbors_of(static_cast<NodeId>(u));
            const auto eids = matched.edges_of(static_cast<NodeId>(u));
            for (std::size_t i = 0; i < nbrs.size(); ++i)
                if (nbrs[i] > u || (nbrs[i] == u && i % 2 == 0))
                    ef << u << " " << nbrs[i] << " # e" << eids[i] << "\n";
        }
        write_nodemap(matched_config);
        std::cerr << "wrote matched configuration multigraph to " << matched_config << "\n";
    }
    return 0;
}

int cmd_place_seeds(const std::string& sizes_s, const std::string& pmatrix_s, double r,
                    const std::string& allocations_s, double runs, std::uint64_t master_seed,
                    double workers) {
    BlockModel bm;
    {
        std::stringstream ss(sizes_s);
        std::string item;
        while (std::getline(ss, item, ','))
            bm.sizes.push_back(checked_count(std::stod(item), "community size"));
        std::stringstream pm(pmatrix_s);
        std::string row;
        while (std::getline(pm, row, ';')) {
            std::vector<double> cells;
            std::stringstream rs(row);
            while (std::getline(rs, item, ',')) cells.push_back(std::stod(item));
            bm.p.push_back(std::move(cells));
        }
    }
    std::vector<std::vector<std::uint64_t>> allocations;
    {
        std::stringstream ss(allocations_s);
        std::string group;
        while (std::getline(ss, group, ';')) {
            std::vector<std::uint64_t> alloc;
            std::stringstream gs(group);
            std::string item;
            while (std::getline(gs, item, ','))
                alloc.push_back(checked_count(std::stod(item), "allocation"));
            allocations.push_back(std::move(alloc));
        }
    }
    const InfluenceSpec influence = InfluenceSpec::make(
        DiscreteDistribution::constant(checked_count(r, "--r")),
        DiscreteDistribution::constant(1.0));
    std::cerr << "resolved: block sizes=" << sizes_s << " P=" << pmatrix_s << " r=" << fmt(r)
              << " runs=" << fmt(runs) << " master_seed=" << master_seed << "\n";
    const PlacementResult result = seed_placement_experiment(
        bm, influence, allocations, static_cast<std::uint32_t>(checked_count(runs, "--runs")),
        master_seed, static_cast<unsigned>(checked_count(workers < 0 ? 0 : workers, "--workers")));

    std::cout << "allocation,mean_fraction,std_error,per_community\n";
    for (const auto& row : result.rows) {
        for (std::size_t c = 0; c < row.allocation.size(); ++c)
            std::cout << (c ? "|" : "") << row.allocation[c];
        std::cout << "," << fmt(row.mean_fraction) << "," << fmt(row.std_error) << ",";
        for (std::size_t c = 0; c < row.mean_fraction_by_community.size(); ++c)
            std::cout << (c ? "|" : "") << fmt(row.mean_fraction_by_community[c]);
        std::cout << "\n";
    }
    std::cout << "best_allocation = " << result.best_allocation << "\n"
              << "argmax_community = " << result.argmax_community << "\n"
              << "argmax_allocation_dominates = "
              << (result.argmax_allocation_dominates ? "true" : "false") << "\n";
    return 0;
}

int cmd_bounds_check(double n, double p, double k, const std::string& side_s, double grid,
                     std::uint64_t master_seed) {
    if (grid > 0) {
        Rng rng(mix64(master_seed));
        double worst = 0.0;
        std::uint64_t violations = 0;
        const auto points = checked_count(grid, "--grid");
        std::cout << "n,p,k,side,bound,exact\n";
        for (std::uint64_t i = 0; i < points; ++i) {
            const std::uint64_t nn = 20 + rng.below(2000);
            const double pp = 0.02 + 0.96 * rng.uniform();
            const double mu = static_cast<double>(nn) * pp;
            const bool lower = (i % 2) == 0;
            std::uint64_t kk;
            if (lower) kk = rng.below(static_cast<std::uint64_t>(mu) + 1);
            else kk = static_cast<std::uint64_t>(mu) + 1 + rng.below(nn - static_cast<std::uint64_t>(mu));
            kk = std::min<std::uint64_t>(kk, nn);
            const TailSide side = lower ? TailSide::Lower : TailSide::Upper;
            if (lower && static_cast<double>(kk) > mu) continue;
            if (!lower && static_cast<double>(kk) <= mu) continue;
            const double bound = binom_tail_bound(static_cast<double>(nn), pp,
                                                  static_cast<double>(kk), side);
            const double exact = binom_tail_exact(nn, pp, kk, side);
            std::cout << nn << "," << fmt(pp) << "," << kk << "," << (lower ? "lower" : "upper")
                      << "," << fmt(bound) << "," << fmt(exact) << "\n";
            if (exact > bound * (1.0 + 1e-12)) ++violations;
            worst = std::max(worst, exact - bound);
        }
        std::cout << "violations = " << violations << "\n";
        return violations == 0 ? 0 : 1;
    }
    const TailSide side = side_s == "lower" ? TailSide::Lower : TailSide::Upper;
    if (side_s != "lower" && side_s != "upper")
        throw SpecError("--side must be lower or upper");
    const double bound = binom_tail_bound(n, p, k, side);
    const double exact = binom_tail_exact(checked_count(n, "--n"), p, checked_count(k, "--k"), side);
    std::cout << "bound = " << fmt(bound) << "\nexact = " << fmt(exact) << "\n"
              << "dominates = " << (bound >= exact ? "true" : "false") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"threshold-cascade lab: predictions and Monte-Carlo sweeps on random graphs"};
    app.require_subcommand(1);

    // predict
    auto* predict = app.add_subcommand("predict", "closed-form / numerical critical seed counts");
    ModelFlags predict_flags;
    predict_flags.attach(predict);
    double alpha = 0, pred_eps = 0.05, pred_gamma = -1, pred_zeta = -1;
    predict->add_option("--alpha", alpha, "a/a_c ratio for rate constants");
    predict->add_option("--epsilon", pred_eps, "epsilon for C2 / seed bounds");
    predict->add_option("--gamma", pred_gamma, "d_min = n^gamma exponent for e(a_c)");
    predict->add_option("--zeta", pred_zeta, "d_max = n^zeta exponent for e(a_c)");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run individual cascades");
    ModelFlags sim_flags;
    sim_flags.attach(simulate);
    double sim_a = 0;
    std::string sim_seed_list, sim_per_comm, sim_engine, sim_schedule, sim_traj;
    double sim_seed = -1, sim_runs = 1;
    simulate->add_option("--a", sim_a, "uniform random seed count");
    simulate->add_option("--seed-list", sim_seed_list, "explicit seed ids 'i,j,k'");
    simulate->add_option("--per-community", sim_per_comm, "per-community seed counts 'a1,a2'");
    simulate->add_option("--engine", sim_engine, "auto|node|edge|generations");
    simulate->add_option("--schedule", sim_schedule, "block schedule: uniform|paired");
    simulate->add_option("--master-seed", sim_seed, "master rng seed");
    simulate->add_option("--runs", sim_runs, "number of runs");
    simulate->add_option("--trajectory", sim_traj, "write (t, usable) trajectory csv here");
    bool sim_simplify = false;
    simulate->add_flag("--simplify", sim_simplify, "erase parallel edges and self-loops");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over seed counts, CSV out");
    ModelFlags sweep_flags;
    sweep_flags.attach(sweep, /*model_required=*/false);
    std::string plan_path, sweep_grid, sweep_grid_extra, sweep_engine, sweep_schedule, sweep_out;
    double sweep_runs = -1, sweep_seed = 0, sweep_workers = -1, sweep_budget = 0, sweep_refine_runs = -1;
    int sweep_fresh = -1, sweep_refine = 0;
    bool have_sweep_seed = false;
    sweep->add_option("--plan", plan_path, "plan file (overrides model flags)");
    sweep->add_option("--grid", sweep_grid, "'log:lo:hi:count' or 'a1,a2,...'");
    sweep->add_option("--grid-extra", sweep_grid_extra, "extra grid points 'a1,a2'");
    sweep->add_option("--runs", sweep_runs, "runs per grid point");
    auto* sweep_seed_opt = sweep->add_option("--master-seed", sweep_seed, "master rng seed");
    sweep->add_option("--workers", sweep_workers, "worker threads (0 = hardware)");
    sweep->add_option("--engine", sweep_engine, "auto|node|edge|generations");
    sweep->add_option("--schedule", sweep_schedule, "block schedule: uniform|paired");
    sweep->add_flag("--fresh-graph,!--no-fresh-graph",
                    [&](std::int64_t v) { sweep_fresh = v > 0 ? 1 : 0; },
                    "redraw the graph every run (default on)");
    sweep->add_option("--budget", sweep_budget, "work budget in elementary ops (exit 3 beyond)");
    sweep->add_option("--refine", sweep_refine, "transition bisection levels");
    sweep->add_option("--refine-runs", sweep_refine_runs, "runs per refinement point");
    sweep->add_option("--out", sweep_out, "output CSV path (default stdout)");
    bool sweep_simplify = false;
    sweep->add_flag("--simplify", sweep_simplify, "erase parallel edges and self-loops");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "read an edge list; report and derive artifacts");
    std::string ingest_path, ingest_degrees, ingest_matched;
    double ingest_seed = 1;
    ingest->add_option("path", ingest_path, "edge list file")->required();
    ingest->add_option("--emit-degrees", ingest_degrees, "write the degree sequence here");
    ingest->add_option("--matched-config", ingest_matched,
                       "write a matched configuration-model edge list here");
    ingest->add_option("--master-seed", ingest_seed, "seed for the matched model");

    // place-seeds
    auto* place = app.add_subcommand("place-seeds", "compare seed allocations on a block model");
    std::string place_sizes, place_pmatrix, place_allocs;
    double place_r = 2, place_runs = 200, place_seed = -1, place_workers = 0;
    place->add_option("--sizes", place_sizes, "community sizes 'n1,n2'")->required();
    place->add_option("--P", place_pmatrix, "probability rows 'p11,p12;p21,p22'")->required();
    place->add_option("--r", place_r, "integer threshold");
    place->add_option("--allocations", place_allocs, "seed allocations 'a1,a2;b1,b2'")->required();
    place->add_option("--runs", place_runs, "runs per allocation");
    place->add_option("--master-seed", place_seed, "master rng seed");
    place->add_option("--workers", place_workers, "worker threads");

    // bounds-check
    auto* bounds = app.add_subcommand("bounds-check", "binomial tail bound vs exact tail");
    double bc_n = 0, bc_p = 0, bc_k = 0, bc_grid = 0, bc_seed = 1;
    std::string bc_side = "lower";
    bounds->add_option("--n", bc_n, "trials");
    bounds->add_option("--p", bc_p, "success probability");
    bounds->add_option("--k", bc_k, "tail point");
    bounds->add_option("--side", bc_side, "lower|upper");
    bounds->add_option("--grid", bc_grid, "random grid size (checks bound >= exact)");
    bounds->add_option("--master-seed", bc_seed, "rng seed for the grid");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*predict) return cmd_predict(predict_flags, alpha, pred_eps, pred_gamma, pred_zeta);
        if (*simulate) {
            const std::uint64_t seed = sim_seed >= 0
                                           ? checked_count(sim_seed, "--master-seed")
                                           : default_seed();
            std::cerr << "master_seed = " << seed << "\n";
            return cmd_simulate(sim_flags, sim_a, sim_seed_list, sim_per_comm, sim_engine,
                                sim_schedule, seed,
                                static_cast<std::uint32_t>(checked_count(sim_runs, "--runs")),
                                sim_traj, sim_simplify);
        }
        if (*sweep) {
            have_sweep_seed = sweep_seed_opt->count() > 0;
            std::uint64_t seed = 0;
            if (have_sweep_seed) seed = checked_count(sweep_seed, "--master-seed");
            else if (plan_path.empty()) {
                seed = default_seed();
                have_sweep_seed = true;
            }
            if (have_sweep_seed) std::cerr << "master_seed = " << seed << "\n";
            return cmd_sweep(plan_path, sweep_flags, sweep_grid, sweep_grid_extra, sweep_runs,
                             static_cast<double>(seed), have_sweep_seed, sweep_workers,
                             sweep_engine, sweep_schedule, sweep_fresh, sweep_simplify,
                             sweep_budget, sweep_refine, sweep_refine_runs, sweep_out);
        }
        if (*ingest)
            return cmd_ingest(ingest_path, ingest_degrees, ingest_matched,
                              checked_count(ingest_seed, "--master-seed"));
        if (*place) {
            const std::uint64_t seed = place_seed >= 0
                                           ? checked_count(place_seed, "--master-seed")
                                           : default_seed();
            std::cerr << "master_seed = " << seed << "\n";
            return cmd_place_seeds(place_sizes, place_pmatrix, place_r, place_allocs, place_runs,
                                   seed, place_workers);
        }
        if (*bounds)
            return cmd_bounds_check(bc_n, bc_p, bc_k, bc_side, bc_grid,
                                    checked_count(bc_seed, "--master-seed"));
    } catch (const BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
