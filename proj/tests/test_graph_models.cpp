#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "bperc/criticality.hpp"
#include "bperc/errors.hpp"
#include "bperc/graph_models.hpp"

using namespace bperc;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = "bperc_test_" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

void check_csr_symmetry(const Graph& g) {
    // j appears in i's list exactly as often as i in j's
    std::map<std::pair<NodeId, NodeId>, long> balance;
    for (std::uint64_t u = 0; u < g.node_count; ++u)
        for (NodeId v : g.neighbors_of(static_cast<NodeId>(u))) {
            if (u == v) continue;  // self-loop slots are trivially balanced
            if (u < v) ++balance[{static_cast<NodeId>(u), v}];
            else --balance[{v, static_cast<NodeId>(u)}];
        }
    for (const auto& [e, b] : balance) CHECK(b == 0);
    std::uint64_t degree_sum = 0;
    for (std::uint64_t v = 0; v < g.node_count; ++v) degree_sum += g.degree(static_cast<NodeId>(v));
    CHECK(degree_sum == 2 * g.edge_count);
}

}  // namespace

TEST_CASE("gnm: exact edge count, isolated at M=0, mean degree 2M/n") {
    Rng rng(1);
    const Graph empty = generate(GnM{4, 0}, rng);
    CHECK(empty.node_count == 4);
    CHECK(empty.edge_count == 0);
    for (NodeId v = 0; v < 4; ++v) CHECK(empty.degree(v) == 0);

    const Graph g = generate(GnM{10'000, 150'000}, rng);
    CHECK(g.edge_count == 150'000);
    CHECK(g.is_multigraph);
    std::uint64_t degree_sum = 0;
    for (std::uint64_t v = 0; v < g.node_count; ++v) degree_sum += g.degree(static_cast<NodeId>(v));
    CHECK(degree_sum == 2 * g.edge_count);  // mean degree exactly 2M/n
    check_csr_symmetry(generate(GnM{200, 600}, rng));
}

TEST_CASE("configuration model realizes the degree sequence exactly") {
    Rng rng(2);
    const Graph cubic = generate(ConfigModel{{3, 3, 3, 3}}, rng);
    for (NodeId v = 0; v < 4; ++v) CHECK(cubic.degree(v) == 3);
    CHECK(cubic.edge_count == 6);

    std::vector<std::uint32_t> degrees;
    for (int i = 0; i < 500; ++i) degrees.push_back(1 + static_cast<std::uint32_t>(rng.below(9)));
    if ((std::accumulate(degrees.begin(), degrees.end(), 0ull)) % 2 != 0) degrees[0] += 1;
    const Graph g = generate(ConfigModel{degrees}, rng);
    for (std::size_t v = 0; v < degrees.size(); ++v)
        CHECK(g.degree(static_cast<NodeId>(v)) == degrees[v]);
    check_csr_symmetry(g);
}

TEST_CASE("odd half-edge total drops one half-edge from a maximum-degree node") {
    Rng rng(3);
    const Graph g = config_model_from_degrees(std::vector<std::uint32_t>{3, 3, 3}, rng);
    std::vector<std::uint32_t> realized = g.degree_sequence();
    std::sort(realized.begin(), realized.end());
    CHECK(realized == std::vector<std::uint32_t>{2, 3, 3});
    CHECK(g.edge_count == 4);
}

TEST_CASE("matched configuration model preserves the degree sequence") {
    Rng rng(4);
    // triangle
    const Graph triangle = Graph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}}, false);
    const Graph matched = matched_config_model(triangle, rng);
    CHECK(matched.degree_sequence() == std::vector<std::uint32_t>{2, 2, 2});

    const Graph er = generate(ErExplicit{300, 0.05}, rng);
    const Graph m2 = matched_config_model(er, rng);
    CHECK(m2.degree_sequence() == er.degree_sequence());
}

TEST_CASE("implicit G(n,p) cannot be materialized") {
    Rng rng(5);
    CHECK_THROWS_WITH_AS(static_cast<void>(generate(ErImplicit{100, 0.1}, rng)),
                         doctest::Contains("implicit-only"), SpecError);
}

TEST_CASE("explicit G(n,p) small cases") {
    Rng rng(6);
    const Graph pair = generate(ErExplicit{2, 1.0}, rng);
    CHECK(pair.edge_count == 1);
    const Graph k5 = generate(ErExplicit{5, 1.0}, rng);
    CHECK(k5.edge_count == 10);  // triangular pair decoding covers all pairs
    for (NodeId v = 0; v < 5; ++v) CHECK(k5.degree(v) == 4);
    check_csr_symmetry(generate(ErExplicit{150, 0.08}, rng));
}

TEST_CASE("power-law degree sequence: quantile construction") {
    const auto degenerate = powerlaw_degree_sequence(100, 2.0, 7, 7);
    for (auto d : degenerate.degrees) CHECK(d == 7);

    const auto a = powerlaw_degree_sequence(20'000, 2.5, 10, 1000);
    const auto b = powerlaw_degree_sequence(20'000, 2.5, 10, 1000);
    CHECK(a.degrees == b.degrees);  // deterministic
    CHECK(a.degrees.front() >= a.degrees.back());
    CHECK(a.max() <= 1000);
    CHECK(a.degrees.back() == 10);

    // realized mean tracks the exact truncated-law mean within 2%
    const double exact_mean = powerlaw_moment(1, 2.5, 10, 1000);
    CHECK(std::abs(a.mean() - exact_mean) / exact_mean < 0.02);
}

TEST_CASE("power-law mean degrees for flat and 1/d laws") {
    // exact truncated sums on [10, 300]: ~84.26 for beta=1, 155 for beta=0
    const auto seq1 = powerlaw_degree_sequence(100'000, 1.0, 10, 300);
    CHECK(seq1.mean() == doctest::Approx(84.26).epsilon(0.01));
    const auto seq0 = powerlaw_degree_sequence(100'000, 0.0, 10, 300);
    CHECK(seq0.mean() == doctest::Approx(155.0).epsilon(0.01));
}

TEST_CASE("power-law scenario at n = 10^6 matches the exact moment within 2%") {
    const auto seq = powerlaw_degree_sequence(1'000'000, 2.5, 10, 10'000);
    const double exact_mean = powerlaw_moment(1, 2.5, 10, 10'000);
    CHECK(std::abs(seq.mean() - exact_mean) / exact_mean < 0.02);
}

TEST_CASE("quantile sequence splits a two-point law exactly") {
    const auto seq = quantile_degree_sequence(10'000, {{10, 0.5}, {50, 0.5}});
    std::uint64_t tens = 0, fifties = 0;
    for (auto d : seq.degrees) (d == 10 ? tens : fifties) += 1;
    CHECK(tens == 5000);
    CHECK(fifties == 5000);
    CHECK(seq.mean() == doctest::Approx(30.0));
    const auto pd = seq.empirical();
    CHECK(pd.size() == 2);
    CHECK(pd[0].second == doctest::Approx(0.5));
}

TEST_CASE("edge list ingestion") {
    const auto path = write_temp("path.edges", "0 1\n1 2\n");
    const auto rep = ingest_edge_list(path);
    CHECK(rep.graph.node_count == 3);
    CHECK(rep.graph.edge_count == 2);
    CHECK(rep.duplicate_edges == 0);
    CHECK(rep.self_loops == 0);
    std::remove(path.c_str());

    const auto dup = write_temp("dup.edges", "# comment\n0 1\n1 0\n7 7\n");
    const auto rep2 = ingest_edge_list(dup);
    CHECK(rep2.graph.edge_count == 1);
    CHECK(rep2.duplicate_edges == 1);
    CHECK(rep2.self_loops == 1);
    std::remove(dup.c_str());

    // sparse original ids are remapped densely, mapping retained
    const auto sparse = write_temp("sparse.edges", "100 204\n204 30000\n");
    const auto rep3 = ingest_edge_list(sparse);
    CHECK(rep3.graph.node_count == 3);
    CHECK(rep3.original_ids == std::vector<std::uint64_t>{100, 204, 30000});
    std::remove(sparse.c_str());

    const auto bad = write_temp("bad.edges", "0 1\n1 x\n");
    CHECK_THROWS_WITH_AS(ingest_edge_list(bad), doctest::Contains(":2:"), SpecError);
    std::remove(bad.c_str());

    const auto lonely = write_temp("lonely.edges", "0 1\n2\n");
    CHECK_THROWS_AS(ingest_edge_list(lonely), SpecError);
    std::remove(lonely.c_str());

    CHECK_THROWS_AS(ingest_edge_list("definitely-not-here.edges"), SpecError);
}

TEST_CASE("block model: labels, decoupled communities, validation") {
    Rng rng(7);
    const BlockModel two{{50, 70}, {{0.2, 0.0}, {0.0, 0.2}}};
    const Graph g = generate(GraphSpec{two}, rng);
    CHECK(g.node_count == 120);
    CHECK(g.community_count() == 2);
    for (std::uint64_t v = 0; v < 120; ++v)
        CHECK(g.community_of(static_cast<NodeId>(v)) == (v < 50 ? 0u : 1u));
    // q = 0: no inter-community edges
    for (std::uint64_t u = 0; u < g.node_count; ++u)
        for (NodeId v : g.neighbors_of(static_cast<NodeId>(u)))
            CHECK(g.community_of(static_cast<NodeId>(u)) == g.community_of(v));

    const BlockModel bad{{10, 10}, {{0.1, 0.2}, {0.3, 0.1}}};
    CHECK_THROWS_WITH_AS(validate(GraphSpec{bad}), doctest::Contains("symmetric"), SpecError);
}

TEST_CASE("block model with one community matches explicit G(n,p) edge counts") {
    // 100 draws each; empirical mean edge counts within 4 pooled sigma
    Rng rng_a(8), rng_b(9);
    const std::uint64_t n = 200;
    const double p = 0.1;
    double sum_a = 0, sum_b = 0, ss_a = 0, ss_b = 0;
    const int draws = 100;
    for (int i = 0; i < draws; ++i) {
        const double a = static_cast<double>(generate(BlockModel{{n}, {{p}}}, rng_a).edge_count);
        const double b = static_cast<double>(generate(ErExplicit{n, p}, rng_b).edge_count);
        sum_a += a;
        sum_b += b;
        ss_a += a * a;
        ss_b += b * b;
    }
    const double mean_a = sum_a / draws, mean_b = sum_b / draws;
    const double var_a = (ss_a - draws * mean_a * mean_a) / (draws - 1);
    const double var_b = (ss_b - draws * mean_b * mean_b) / (draws - 1);
    const double pooled = std::sqrt(var_a / draws + var_b / draws);
    CHECK(std::abs(mean_a - mean_b) < 4.0 * pooled);
}

TEST_CASE("simplify erases parallels and self-loops") {
    Rng rng(10);
    const Graph multi = generate(GnM{30, 200}, rng);
    const Graph simple = simplify(multi);
    CHECK_FALSE(simple.is_multigraph);
    std::set<std::pair<NodeId, NodeId>> seen;
    for (std::uint64_t u = 0; u < simple.node_count; ++u)
        for (NodeId v : simple.neighbors_of(static_cast<NodeId>(u))) {
            CHECK(u != v);
            if (u < v) CHECK(seen.insert({static_cast<NodeId>(u), v}).second);
        }
}

TEST_CASE("degree files") {
    const auto path = write_temp("degrees.deg", "3\n3\n# comment\n4\n2\n");
    const auto degrees = read_degree_file(path);
    CHECK(degrees == std::vector<std::uint32_t>{3, 3, 4, 2});
    std::remove(path.c_str());
}

TEST_CASE("graph spec validation") {
    CHECK_THROWS_AS(validate(GraphSpec{ErExplicit{0, 0.5}}), SpecError);
    CHECK_THROWS_AS(validate(GraphSpec{ErExplicit{10, 1.5}}), SpecError);
    CHECK_THROWS_AS(validate(GraphSpec{PowerLawConfig{10, 2.0, 5, 4}}), SpecError);
    CHECK_THROWS_AS(validate(GraphSpec{BlockModel{{10}, {{0.1, 0.2}}}}), SpecError);
    CHECK_NOTHROW(validate(GraphSpec{GnM{5, 0}}));
}
