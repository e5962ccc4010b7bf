#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "bperc/errors.hpp"
#include "bperc/influence.hpp"
#include "oracle_helpers.hpp"

using namespace bperc;

namespace {

InfluenceSpec spec_of(const std::string& R, const std::string& W) {
    return InfluenceSpec::make(DiscreteDistribution::parse(R), DiscreteDistribution::parse(W));
}

std::vector<oracle::Atom> atoms_of(const DiscreteDistribution& d) {
    std::vector<oracle::Atom> out;
    for (const auto& a : d.atoms()) out.push_back({a.value, a.prob});
    return out;
}

}  // namespace

TEST_CASE("distribution literals and validation") {
    const auto d = DiscreteDistribution::parse("2:0.25,10:0.75");
    CHECK(d.size() == 2);
    CHECK(d.min_value() == 2.0);
    CHECK(d.max_value() == 10.0);
    CHECK(d.mean() == doctest::Approx(8.0));
    CHECK(d.integer_valued());

    const auto c = DiscreteDistribution::parse("const:2");
    CHECK(c.size() == 1);
    CHECK(c.min_value() == 2.0);

    const auto u = DiscreteDistribution::parse("uniformset:2-5");
    CHECK(u.size() == 4);
    CHECK(u.mean() == doctest::Approx(3.5));

    const auto neg = DiscreteDistribution::parse("-1:0.6,1:0.4");
    CHECK(neg.has_negative_atom());
    CHECK(neg.mean() == doctest::Approx(-0.2));

    CHECK_THROWS_AS(DiscreteDistribution::parse("1:0.5,2:0.6"), SpecError);   // sum != 1
    CHECK_THROWS_AS(DiscreteDistribution::parse("1:0.5,1:0.5"), SpecError);   // duplicate value
    CHECK_THROWS_AS(DiscreteDistribution::parse(""), SpecError);
    CHECK_THROWS_AS(DiscreteDistribution::parse("1:1.5"), SpecError);          // prob out of range
    CHECK_THROWS_AS(DiscreteDistribution::parse("x:1"), SpecError);

    // parse(to_string) round-trips
    const auto rt = DiscreteDistribution::parse(neg.to_string());
    CHECK(rt.atoms()[0].value == neg.atoms()[0].value);
    CHECK(rt.atoms()[1].prob == neg.atoms()[1].prob);
}

TEST_CASE("influence spec validation: single-edge activation excluded") {
    CHECK_THROWS_AS(spec_of("const:2", "const:0"), SpecError);    // max W not positive
    CHECK_THROWS_AS(spec_of("const:2", "const:2"), SpecError);    // min R == max W
    CHECK_THROWS_AS(spec_of("const:1", "const:2"), SpecError);    // min R < max W
    CHECK_THROWS_AS(spec_of("const:2", "-2:0.5,-1:0.5"), SpecError);
    CHECK_THROWS_AS(spec_of("-1:0.5,3:0.5", "const:1"), SpecError);  // thresholds must be > 0

    const auto ok = spec_of("const:2", "const:1");
    CHECK_FALSE(ok.sequential_semantics);
    CHECK(ok.is_basic_bootstrap());

    const auto seq = spec_of("const:2", "-1:0.6,1:0.4");
    CHECK(seq.sequential_semantics);
    CHECK_FALSE(seq.is_basic_bootstrap());
}

TEST_CASE("unit weights, constant threshold: basic bootstrap profile") {
    const auto profile = activation_profile(spec_of("const:2", "const:1"));
    CHECK(profile.rho_star == 2);
    CHECK(profile.q[2] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(profile.q[0] == 0.0);
    CHECK(profile.q[1] == 0.0);
    CHECK(profile.q_infinity == 1.0);
    CHECK(profile.q_infinity_exact);
}

TEST_CASE("two-point weight against two-point threshold: rho* from extreme values") {
    // W max atom 2, R min atom 6: three max-weight steps are the cheapest hit
    const auto spec = spec_of("6:0.3,9:0.7", "-1:0.3,2:0.7");
    const auto profile = activation_profile(spec);
    CHECK(profile.rho_star == 3);
    CHECK(profile.q[3] == doctest::Approx(0.3 * 0.7 * 0.7 * 0.7).epsilon(1e-12));
    CHECK(profile.q[2] == 0.0);
}

TEST_CASE("any pairing of the extreme-value example laws gives the same rho* and q formula") {
    const char* weights[] = {"-1:0.3,1:0.2,2:0.5", "-1:0.75,2:0.25"};
    const char* thresholds[] = {"6:0.3,9:0.7", "6:0.55,12:0.45"};
    for (const char* w : weights) {
        for (const char* t : thresholds) {
            const auto spec = spec_of(t, w);
            const auto profile = activation_profile(spec);
            const double pw2 = spec.weight.atoms().back().prob;
            const double pr6 = spec.threshold.atoms().front().prob;
            CHECK(profile.rho_star == 3);
            CHECK(profile.q[3] == doctest::Approx(pr6 * pw2 * pw2 * pw2).epsilon(1e-12));
        }
    }
}

TEST_CASE("plus-minus-one walk: absorption probabilities") {
    // subcritical drift, barrier at 2: q_inf = (z/(1-z))^2
    const auto spec = spec_of("const:2", "-1:0.6,1:0.4");
    const auto profile = activation_profile(spec);
    CHECK(profile.q_infinity == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
    CHECK(profile.q_infinity_exact);
    // frozen from the exhaustive enumeration oracle (2^5 sign sequences)
    CHECK(profile.q[5] == doctest::Approx(0.2368).epsilon(1e-12));
    const double enumerated =
        oracle::q_rho_enumeration(atoms_of(spec.weight), atoms_of(spec.threshold), 5);
    CHECK(profile.q[5] == doctest::Approx(enumerated).epsilon(1e-12));

    // zero drift is recurrent
    const auto balanced = activation_profile(spec_of("const:2", "-1:0.5,1:0.5"));
    CHECK(balanced.q_infinity == 1.0);
    CHECK(balanced.q_infinity_exact);
}

TEST_CASE("q_infinity without closed form reports a flagged lower bound") {
    // negative mean, non-unit steps
    const auto spec = spec_of("const:6", "-1:0.7,2:0.3");
    const auto profile = activation_profile(spec, 64);
    const auto qi = q_infinity(spec, profile.q);
    CHECK_FALSE(qi.exact);
    CHECK(qi.value == profile.q[64]);
    CHECK_FALSE(profile.q_infinity_exact);

    // cross-check the table value against a 10^7-sample walk simulation
    Rng rng(2024);
    const double mc =
        oracle::walk_absorption_monte_carlo(spec.weight, 6.0, 64, 10'000'000, rng);
    const double sigma = std::sqrt(qi.value * (1.0 - qi.value) / 1e7);
    CHECK(std::abs(mc - qi.value) < 5.0 * sigma + 1e-9);
}

TEST_CASE("dynamic program equals exhaustive enumeration up to rho = 8") {
    const std::pair<const char*, const char*> cases[] = {
        {"const:2", "const:1"},
        {"const:2", "-1:0.6,1:0.4"},
        {"6:0.3,9:0.7", "-1:0.3,2:0.7"},
        {"2:0.25,10:0.75", "const:1"},
        {"uniformset:2-5", "const:1"},
        {"const:6", "-1:0.7,2:0.3"},
        {"3:0.5,4.5:0.5", "-0.5:0.4,1.25:0.6"},  // non-integer atoms
    };
    for (const auto& [t, w] : cases) {
        const auto spec = spec_of(t, w);
        const auto profile = activation_profile(spec, 16);
        for (int rho = 0; rho <= 8; ++rho) {
            const double expected =
                oracle::q_rho_enumeration(atoms_of(spec.weight), atoms_of(spec.threshold), rho);
            CAPTURE(t);
            CAPTURE(w);
            CAPTURE(rho);
            CHECK(profile.q[static_cast<std::size_t>(rho)] ==
                  doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("profile invariants: monotone table, bounded by q_infinity") {
    const char* specs[][2] = {{"const:2", "-1:0.6,1:0.4"},
                              {"6:0.3,9:0.7", "-1:0.3,2:0.7"},
                              {"uniformset:2-5", "const:1"},
                              {"const:6", "-1:0.7,2:0.3"}};
    for (const auto& s : specs) {
        const auto profile = activation_profile(spec_of(s[0], s[1]));
        for (std::size_t rho = 0; rho + 1 < profile.q.size(); ++rho)
            CHECK(profile.q[rho] <= profile.q[rho + 1] + 1e-15);
        CHECK(profile.q.back() <= profile.q_infinity + 1e-12);
        CHECK(profile.q_infinity <= 1.0);
        for (int rho = 0; rho < profile.rho_star; ++rho)
            CHECK(profile.q[static_cast<std::size_t>(rho)] == 0.0);
        CHECK(profile.q[static_cast<std::size_t>(profile.rho_star)] > 0.0);
    }
}

TEST_CASE("stochastic dominance of W never decreases any q_rho") {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        // base law on {-1, 1, 2}; the dominating variant moves mass from -1 to 2
        const double p1 = 0.1 + 0.3 * rng.uniform();
        const double p2 = 0.1 + 0.3 * rng.uniform();
        const double rest = 1.0 - p1 - p2;
        const double shift = 0.05 * rest + 0.5 * rest * rng.uniform();
        const auto base =
            DiscreteDistribution::from_atoms({{-1.0, rest}, {1.0, p1}, {2.0, p2}});
        const auto dominating = DiscreteDistribution::from_atoms(
            {{-1.0, rest - shift}, {1.0, p1}, {2.0, p2 + shift}});
        const auto thr = DiscreteDistribution::parse("5:0.5,8:0.5");
        const auto lo = activation_profile(InfluenceSpec::make(thr, base), 24);
        const auto hi = activation_profile(InfluenceSpec::make(thr, dominating), 24);
        for (std::size_t rho = 0; rho < lo.q.size(); ++rho)
            CHECK(hi.q[rho] >= lo.q[rho] - 1e-13);
    }
}

TEST_CASE("no rho* within the bound is an explicit error") {
    const auto spec = spec_of("const:100", "const:1");
    CHECK_THROWS_WITH_AS(activation_profile(spec, 8), doctest::Contains("no rho*"), SpecError);
    CHECK_THROWS_AS(activation_profile(spec_of("const:2", "const:1"), 1), SpecError);
}

TEST_CASE("pi_exact: direct binomial evaluation and extremes") {
    const auto basic = activation_profile(spec_of("const:2", "const:1"));
    CHECK(pi_exact(0, 0.5, basic).value == 0.0);
    // P(Bin(3, 1/2) >= 2) = 1/2
    CHECK(pi_exact(3, 0.5, basic).value == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(pi_exact(10, 0.0, basic).value == 0.0);
    CHECK(pi_exact(10, 1.0, basic).value == doctest::Approx(1.0));
    // far beyond the table everything is absorbed with q_infinity = 1
    CHECK(pi_exact(1'000'000, 0.001, basic).value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pi_exact against a Monte-Carlo run of the counter process") {
    const auto spec = spec_of("6:0.3,9:0.7", "-1:0.3,2:0.7");
    const auto profile = activation_profile(spec);
    const PiValue pi = pi_exact(10, 0.1, profile);
    Rng rng(99);
    const double mc = oracle::pi_monte_carlo(10, 0.1, spec.weight, spec.threshold, 1'000'000, rng);
    const double sigma = std::sqrt(std::max(pi.value, 1e-12) * (1.0 - pi.value) / 1e6);
    CHECK(std::abs(mc - pi.value) < 5.0 * sigma + 1e-9);
}

TEST_CASE("pi_exact is nondecreasing in t and p") {
    const auto profile = activation_profile(spec_of("2:0.25,10:0.75", "const:1"));
    double prev = -1.0;
    for (long t : {0L, 1L, 2L, 5L, 10L, 30L, 100L, 400L}) {
        const double v = pi_exact(t, 0.05, profile).value;
        CHECK(v >= prev - 1e-15);
        prev = v;
    }
    prev = -1.0;
    for (double p : {0.0, 0.01, 0.05, 0.2, 0.5, 0.9, 1.0}) {
        const double v = pi_exact(40, p, profile).value;
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
}

TEST_CASE("pi_asymptotic: leading term and regime guard") {
    const auto basic = activation_profile(spec_of("const:2", "const:1"));
    // (pt)^2 q / 2! with pt = 0.01
    CHECK(pi_asymptotic(100, 1e-4, basic) == doctest::Approx(5e-5).epsilon(1e-12));
    CHECK(pi_asymptotic(0, 0.05, basic) == 0.0);
    CHECK_THROWS_AS(pi_asymptotic(100, 1e-3, basic), OutOfRegimeError);

    // agreement with the exact sum in-regime
    const double exact = pi_exact(100, 1e-4, basic).value;
    const double asym = pi_asymptotic(100, 1e-4, basic);
    CHECK(std::abs(exact - asym) / exact < 0.05);
}
