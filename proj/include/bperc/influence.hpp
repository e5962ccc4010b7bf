#pragma once

#include <vector>

#include "bperc/distribution.hpp"

namespace bperc {

// Threshold law R (values > 0) plus edge-weight law W, under the
// non-degeneracy condition min R > max W > 0 (no node can be activated by a
// single edge). Negative weight atoms switch the cascade engines to
// sequential semantics: influences are applied one edge at a time and an
// activated node never deactivates.
struct InfluenceSpec {
    DiscreteDistribution threshold;
    DiscreteDistribution weight;
    bool sequential_semantics = false;

    static InfluenceSpec make(DiscreteDistribution threshold, DiscreteDistribution weight);

    // W identically 1 and all thresholds integers >= 2: the edge process and
    // the basic-bootstrap formulas apply directly.
    bool is_basic_bootstrap() const;
};

// q[rho] = P(a node sequentially influenced by rho active neighbors has
// activated), rho = 0..rho_max; rho_star = min{rho >= 2 : q[rho] > 0}.
struct ActivationProfile {
    int rho_star = 0;
    std::vector<double> q;
    double q_infinity = 0.0;
    bool q_infinity_exact = false;

    int rho_max() const { return static_cast<int>(q.size()) - 1; }
    double q_rho_star() const { return q[static_cast<std::size_t>(rho_star)]; }
    // q extended beyond the table by q_infinity
    double q_at(long rho) const {
        if (rho < 0) return 0.0;
        return rho <= rho_max() ? q[static_cast<std::size_t>(rho)] : q_infinity;
    }
};

inline constexpr int kDefaultRhoMax = 64;

// Exact dynamic program over the running partial-sum law of the weight walk,
// conditioned on each threshold atom. Throws SpecError if no q_rho becomes
// positive within rho_max.
ActivationProfile activation_profile(const InfluenceSpec& spec, int rho_max = kDefaultRhoMax);

struct QInfinity {
    double value;
    bool exact;
};

// Limit of q_rho. Exact when E[W] >= 0 (recurrent walk) or for the +-1 walk
// with a single integer threshold atom (gambler's ruin); otherwise the last
// table entry, flagged as a lower bound.
QInfinity q_infinity(const InfluenceSpec& spec, const std::vector<double>& q_table);

struct PiValue {
    double value;
    bool exact;
};

// pi(t) = sum_rho C(t,rho) p^rho (1-p)^(t-rho) q_rho. Rhos beyond the table
// use q_infinity; `exact` is false when that substitution is itself a bound.
PiValue pi_exact(long t, double p, const ActivationProfile& profile);

// Leading term (p t)^rho* q_rho* / rho*!, valid for p*t -> 0. Enforces
// p*t < 0.1 and throws OutOfRegimeError beyond it.
double pi_asymptotic(long t, double p, const ActivationProfile& profile);

}  // namespace bperc
