#include "bperc/influence.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "bperc/errors.hpp"

namespace bperc {

InfluenceSpec InfluenceSpec::make(DiscreteDistribution threshold, DiscreteDistribution weight) {
    if (threshold.min_value() <= 0.0)
        throw SpecError("threshold atoms must be positive");
    if (!(weight.max_value() > 0.0))
        throw SpecError("largest weight atom must be positive (got " +
                        std::to_string(weight.max_value()) + ")");
    if (!(threshold.min_value() > weight.max_value()))
        throw SpecError("need min threshold > max weight (single-edge activation excluded); got "
                        "min R = " + std::to_string(threshold.min_value()) +
                        ", max W = " + std::to_string(weight.max_value()));
    InfluenceSpec spec;
    spec.threshold = std::move(threshold);
    spec.weight = std::move(weight);
    spec.sequential_semantics = spec.weight.has_negative_atom();
    return spec;
}

bool InfluenceSpec::is_basic_bootstrap() const {
    if (weight.size() != 1 || weight.atoms()[0].value != 1.0) return false;
    if (!threshold.integer_valued()) return false;
    return threshold.min_value() >= 2.0;
}

ActivationProfile activation_profile(const InfluenceSpec& spec, int rho_max) {
    if (rho_max < 2) throw SpecError("rho_max must be at least 2");
    const auto& watoms = spec.weight.atoms();
    const double w_max = spec.weight.max_value();

    std::vector<double> q(static_cast<std::size_t>(rho_max) + 1, 0.0);
    bool all_absorbed = true;  // no alive/dead mass left under any threshold atom

    for (const auto& thr : spec.threshold.atoms()) {
        const double b = thr.value;
        // alive: partial sum -> probability, for walks that have neither
        // crossed b nor been pruned. Sums >= b merge into `absorbed`; sums
        // that cannot reach b within the remaining steps are dropped.
        std::map<double, double> alive{{0.0, 1.0}};
        double absorbed = 0.0;
        bool pruned_mass = false;
        for (int m = 1; m <= rho_max; ++m) {
            std::map<double, double> next;
            const double reachable = static_cast<double>(rho_max - m) * w_max;
            for (const auto& [sum, prob] : alive) {
                for (const auto& w : watoms) {
                    const double s = sum + w.value;
                    const double mass = prob * w.prob;
                    if (s >= b) {
                        absorbed += mass;
                    } else if (s + reachable < b) {
                        pruned_mass = true;  // dead within this horizon
                    } else {
                        next[s] += mass;
                    }
                }
            }
            alive.swap(next);
            q[static_cast<std::size_t>(m)] += thr.prob * absorbed;
            if (alive.empty()) {
                // remaining rows are constant
                for (int mm = m + 1; mm <= rho_max; ++mm)
                    q[static_cast<std::size_t>(mm)] += thr.prob * absorbed;
                break;
            }
        }
        if (!alive.empty() || pruned_mass) all_absorbed = false;
    }

    ActivationProfile profile;
    profile.q = std::move(q);
    profile.rho_star = 0;
    for (int rho = 2; rho <= rho_max; ++rho) {
        if (profile.q[static_cast<std::size_t>(rho)] > 0.0) {
            profile.rho_star = rho;
            break;
        }
    }
    if (profile.rho_star == 0)
        throw SpecError("no rho* within rho_max=" + std::to_string(rho_max) +
                        ": every q_rho is zero up to that bound");

    const QInfinity qi = q_infinity(spec, profile.q);
    profile.q_infinity = qi.value;
    profile.q_infinity_exact = qi.exact;
    if (all_absorbed) {
        // every walk crossed its threshold within rho_max: the table has
        // provably saturated at 1
        profile.q_infinity = profile.q.back();
        profile.q_infinity_exact = true;
    }
    return profile;
}

QInfinity q_infinity(const InfluenceSpec& spec, const std::vector<double>& q_table) {
    if (spec.weight.mean() >= 0.0) return {1.0, true};
    // gambler's ruin: +-1 steps, up-probability z < 1/2, absorbing barrier at b
    const auto& w = spec.weight.atoms();
    if (w.size() == 2 && w[0].value == -1.0 && w[1].value == 1.0 && spec.threshold.size() == 1) {
        const double b = spec.threshold.atoms()[0].value;
        if (b == std::floor(b)) {
            const double z = w[1].prob;
            return {std::pow(z / (1.0 - z), b), true};
        }
    }
    if (q_table.empty()) return {0.0, false};
    return {q_table.back(), false};  // lower bound
}

PiValue pi_exact(long t, double p, const ActivationProfile& profile) {
    if (t < 0) throw SpecError("pi_exact: t must be nonnegative");
    if (p < 0.0 || p > 1.0) throw SpecError("pi_exact: p outside [0,1]");
    if (t == 0 || p == 0.0) return {0.0, true};
    if (p == 1.0) return {profile.q_at(t), t <= profile.rho_max() || profile.q_infinity_exact};

    const long cap = std::min<long>(t, profile.rho_max());
    const double lp = std::log(p), lq = std::log1p(-p);
    double value = 0.0, cum = 0.0;
    double lchoose = 0.0;  // log C(t,0)
    for (long rho = 0; rho <= cap; ++rho) {
        if (rho > 0)
            lchoose += std::log(static_cast<double>(t - rho + 1)) -
                       std::log(static_cast<double>(rho));
        const double pmf = std::exp(lchoose + static_cast<double>(rho) * lp +
                                    static_cast<double>(t - rho) * lq);
        value += pmf * profile.q[static_cast<std::size_t>(rho)];
        cum += pmf;
    }
    bool exact = true;
    if (t > profile.rho_max()) {
        value += profile.q_infinity * std::max(0.0, 1.0 - cum);
        exact = profile.q_infinity_exact;
    }
    return {std::min(value, 1.0), exact};
}

double pi_asymptotic(long t, double p, const ActivationProfile& profile) {
    if (t < 0) throw SpecError("pi_asymptotic: t must be nonnegative");
    const double pt = p * static_cast<double>(t);
    if (!(pt < 0.1))
        throw OutOfRegimeError("pi_asymptotic requires p*t < 0.1 (got " + std::to_string(pt) +
                               "); use pi_exact");
    double fact = 1.0;
    for (int k = 2; k <= profile.rho_star; ++k) fact *= k;
    return std::pow(pt, profile.rho_star) * profile.q_rho_star() / fact;
}

}  // namespace bperc
