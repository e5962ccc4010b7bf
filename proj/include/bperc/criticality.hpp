#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "bperc/influence.hpp"

namespace bperc {

// Degree law (d, p(d)) pairs, sorted by d, probabilities summing to 1.
using DegreeDistribution = std::vector<std::pair<std::uint32_t, double>>;

struct CriticalPrediction {
    std::string model;
    std::string variant;  // which formula produced it
    double t_c = 0.0;
    double a_c = 0.0;
    int rho_star = 0;
    double q_rho_star = 0.0;
    double d_star = std::numeric_limits<double>::quiet_NaN();  // configuration model only
};

// Generalized G(n,p): t_c = ((rho*-1)! / (n p^rho* q_rho*))^(1/(rho*-1)),
// a_c = (1 - 1/rho*) t_c. Out-of-regime parameters warn, never reject.
CriticalPrediction critical_gnp(double n, double p, const ActivationProfile& profile);

// G(n,M) via the exact substitution np -> 2M/n, p -> 2M/n^2; t_c reported in
// edge time.
CriticalPrediction critical_gnm(double n, double m, int r);

// Configuration model: d* = sum_{d>=r} (d/dbar)^r ((d-r)/dbar) p(d),
// a_c = (1-1/r) n ((r-1)! / (dbar^r d*))^(1/(r-1)); t_c in edge time.
CriticalPrediction critical_config(double n, const DegreeDistribution& pd, int r);

// Degree-dependent thresholds r(d): numerically minimizes
// m(t) = n sum_d P(Bin(d, t/(n dbar)) >= r(d)) (d - r(d)) p(d) - t
// and returns t_c = argmin, a_c = -m(t_c)/dbar.
CriticalPrediction critical_config_numeric(double n, const DegreeDistribution& pd,
                                           const std::function<std::uint32_t(std::uint32_t)>& r_of_d);

// Exact truncated-sum moment E[d^k] of the power law C/d^beta on [d_min,d_max].
double powerlaw_moment(double k, double beta, std::uint32_t d_min, std::uint32_t d_max);

// Three-branch asymptotic of the same moment, for scaling studies only.
// Branch boundaries (beta = 1, beta = k+1) are rejected.
double powerlaw_moment_asymptotic(double k, double beta, double d_min, double d_max);

// Scaling exponent e(a_c) for power-law degrees with d_min = n^gamma,
// d_max = n^zeta. Branch boundaries beta = 2 and beta = r+2 are rejected.
double scaling_exponent_ac(int r, double beta, double gamma, double zeta);

struct BlockCriticality {
    std::vector<double> p_hat;                  // p_kk + sum_{j!=k} p_jk
    std::vector<CriticalPrediction> coupled;    // per community, using p_hat
    std::vector<CriticalPrediction> reduced;    // shadow system, p_kk alone
};

// Per-community critical seeds for the K-community block model.
BlockCriticality block_critical(const std::vector<std::uint64_t>& sizes,
                                const std::vector<std::vector<double>>& p, int r);

// The multinomial form of p_hat from the K-community theorem, summed
// literally over all compositions of r; collapses to the row sum.
double p_hat_multinomial(const std::vector<std::vector<double>>& p, std::size_t k, int r);

struct SeedBounds {
    double uniform_bound;      // seeds placed uniformly over the whole graph
    double optimal_bound;      // all seeds in the best community
    std::size_t optimal_community;  // argmax n_k p_kk^r, ties to lowest index
};

SeedBounds block_seed_bounds(const std::vector<std::uint64_t>& sizes,
                             const std::vector<std::vector<double>>& p, int r,
                             double epsilon = 0.05);

// H(x) = 1 - x + x log x (H(0) = 1, +inf for x < 0).
double rate_H(double x);

// Root of h(x) = x - x^rho*/rho* - alpha(1 - 1/rho*) on [0,1], to 1e-12.
double phi_alpha(int rho_star, double alpha);

struct RateConstants {
    double alpha = 0.0;
    double c1 = std::numeric_limits<double>::quiet_NaN();  // supercritical rate, alpha > 1
    double c2 = std::numeric_limits<double>::quiet_NaN();  // subcritical rate, alpha < 1
    double phi = std::numeric_limits<double>::quiet_NaN();
    double predicted_subcritical_ratio = std::numeric_limits<double>::quiet_NaN();
};

// alpha > 1: C1 by bracketed golden-section minimization. alpha in (0,1):
// phi, C2(epsilon) = H(1 + eps rho*)/(alpha(rho*-1)), and the predicted
// A*/a ratio (rho*/(rho*-1)) phi/alpha. alpha = 1 is rejected.
RateConstants rate_constants(int rho_star, double alpha, double epsilon);

enum class TailSide { Lower, Upper };

// Chernoff-style bound exp(-mu H(k/mu)). Lower side needs k <= mu = np,
// upper side k > mu.
double binom_tail_bound(double n, double p, double k, TailSide side);

// Exact tail by summation, the bound's companion check.
double binom_tail_exact(std::uint64_t n, double p, std::uint64_t k, TailSide side);

// P(Bin(d, x) >= r), exact.
double binom_sf(std::uint32_t d, double x, std::uint32_t r);

}  // namespace bperc
