#include "bperc/criticality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bperc/errors.hpp"

namespace bperc {

namespace {

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

double mean_degree(const DegreeDistribution& pd) {
    double dbar = 0.0;
    for (const auto& [d, p] : pd) dbar += static_cast<double>(d) * p;
    return dbar;
}

// Golden-section minimum of f on [lo, hi], relative tolerance on x.
template <typename F>
double golden_min(F f, double lo, double hi, double rel_tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while ((b - a) > rel_tol * (std::abs(a) + std::abs(b) + 1e-300)) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

double rate_H(double x) {
    if (x < 0.0) return std::numeric_limits<double>::infinity();
    if (x == 0.0) return 1.0;
    return 1.0 - x + x * std::log(x);
}

CriticalPrediction critical_gnp(double n, double p, const ActivationProfile& profile) {
    const int rho = profile.rho_star;
    const double q = profile.q_rho_star();
    if (!(q > 0.0)) throw SpecError("critical_gnp: q_rho_star must be positive");
    if (!(n >= 1.0) || !(p >= 0.0 && p <= 1.0)) throw SpecError("critical_gnp: bad n or p");
    if (n * p <= 2.0 * rho)
        warn("critical_gnp: mean degree " + std::to_string(n * p) +
             " is not much larger than rho*=" + std::to_string(rho) +
             "; asymptotic prediction degrades");
    if (p >= std::pow(n, -1.0 / rho))
        warn("critical_gnp: p exceeds n^(-1/rho*); outside the sublinear-transition regime");

    CriticalPrediction out;
    out.model = "gnp";
    out.variant = "closed-form-gnp";
    out.rho_star = rho;
    out.q_rho_star = q;
    out.t_c = std::pow(factorial(rho - 1) / (n * std::pow(p, rho) * q), 1.0 / (rho - 1));
    out.a_c = (1.0 - 1.0 / rho) * out.t_c;
    return out;
}

namespace {

ActivationProfile basic_profile(int r) {
    ActivationProfile profile;
    profile.rho_star = r;
    profile.q.assign(static_cast<std::size_t>(r) + 1, 0.0);
    profile.q[static_cast<std::size_t>(r)] = 1.0;
    profile.q_infinity = 1.0;
    profile.q_infinity_exact = true;
    return profile;
}

}  // namespace

CriticalPrediction critical_gnm(double n, double m, int r) {
    if (r < 2) throw SpecError("critical_gnm: r must be at least 2");
    if (!(n >= 1.0) || !(m >= 0.0)) throw SpecError("critical_gnm: bad n or M");
    const double dbar = 2.0 * m / n;
    if (dbar <= 2.0 * r)
        warn("critical_gnm: M is not much larger than n (mean degree " + std::to_string(dbar) +
             "); prediction degrades");
    // exactly the G(n,p) value under np -> 2M/n, p -> 2M/n^2; t_c rescaled
    // to edge time
    CriticalPrediction out = critical_gnp(n, 2.0 * m / (n * n), basic_profile(r));
    out.model = "gnm";
    out.variant = "gnm-substitution";
    out.t_c *= dbar;
    return out;
}

CriticalPrediction critical_config(double n, const DegreeDistribution& pd, int r) {
    if (r < 2) throw SpecError("critical_config: r must be at least 2");
    if (pd.empty()) throw SpecError("critical_config: empty degree distribution");
    const double dbar = mean_degree(pd);
    if (dbar <= r)
        warn("critical_config: mean degree " + std::to_string(dbar) + " <= r=" +
             std::to_string(r) + "; outside the regime E[d] > r");
    double d_star = 0.0;
    bool support_above = false;
    for (const auto& [d, p] : pd) {
        if (d < static_cast<std::uint32_t>(r)) continue;
        if (d > static_cast<std::uint32_t>(r) && p > 0.0) support_above = true;
        d_star += std::pow(static_cast<double>(d) / dbar, r) *
                  (static_cast<double>(d) - r) / dbar * p;
    }
    if (!support_above || !(d_star > 0.0))
        throw SpecError("critical_config: no degree support above r; d* = 0");

    CriticalPrediction out;
    out.model = "config";
    out.variant = "config-closed-form";
    out.rho_star = r;
    out.q_rho_star = 1.0;
    out.d_star = d_star;
    out.t_c = n * std::pow(factorial(r - 1) / (dbar * d_star), 1.0 / (r - 1));
    out.a_c = (1.0 - 1.0 / r) * n * std::pow(factorial(r - 1) / (std::pow(dbar, r) * d_star),
                                             1.0 / (r - 1));
    return out;
}

double binom_sf(std::uint32_t d, double x, std::uint32_t r) {
    if (r == 0) return 1.0;
    if (r > d) return 0.0;
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    // 1 - P(Bin < r), terms in log space
    const double lx = std::log(x), lq = std::log1p(-x);
    double cdf = 0.0, lchoose = 0.0;
    for (std::uint32_t j = 0; j < r; ++j) {
        if (j > 0) lchoose += std::log(static_cast<double>(d - j + 1)) - std::log(static_cast<double>(j));
        cdf += std::exp(lchoose + j * lx + static_cast<double>(d - j) * lq);
    }
    return std::max(0.0, 1.0 - cdf);
}

CriticalPrediction critical_config_numeric(double n, const DegreeDistribution& pd,
                                           const std::function<std::uint32_t(std::uint32_t)>& r_of_d) {
    if (pd.empty()) throw SpecError("critical_config_numeric: empty degree distribution");
    std::vector<std::uint32_t> r_table(pd.size());
    for (std::size_t i = 0; i < pd.size(); ++i) {
        r_table[i] = r_of_d(pd[i].first);
        if (r_table[i] < 2)
            throw SpecError("critical_config_numeric: r(d) < 2 at d=" +
                            std::to_string(pd[i].first));
    }
    const double dbar = mean_degree(pd);
    const double t_hi = n * dbar;

    auto m_of = [&](double t) {
        const double x = t / (n * dbar);
        double gain = 0.0;
        for (std::size_t i = 0; i < pd.size(); ++i) {
            const auto [d, p] = pd[i];
            if (d <= r_table[i]) continue;
            gain += binom_sf(d, x, r_table[i]) * (static_cast<double>(d) - r_table[i]) * p;
        }
        return n * gain - t;
    };

    // log grid scan for the first interior local minimum, then refine
    constexpr int kGrid = 384;
    const double lo = std::max(1.0, 1e-7 * t_hi);
    const double ratio = std::pow(t_hi / lo, 1.0 / (kGrid - 1));
    double prev_t = lo, prev_m = m_of(lo);
    double best_lo = 0.0, best_hi = 0.0;
    bool found = false;
    double t = lo * ratio;
    for (int i = 1; i < kGrid && !found; ++i, t *= ratio) {
        const double m = m_of(t);
        if (m > prev_m) {
            // rising after a fall: bracket [prev/ratio, t]
            best_lo = prev_t / ratio;
            best_hi = t;
            found = true;
        }
        prev_t = t;
        prev_m = m;
    }
    if (!found)
        throw OutOfRegimeError("critical_config_numeric: E[B(t)] has no interior minimum "
                               "(degenerate regime)");
    const double t_c = golden_min(m_of, std::max(lo, best_lo), best_hi, 1e-10);
    const double m_min = m_of(t_c);

    CriticalPrediction out;
    out.model = "config";
    out.variant = "config-numeric-min";
    out.rho_star = 0;
    out.q_rho_star = 1.0;
    out.t_c = t_c;
    out.a_c = -m_min / dbar;
    if (!(out.a_c > 0.0)) {
        warn("critical_config_numeric: minimum of E[B(t)] is nonnegative; cascade is "
             "self-sustaining at this scale (a_c clamped to 0)");
        out.a_c = 0.0;
    }
    return out;
}

double powerlaw_moment(double k, double beta, std::uint32_t d_min, std::uint32_t d_max) {
    if (d_min > d_max) throw SpecError("powerlaw_moment: d_min > d_max");
    double z = 0.0, s = 0.0;
    for (std::uint32_t d = d_min; d <= d_max; ++d) {
        const double base = static_cast<double>(d == 0 ? 1 : d);
        const double w = std::pow(base, -beta);
        z += w;
        s += w * std::pow(base, k);
    }
    return s / z;
}

double powerlaw_moment_asymptotic(double k, double beta, double d_min, double d_max) {
    if (beta == 1.0 || beta == k + 1.0)
        throw OutOfRegimeError("powerlaw_moment_asymptotic: branch boundary beta in {1, k+1}; "
                               "use the exact sum");
    if (beta > k + 1.0) return std::pow(d_min, k) * (beta - 1.0) / (beta - k - 1.0);
    if (beta > 1.0)
        return std::pow(d_min, beta - 1.0) * std::pow(d_max, k + 1.0 - beta) * (beta - 1.0) /
               (k + 1.0 - beta);
    return std::pow(d_max, k) * (1.0 - beta) / (k + 1.0 - beta);
}

double scaling_exponent_ac(int r, double beta, double gamma, double zeta) {
    if (r < 2) throw SpecError("scaling_exponent_ac: r must be at least 2");
    if (gamma < 0.0 || zeta <= 0.0 || gamma >= zeta)
        throw SpecError("scaling_exponent_ac: need 0 <= gamma < zeta");
    if (beta == 2.0 || beta == static_cast<double>(r) + 2.0)
        throw OutOfRegimeError("scaling_exponent_ac: beta on a branch boundary (2 or r+2)");
    if (beta > r + 2.0) return 1.0 - gamma * r / (r - 1.0);
    if (beta > 2.0) return 1.0 - (gamma * (beta - 2.0) + zeta * (r + 2.0 - beta)) / (r - 1.0);
    return 1.0 - zeta * r / (r - 1.0);
}

double p_hat_multinomial(const std::vector<std::vector<double>>& p, std::size_t k, int r) {
    const std::size_t K = p.size();
    // sum over compositions rho_1 + ... + rho_K = r of r! prod p_jk^rho_j / rho_j!
    double total = 0.0;
    std::vector<int> rho(K, 0);
    std::function<void(std::size_t, int, double)> rec = [&](std::size_t j, int left, double term) {
        if (j + 1 == K) {
            total += term * std::pow(p[j][k], left) / factorial(left);
            return;
        }
        for (int take = 0; take <= left; ++take)
            rec(j + 1, left - take, term * std::pow(p[j][k], take) / factorial(take));
    };
    rec(0, r, 1.0);
    return std::pow(factorial(r) * total, 1.0 / r);
}

BlockCriticality block_critical(const std::vector<std::uint64_t>& sizes,
                                const std::vector<std::vector<double>>& p, int r) {
    if (r < 2) throw SpecError("block_critical: r must be at least 2");
    const std::size_t K = sizes.size();
    if (K == 0 || p.size() != K) throw SpecError("block_critical: sizes/matrix mismatch");
    for (std::size_t i = 0; i < K; ++i) {
        if (p[i].size() != K) throw SpecError("block_critical: matrix is not square");
        for (std::size_t j = 0; j < K; ++j) {
            if (p[i][j] != p[j][i]) throw SpecError("block_critical: asymmetric matrix");
            if (i != j && p[i][j] >= std::min(p[i][i], p[j][j]) && p[i][j] > 0.0)
                warn("block_critical: p[" + std::to_string(i) + "][" + std::to_string(j) +
                     "] is not below min(p_ii, p_jj); outside the theorem's assumptions");
        }
    }

    BlockCriticality out;
    for (std::size_t k = 0; k < K; ++k) {
        double p_hat = 0.0;
        for (std::size_t j = 0; j < K; ++j) p_hat += p[j][k];
        out.p_hat.push_back(p_hat);

        auto pred = [&](double pk, const char* variant) {
            CriticalPrediction c;
            c.model = "block";
            c.variant = variant;
            c.rho_star = r;
            c.q_rho_star = 1.0;
            c.t_c = std::pow(factorial(r - 1) / (static_cast<double>(sizes[k]) * std::pow(pk, r)),
                             1.0 / (r - 1));
            c.a_c = (1.0 - 1.0 / r) * c.t_c;
            return c;
        };
        out.coupled.push_back(pred(p_hat, "block-coupled-phat"));
        out.reduced.push_back(pred(p[k][k], "block-reduced-intra"));
    }
    return out;
}

SeedBounds block_seed_bounds(const std::vector<std::uint64_t>& sizes,
                             const std::vector<std::vector<double>>& p, int r, double epsilon) {
    const BlockCriticality crit = block_critical(sizes, p, r);
    const std::size_t K = sizes.size();
    double n = 0.0;
    for (auto nk : sizes) n += static_cast<double>(nk);

    SeedBounds out{};
    double worst = 0.0;
    for (std::size_t k = 0; k < K; ++k)
        worst = std::max(worst, crit.coupled[k].a_c / static_cast<double>(sizes[k]));
    out.uniform_bound = (1.0 + epsilon) * n * worst;

    out.optimal_community = 0;
    double best_score = -1.0;
    for (std::size_t k = 0; k < K; ++k) {
        const double score = static_cast<double>(sizes[k]) * std::pow(p[k][k], r);
        if (score > best_score) {
            best_score = score;
            out.optimal_community = k;
        }
    }
    out.optimal_bound = (1.0 + epsilon) * crit.reduced[out.optimal_community].a_c;
    return out;
}

double phi_alpha(int rho_star, double alpha) {
    if (rho_star < 2) throw SpecError("phi_alpha: rho* must be at least 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw SpecError("phi_alpha: alpha must be in (0,1)");
    auto h = [&](double x) {
        return x - std::pow(x, rho_star) / rho_star - alpha * (1.0 - 1.0 / rho_star);
    };
    double lo = 0.0, hi = 1.0;
    // h is continuous, increasing on [0,1], h(0) < 0 < h(1)
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

RateConstants rate_constants(int rho_star, double alpha, double epsilon) {
    if (rho_star < 2) throw SpecError("rate_constants: rho* must be at least 2");
    if (alpha == 1.0)
        throw SpecError("rate_constants: alpha = 1 is the boundary of both theorems");
    if (!(alpha > 0.0)) throw SpecError("rate_constants: alpha must be positive");

    RateConstants out;
    out.alpha = alpha;
    if (alpha > 1.0) {
        const double x_lo = alpha * (rho_star - 1.0) / rho_star;
        auto g = [&](double x) {
            const double xr = std::pow(x, rho_star);
            return xr / (alpha * (rho_star - 1.0)) *
                   rate_H((x * rho_star - alpha * (rho_star - 1.0)) / xr);
        };
        // grow the upper bracket until the objective has risen for three
        // consecutive doublings
        double x_hi = std::max(2.0 * x_lo, x_lo + 1.0);
        int rises = 0;
        double prev = g(x_hi);
        while (rises < 3) {
            x_hi *= 2.0;
            const double cur = g(x_hi);
            rises = cur > prev ? rises + 1 : 0;
            prev = cur;
        }
        out.c1 = g(golden_min(g, x_lo, x_hi, 1e-8));
    } else {
        const double i_hi = (1.0 - alpha) * (1.0 - 1.0 / rho_star);
        if (!(epsilon > 0.0 && epsilon < i_hi))
            throw SpecError("rate_constants: epsilon outside the interval (0, " +
                            std::to_string(i_hi) + ")");
        out.phi = phi_alpha(rho_star, alpha);
        out.c2 = rate_H(1.0 + epsilon * rho_star) / (alpha * (rho_star - 1.0));
        out.predicted_subcritical_ratio =
            (static_cast<double>(rho_star) / (rho_star - 1.0)) * out.phi / alpha;
    }
    return out;
}

double binom_tail_bound(double n, double p, double k, TailSide side) {
    const double mu = n * p;
    if (!(mu > 0.0)) throw SpecError("binom_tail_bound: np must be positive");
    if (side == TailSide::Lower && k > mu)
        throw SpecError("binom_tail_bound: lower side requires k <= np");
    if (side == TailSide::Upper && k <= mu)
        throw SpecError("binom_tail_bound: upper side requires k > np");
    return std::exp(-mu * rate_H(k / mu));
}

double binom_tail_exact(std::uint64_t n, double p, std::uint64_t k, TailSide side) {
    if (p <= 0.0) return side == TailSide::Lower ? 1.0 : (k == 0 ? 1.0 : 0.0);
    if (p >= 1.0) return side == TailSide::Lower ? (k >= n ? 1.0 : 0.0) : 1.0;
    const double lx = std::log(p), lq = std::log1p(-p);
    auto lpmf = [&](std::uint64_t j) {
        return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(j) + 1.0) -
               std::lgamma(static_cast<double>(n - j) + 1.0) + static_cast<double>(j) * lx +
               static_cast<double>(n - j) * lq;
    };
    double sum = 0.0;
    if (side == TailSide::Lower) {
        for (std::uint64_t j = 0; j <= std::min(k, n); ++j) sum += std::exp(lpmf(j));
    } else {
        for (std::uint64_t j = k; j <= n; ++j) sum += std::exp(lpmf(j));
    }
    return std::min(1.0, sum);
}

}  // namespace bperc
