#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace bperc {

// splitmix64 finalizer; used for seeding and stream derivation.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic per-task stream id. Results never depend on which thread
// runs a task, only on (master, a, b).
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ (a + 0x632be59bd9b4e019ULL));
    h = mix64(h ^ (b + 0x9e3779b97f4a7c15ULL));
    return h;
}

// xoshiro256++ (Blackman/Vigna). Self-contained so that draws are identical
// across platforms and standard libraries; std:: distributions are not.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& si : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            si = mix64(x);
        }
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1), 53-bit mantissa.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Unbiased integer in [0, bound); Lemire's method with rejection.
    std::uint64_t below(std::uint64_t bound) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t t = (0 - bound) % bound;
            while (lo < t) {
                m = static_cast<unsigned __int128>(next()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

// Iterator over the hit positions of i.i.d. Bernoulli(p) trials on 0..n-1,
// via geometric skips; expected cost O(np). This is the deferred-decision
// primitive: the hit count is Bin(n,p) and the hit set is uniform given it.
class BernoulliScan {
public:
    BernoulliScan(Rng& rng, std::uint64_t n, double p) : rng_(rng), n_(n) {
        if (p <= 0.0) {
            pos_ = n_;  // no hits
        } else if (p >= 1.0) {
            all_ = true;
            pos_ = 0;
        } else {
            inv_log_q_ = 1.0 / std::log1p(-p);
            pos_ = 0;
            advance(rng_.uniform());
        }
    }

    bool done() const { return pos_ >= n_; }
    std::uint64_t value() const { return pos_; }

    void step() {
        if (all_) {
            ++pos_;
            return;
        }
        ++pos_;
        advance(rng_.uniform());
    }

private:
    void advance(double u) {
        const double skip = std::floor(std::log(u) * inv_log_q_);
        if (!(skip < static_cast<double>(n_))) {
            pos_ = n_;
        } else {
            pos_ += static_cast<std::uint64_t>(skip);
        }
    }

    Rng& rng_;
    std::uint64_t n_;
    std::uint64_t pos_ = 0;
    double inv_log_q_ = 0.0;
    bool all_ = false;
};

// Exact Binomial(n,p) sample, O(n*min(p,1-p)) expected.
inline std::uint64_t binomial(Rng& rng, std::uint64_t n, double p) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    const bool flip = p > 0.5;
    const double q = flip ? 1.0 - p : p;
    std::uint64_t count = 0;
    for (BernoulliScan scan(rng, n, q); !scan.done(); scan.step()) ++count;
    return flip ? n - count : count;
}

// a distinct values from 0..n-1, uniformly. Rejection against a scratch
// bitmap for small a, partial Fisher-Yates otherwise.
std::vector<std::uint32_t> sample_without_replacement(Rng& rng, std::uint64_t n, std::uint64_t a);

}  // namespace bperc
