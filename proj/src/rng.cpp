#include "bperc/rng.hpp"

#include <unordered_set>

#include "bperc/errors.hpp"

namespace bperc {

std::vector<std::uint32_t> sample_without_replacement(Rng& rng, std::uint64_t n, std::uint64_t a) {
    if (a > n) throw SpecError("cannot sample " + std::to_string(a) + " of " + std::to_string(n));
    std::vector<std::uint32_t> out;
    out.reserve(a);
    if (a * 3 <= n) {
        // sparse case: rejection, expected < 1.5 draws per sample
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(a * 2);
        while (out.size() < a) {
            const std::uint64_t v = rng.below(n);
            if (seen.insert(v).second) out.push_back(static_cast<std::uint32_t>(v));
        }
    } else {
        std::vector<std::uint32_t> pool(n);
        for (std::uint64_t i = 0; i < n; ++i) pool[i] = static_cast<std::uint32_t>(i);
        for (std::uint64_t i = 0; i < a; ++i) {
            const std::uint64_t j = i + rng.below(n - i);
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
    }
    return out;
}

}  // namespace bperc
