#pragma once

#include <string>
#include <vector>

#include "bperc/rng.hpp"

namespace bperc {

// Finite discrete law. Atoms are kept sorted ascending by value, values
// distinct, probabilities summing to 1 within 1e-12.
class DiscreteDistribution {
public:
    struct Atom {
        double value;
        double prob;
    };

    static DiscreteDistribution from_atoms(std::vector<Atom> atoms);
    static DiscreteDistribution constant(double v) { return from_atoms({{v, 1.0}}); }
    // Integer uniform on {lo, ..., hi}.
    static DiscreteDistribution uniform_set(long lo, long hi);

    // Literal forms: "v1:p1,v2:p2,...", "const:<v>", "uniformset:<lo>-<hi>".
    static DiscreteDistribution parse(const std::string& text);

    const std::vector<Atom>& atoms() const { return atoms_; }
    double min_value() const { return atoms_.front().value; }
    double max_value() const { return atoms_.back().value; }
    double mean() const;
    bool has_negative_atom() const { return atoms_.front().value < 0.0; }
    bool integer_valued() const;
    std::size_t size() const { return atoms_.size(); }

    double sample(Rng& rng) const;

    std::string to_string() const;

private:
    std::vector<Atom> atoms_;
    std::vector<double> cdf_;
};

}  // namespace bperc
