#include "bperc/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "bperc/errors.hpp"

namespace bperc {

DiscreteDistribution DiscreteDistribution::from_atoms(std::vector<Atom> atoms) {
    if (atoms.empty()) throw SpecError("distribution needs at least one atom");
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (!(atoms[i].prob >= 0.0 && atoms[i].prob <= 1.0))
            throw SpecError("atom probability outside [0,1]");
        if (i > 0 && atoms[i].value == atoms[i - 1].value)
            throw SpecError("duplicate atom value in distribution");
        total += atoms[i].prob;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw SpecError("atom probabilities sum to " + std::to_string(total) + ", expected 1");
    DiscreteDistribution d;
    d.atoms_ = std::move(atoms);
    d.cdf_.reserve(d.atoms_.size());
    double acc = 0.0;
    for (const Atom& a : d.atoms_) {
        acc += a.prob;
        d.cdf_.push_back(acc);
    }
    d.cdf_.back() = 1.0;
    return d;
}

DiscreteDistribution DiscreteDistribution::uniform_set(long lo, long hi) {
    if (lo > hi) throw SpecError("uniformset bounds out of order");
    std::vector<Atom> atoms;
    const double p = 1.0 / static_cast<double>(hi - lo + 1);
    for (long v = lo; v <= hi; ++v) atoms.push_back({static_cast<double>(v), p});
    // force exact sum despite 1/k rounding
    double total = 0.0;
    for (const Atom& a : atoms) total += a.prob;
    atoms.back().prob += 1.0 - total;
    return from_atoms(std::move(atoms));
}

double DiscreteDistribution::mean() const {
    double m = 0.0;
    for (const Atom& a : atoms_) m += a.value * a.prob;
    return m;
}

bool DiscreteDistribution::integer_valued() const {
    for (const Atom& a : atoms_)
        if (a.value != std::floor(a.value)) return false;
    return true;
}

double DiscreteDistribution::sample(Rng& rng) const {
    if (atoms_.size() == 1) return atoms_[0].value;
    const double u = rng.uniform();
    // supports are tiny in practice; linear scan beats binary search
    for (std::size_t i = 0; i + 1 < cdf_.size(); ++i)
        if (u < cdf_[i]) return atoms_[i].value;
    return atoms_.back().value;
}

namespace {

double parse_real(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw SpecError(std::string("bad ") + what + " '" + s + "' in distribution literal");
    }
}

}  // namespace

DiscreteDistribution DiscreteDistribution::parse(const std::string& text) {
    if (text.rfind("const:", 0) == 0)
        return constant(parse_real(text.substr(6), "value"));
    if (text.rfind("uniformset:", 0) == 0) {
        const std::string body = text.substr(11);
        const auto dash = body.find('-', body.empty() || body[0] != '-' ? 0 : 1);
        if (dash == std::string::npos)
            throw SpecError("uniformset literal needs '<lo>-<hi>': " + text);
        const double lo = parse_real(body.substr(0, dash), "bound");
        const double hi = parse_real(body.substr(dash + 1), "bound");
        if (lo != std::floor(lo) || hi != std::floor(hi))
            throw SpecError("uniformset bounds must be integers: " + text);
        return uniform_set(static_cast<long>(lo), static_cast<long>(hi));
    }
    std::vector<Atom> atoms;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.rfind(':');
        if (colon == std::string::npos || colon == 0)
            throw SpecError("expected 'value:prob' in distribution literal, got '" + item + "'");
        atoms.push_back({parse_real(item.substr(0, colon), "value"),
                         parse_real(item.substr(colon + 1), "probability")});
    }
    if (atoms.empty()) throw SpecError("empty distribution literal");
    return from_atoms(std::move(atoms));
}

std::string DiscreteDistribution::to_string() const {
    std::string out;
    char buf[64];
    for (const Atom& a : atoms_) {
        if (!out.empty()) out += ',';
        std::snprintf(buf, sizeof(buf), "%.12g:%.12g", a.value, a.prob);
        out += buf;
    }
    return out;
}

}  // namespace bperc
