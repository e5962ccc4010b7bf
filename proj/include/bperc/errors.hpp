#pragma once

#include <iostream>
#include <stdexcept>
#include <string>

namespace bperc {

// Regime-condition violations warn rather than reject so finite-size
// exploration stays possible.
inline void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

// Invalid model/spec parameters. The CLI maps these to exit code 2.
struct SpecError : std::runtime_error {
    explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

// Estimated sweep work exceeds the configured budget. CLI exit code 3.
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Asymptotic formula called outside its validity regime.
struct OutOfRegimeError : std::runtime_error {
    explicit OutOfRegimeError(const std::string& what) : std::runtime_error(what) {}
};

// A sweep whose mean-fraction curve never crosses 1/2.
struct NoTransitionError : std::runtime_error {
    explicit NoTransitionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bperc
