#pragma once

#include <stdexcept>
#include <string>

namespace qthermo {

// A fixed-step integration left its accuracy envelope (step too large,
// spectrum drift past threshold, ...). Message carries the diagnostic.
struct integrator_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A quantity the library guarantees (first-law closure, positivity of
// entropy production, Jarzynski gap, ...) came out violated at runtime.
struct invariant_violation : std::runtime_error {
    std::string invariant;
    invariant_violation(std::string name, const std::string& what)
        : std::runtime_error(what), invariant(std::move(name)) {}
};

}  // namespace qthermo
