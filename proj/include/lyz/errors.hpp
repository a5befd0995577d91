#pragma once

#include <stdexcept>
#include <string>

namespace lyz {

// Thrown when a Fock-space truncation stops being physically negligible;
// the caller should raise n_max.
class truncation_error : public std::runtime_error {
public:
    explicit truncation_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure that is not an argument error (divergence, conservation drift).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lyz
