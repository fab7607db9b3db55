#pragma once

#include <stdexcept>
#include <string>

namespace matmart {

/// Thrown when an iterative numerical routine fails to reach its
/// convergence target (e.g. the eigensolver hits its sweep cap).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace matmart
