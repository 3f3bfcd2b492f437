#pragma once

#include <stdexcept>
#include <string>

namespace peaky {

// Invalid argument or configuration outside an operation's domain.
using DomainError = std::domain_error;

// An iterative method or quadrature failed to reach its tolerance.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace peaky
