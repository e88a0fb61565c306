#ifndef CMIX_ERRORS_HPP
#define CMIX_ERRORS_HPP

#include <stdexcept>

namespace cmix {

// Violated precondition or malformed input. The CLI maps this to exit code 2.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Runtime numerical failure (factorization breakdown, degenerate fit, ...).
// The CLI maps this to exit code 1.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cmix

#endif
