#pragma once

#include <stdexcept>
#include <string>

namespace sfdm {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Requested system would exceed a configured size guard.
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Non-finite values or a failed numerical kernel.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMatrixError : public NumericError {
public:
    enum class Kind { structural, numerical };

    SingularMatrixError(Kind kind, const std::string& what)
        : NumericError(what), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace sfdm
