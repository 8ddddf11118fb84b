#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mmsrom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Violated precondition (dimension mismatch, missing data, wrong state).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Bad configuration file or command line.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Iterative solver failure. Carries the residual norm history.
class SolverError : public Error {
public:
    SolverError(const std::string& what, std::vector<double> history = {})
        : Error(what), history_(std::move(history)) {}

    const std::vector<double>& residual_history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

}  // namespace mmsrom
