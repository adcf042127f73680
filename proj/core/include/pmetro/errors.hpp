// errors.hpp — exception types shared by all pmetro modules

#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pmetro {

// Inconsistent subsystem or wire dimensions.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// An input violated a documented precondition (e.g. non-Hermitian operator).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Evaluation hit a divergence of a closed-form expression.
class PoleError : public std::domain_error {
public:
    PoleError(const std::string& what, double location)
        : std::domain_error(what), location_(location) {}
    double location() const noexcept { return location_; }

private:
    double location_;
};

// An iterative solver failed to reach its tolerance. Carries the last feasible iterate.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, Eigen::MatrixXcd last_feasible)
        : std::runtime_error(what), last_feasible_(std::move(last_feasible)) {}
    const Eigen::MatrixXcd& last_feasible() const noexcept { return last_feasible_; }

private:
    Eigen::MatrixXcd last_feasible_;
};

}  // namespace pmetro
