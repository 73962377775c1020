#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace flexbench {

// Precondition violated by a caller (bad argument, out-of-range value).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// The cutting model reached a non-physical state (melting, negative chip thickness, ...).
class ModelDomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The cutting model solver could not satisfy its equations within budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::vector<double> residuals)
        : std::runtime_error(what), residuals_(std::move(residuals)) {}

    const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

// Malformed or incompatible file contents (archive, config, catalog).
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A file could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Structural misuse of a genotype (bad selector, length mismatch).
class StructureError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace flexbench
