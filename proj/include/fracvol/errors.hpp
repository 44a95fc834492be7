#pragma once
/// @file errors.hpp
/// Exception hierarchy shared by every module. The CLI maps each type to an
/// exit code, so callers should throw the most specific one that applies.

#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracvol {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure (quadrature, root finding, optimisation) failed to
/// reach its tolerance. Carries the accuracy that was actually achieved.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double achieved)
        : Error(format(what, achieved)), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    static std::string format(const std::string& what, double achieved) {
        std::ostringstream os;
        os << what << " (achieved relative error " << std::scientific << std::setprecision(3) << achieved << ")";
        return os.str();
    }
    double achieved_;
};

/// Inconsistent or insufficient run configuration (grids, budgets, paths).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A Monte Carlo standard-error target cannot be met within the path budget.
class BudgetError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// The data cannot pin down some parameter directions.
class UnderIdentifiedError : public Error {
public:
    UnderIdentifiedError(const std::string& what, std::vector<std::string> directions)
        : Error(what), directions_(std::move(directions)) {}
    const std::vector<std::string>& directions() const noexcept { return directions_; }

private:
    std::vector<std::string> directions_;
};

/// Malformed input file. Line is 1-based; 0 means "whole file".
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, std::size_t line, std::string field)
        : Error(format(what, line, field)), line_(line), field_(std::move(field)) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    static std::string format(const std::string& what, std::size_t line, const std::string& field) {
        std::string s = what;
        if (line > 0) s += " at line " + std::to_string(line);
        if (!field.empty()) s += " (field '" + field + "')";
        return s;
    }
    std::size_t line_;
    std::string field_;
};

}  // namespace fracvol
