#pragma once

#include <stdexcept>
#include <string>

namespace blpp {

// Error categories map onto CLI exit codes: parameter errors exit 2,
// infeasible geometry exits 3, statistics errors exit 4.

class ParameterError : public std::runtime_error {
public:
    explicit ParameterError(const std::string& what) : std::runtime_error(what) {}
};

// Instance exceeds the enforced size limits of an exhaustive routine.
class SizeError : public ParameterError {
public:
    explicit SizeError(const std::string& what) : ParameterError(what) {}
};

class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

class StatisticsError : public std::runtime_error {
public:
    explicit StatisticsError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace blpp
