#pragma once

#include <stdexcept>
#include <string>

namespace volgraph {

/// Broad failure class; the CLI maps each onto a distinct exit code.
enum class ErrorKind { Config, Data, Numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

/// Malformed or insufficient input data.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

/// Singular systems, non-finite intermediates, diverging training.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

}  // namespace volgraph
