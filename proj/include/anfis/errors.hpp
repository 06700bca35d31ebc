#pragma once

#include <stdexcept>
#include <string>

namespace anfis {

/// Dimension mismatch between a model and the data handed to it.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

/// Invalid or inconsistent configuration, detected before any work starts.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Problems with input files or dataset contents.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Dataset too small for the requested operation (e.g. fewer rows than clusters).
class InsufficientDataError : public DataError {
public:
    explicit InsufficientDataError(const std::string& what) : DataError(what) {}
};

/// Numeric failure: non-finite values where finite ones are required.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// All rule firing strengths vanished (sum == 0), so layer-3 normalization
/// is undefined. Cannot happen analytically with Gaussian memberships and
/// finite inputs, but floating-point underflow can produce it.
class DegenerateFiringError : public NumericError {
public:
    explicit DegenerateFiringError(const std::string& what) : NumericError(what) {}
};

} // namespace anfis
