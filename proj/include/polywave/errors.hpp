#pragma once

#include <stdexcept>
#include <string>

namespace polywave {

/// Thrown when an operation would exceed one of the hard size caps
/// (vertex count, dense-operator dimension, partition enumeration size).
class SizeError : public std::runtime_error {
public:
    explicit SizeError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a state cannot be normalized to unit coefficient sum,
/// or when an operation requires a unit-sum state and the input is not one.
class NormalizationError : public std::runtime_error {
public:
    explicit NormalizationError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace polywave
