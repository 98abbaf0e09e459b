#pragma once

#include <stdexcept>
#include <string>

namespace fracbesov {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class ResourceError : public Error {
public:
    using Error::Error;
};

// The set has no usable holes at the resolution of the atom cloud.
class PorosityError : public Error {
public:
    using Error::Error;
};

// A requested scale lies below what the discretization can resolve.
class ResolutionError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class OpenSetConditionError : public Error {
public:
    using Error::Error;
};

class EmptySupportError : public Error {
public:
    using Error::Error;
};

class DegenerateGeometryError : public Error {
public:
    using Error::Error;
};

class InconsistencyError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double best_value)
        : Error(what), best_value_(best_value) {}

    double best_value() const noexcept { return best_value_; }

private:
    double best_value_;
};

}  // namespace fracbesov
