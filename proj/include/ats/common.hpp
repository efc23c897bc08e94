#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ats {

using Point = Eigen::VectorXd;
using Seed = std::uint64_t;

/// Axis-aligned box domain, inclusive on both ends.
struct Bounds {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    Bounds() = default;
    Bounds(Eigen::VectorXd lower, Eigen::VectorXd upper);

    static Bounds unit_cube(Eigen::Index dim);

    Eigen::Index dim() const { return lo.size(); }
    bool contains(const Point& x) const;
    Point clamp(const Point& x) const;
    Eigen::VectorXd width() const { return hi - lo; }
};

// Error hierarchy. The CLI maps each family onto an exit code.

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

class InvalidStateError : public Error {
  public:
    using Error::Error;
};

class NumericalError : public Error {
  public:
    NumericalError(const std::string& what, double last_nugget)
        : Error(what), last_nugget_(last_nugget) {}

    double last_nugget() const { return last_nugget_; }

  private:
    double last_nugget_;
};

class McmcInitError : public Error {
  public:
    using Error::Error;
};

class DomainError : public Error {
  public:
    using Error::Error;
};

class LookupError : public Error {
  public:
    using Error::Error;
};

class StateMismatchError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    using Error::Error;
};

}  // namespace ats
