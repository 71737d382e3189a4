#pragma once

#include <stdexcept>
#include <string>

namespace shell {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mesh construction.
class TopologyError : public Error {
 public:
  using Error::Error;
};
class OrientationError : public Error {
 public:
  using Error::Error;
};
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Pointwise kinematics. Both are recoverable inside Newton (step damping).
class DegenerateDeformation : public Error {
 public:
  DegenerateDeformation(const std::string& what, int element = -1)
      : Error(what), element_(element) {}
  int element() const { return element_; }

 private:
  int element_;
};
class ProjectionDegenerate : public Error {
 public:
  using Error::Error;
};
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};
class NonConvergence : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace shell
