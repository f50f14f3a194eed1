#pragma once

#include <stdexcept>
#include <string>

namespace auxcell {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: mesh resolution, moduli, config keys and values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Stiffness operator singular beyond rigid translations.
class IllPosedMaterial : public Error {
 public:
  using Error::Error;
};

/// Iterative solver hit its iteration cap.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class DegenerateTensor : public Error {
 public:
  using Error::Error;
};

/// A level set without a zero crossing (all nodes of one sign).
class DegenerateLevelSet : public Error {
 public:
  using Error::Error;
};

class CflViolation : public Error {
 public:
  using Error::Error;
};

/// Cell solutions used with a material field they were not computed on.
class StaleSolution : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace auxcell
