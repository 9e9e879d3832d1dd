#pragma once

#include <stdexcept>
#include <string>

namespace polymoments {

/// Input that violates a documented precondition (shapes, ranges, dimensions).
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base class for failures of a numerical procedure on otherwise valid input.
/// The command line front end maps these to exit status 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// L p came out with a higher degree than p: the operator is not polynomial.
class DegreeIncrease : public NumericalError {
 public:
  DegreeIncrease(int input_degree, int output_degree)
      : NumericalError("generator increases degree: deg(p) = " + std::to_string(input_degree) +
                       ", deg(Lp) = " + std::to_string(output_degree)),
        input_degree_(input_degree),
        output_degree_(output_degree) {}

  int input_degree() const { return input_degree_; }
  int output_degree() const { return output_degree_; }

 private:
  int input_degree_;
  int output_degree_;
};

class CholeskyFailure : public NumericalError {
 public:
  CholeskyFailure(double smallest_eigenvalue)
      : NumericalError("covariance is not positive definite after jitter; smallest eigenvalue " +
                       std::to_string(smallest_eigenvalue)),
        smallest_eigenvalue_(smallest_eigenvalue) {}

  double smallest_eigenvalue() const { return smallest_eigenvalue_; }

 private:
  double smallest_eigenvalue_;
};

/// Configuration document failed to parse or validate. `path` is a JSON pointer
/// to the offending field. Mapped to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace polymoments
