#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cavityq {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Matrix4c = Eigen::Matrix4cd;
using Matrix2c = Eigen::Matrix2cd;

inline constexpr cplx I{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorKind {
  InvalidArgument,
  CutoffOverflow,
  BadAxis,
  QuadratureNonConvergence,
  StepControlFailure,
  EigenFailure,
  EnvelopeUnsuitable,
  DimensionTooLarge,
  ConfigError,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Configuration problems map to exit code 2, everything else numerical to 3.
inline bool is_config_error(ErrorKind k) {
  return k == ErrorKind::ConfigError || k == ErrorKind::InvalidArgument ||
         k == ErrorKind::BadAxis || k == ErrorKind::EnvelopeUnsuitable;
}

}  // namespace cavityq
