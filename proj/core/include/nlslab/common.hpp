#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nlslab {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr cplx kI{0.0, 1.0};
inline const double kSqrt2Pi = std::sqrt(2.0 * kPi);

// Error taxonomy mirrored by the CLI exit codes: config=2, contract=3,
// numerical=4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Composite trapezoid weight: 1/2 at both ends, 1 inside.
inline double trapz(const Vec& f, double dx) {
  const Eigen::Index n = f.size();
  if (n < 2) return 0.0;
  return dx * (f.sum() - 0.5 * (f[0] + f[n - 1]));
}

inline cplx trapz(const CVec& f, double dx) {
  const Eigen::Index n = f.size();
  if (n < 2) return cplx{0.0, 0.0};
  return dx * (f.sum() - 0.5 * (f[0] + f[n - 1]));
}

inline double japanese_bracket(double x) { return std::sqrt(1.0 + x * x); }

}  // namespace nlslab
