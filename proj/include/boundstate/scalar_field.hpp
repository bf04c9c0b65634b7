#pragma once

// Nonlinearity f(u) = -u + |u|^{p-1} u and the scalar functions of u built on
// it (potential well, parametric well, kappa_a, g1, g2, critical amplitudes).

#include <cmath>
#include <sstream>

#include "boundstate/errors.hpp"

namespace boundstate {

struct FieldParams {
  int n = 3;
  double p = 3.0;

  // (n + 2) / (n - 2), the critical Sobolev exponent.
  [[nodiscard]] double critical_exponent() const {
    return static_cast<double>(n + 2) / static_cast<double>(n - 2);
  }

  [[nodiscard]] bool valid() const {
    return n >= 3 && p > 1.0 && p < critical_exponent() && std::isfinite(p);
  }

  void validate() const {
    if (n < 3) {
      throw ParameterError("dimension n must be >= 3, got " + std::to_string(n));
    }
    if (!(p > 1.0) || !(p < critical_exponent())) {
      std::ostringstream oss;
      oss << "exponent p must lie in (1, " << critical_exponent() << ") for n = " << n
          << ", got " << p;
      throw ParameterError(oss.str());
    }
  }

  friend bool operator==(const FieldParams&, const FieldParams&) = default;
};

struct CriticalAmplitudes {
  double alpha_star = 0.0;        // positive zero of F
  double alpha_upper_star = 0.0;  // sign threshold of P'
};

// |u|^e for e > 0, routed through exp/log so non-integer exponents never see
// a negative base. Returns 0 at u = 0.
inline double pow_abs(double u, double e) {
  const double a = std::fabs(u);
  if (a == 0.0) {
    return 0.0;
  }
  return std::exp(e * std::log(a));
}

inline double f(double u, const FieldParams& fp) { return -u + pow_abs(u, fp.p - 1.0) * u; }

inline double f_prime(double u, const FieldParams& fp) {
  return -1.0 + fp.p * pow_abs(u, fp.p - 1.0);
}

// F(u) = -u^2/2 + |u|^{p+1}/(p+1).
inline double big_F(double u, const FieldParams& fp) {
  return -0.5 * u * u + pow_abs(u, fp.p + 1.0) / (fp.p + 1.0);
}

// F_a(u) = -u^2/2 + (1 - a(p-1)/2) |u|^{p+1}/(p+1); F_0 = F.
inline double big_F_a(double u, double a, const FieldParams& fp) {
  const double c = 1.0 - 0.5 * a * (fp.p - 1.0);
  return -0.5 * u * u + c * pow_abs(u, fp.p + 1.0) / (fp.p + 1.0);
}

// kappa_a(u) = ((a+2) f(u) - a u f'(u)) / (2u) in closed form, so that
// u * kappa_a(u) = F_a'(u) with no removable singularity at u = 0.
inline double kappa_a(double u, double a, const FieldParams& fp) {
  return (1.0 - 0.5 * a * (fp.p - 1.0)) * pow_abs(u, fp.p - 1.0) - 1.0;
}

inline double g1(double u, const FieldParams& fp) {
  if (u == 0.0) {
    throw SingularInput("g1 is undefined at u = 0");
  }
  const double inv = 1.0 / pow_abs(u, fp.p - 1.0);  // |u|^{1-p}
  return 2.0 * (1.0 - inv) / (fp.p - 1.0);
}

inline double g2(double u, const FieldParams& fp) {
  if (u == 0.0) {
    throw SingularInput("g2 is undefined at u = 0");
  }
  const double inv = 1.0 / pow_abs(u, fp.p - 1.0);
  return 2.0 * (1.0 - 0.5 * (fp.p + 1.0) * inv) / (fp.p - 1.0);
}

inline CriticalAmplitudes critical_amplitudes(const FieldParams& fp) {
  if (fp.n < 3) {
    throw ParameterError("dimension n must be >= 3");
  }
  if (!(fp.p > 1.0)) {
    throw ParameterError("exponent p must exceed 1");
  }
  const double denom = static_cast<double>(fp.n + 2) - fp.p * static_cast<double>(fp.n - 2);
  if (!(denom > 0.0)) {
    throw ParameterError("exponent p is at or above the critical exponent (n+2)/(n-2)");
  }
  const double e = 1.0 / (fp.p - 1.0);
  CriticalAmplitudes ca;
  ca.alpha_star = std::pow(0.5 * (fp.p + 1.0), e);
  ca.alpha_upper_star = std::pow(2.0 * (fp.p + 1.0) / denom, e);
  if (!(ca.alpha_upper_star > ca.alpha_star && ca.alpha_star > 1.0)) {
    throw ParameterError("critical amplitudes out of order");
  }
  return ca;
}

}  // namespace boundstate
