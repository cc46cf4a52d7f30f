#pragma once

#include <cmath>

namespace shelab::models {

/// Second-order forward-mode jet: value plus first and second derivative
/// with respect to one scalar input. Family formulas are written once as
/// templates over `double` and `Jet`, so derivatives come out exact up to
/// rounding instead of through finite differences.
struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  static constexpr Jet variable(double x) { return {x, 1.0, 0.0}; }
  static constexpr Jet constant(double x) { return {x, 0.0, 0.0}; }
};

inline Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet operator-(Jet a, Jet b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
inline Jet operator-(Jet a) { return {-a.v, -a.d1, -a.d2}; }
inline Jet operator+(Jet a, double c) { return {a.v + c, a.d1, a.d2}; }
inline Jet operator+(double c, Jet a) { return a + c; }
inline Jet operator-(Jet a, double c) { return {a.v - c, a.d1, a.d2}; }
inline Jet operator-(double c, Jet a) { return {c - a.v, -a.d1, -a.d2}; }
inline Jet operator*(Jet a, double c) { return {a.v * c, a.d1 * c, a.d2 * c}; }
inline Jet operator*(double c, Jet a) { return a * c; }
inline Jet operator/(Jet a, double c) { return {a.v / c, a.d1 / c, a.d2 / c}; }

inline Jet operator*(Jet a, Jet b) {
  return {a.v * b.v, a.v * b.d1 + a.d1 * b.v, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}

inline Jet operator/(Jet a, Jet b) {
  const double q = a.v / b.v;
  const double q1 = (a.d1 - q * b.d1) / b.v;
  const double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.v;
  return {q, q1, q2};
}

inline Jet operator/(double c, Jet b) { return Jet::constant(c) / b; }

/// Applies a scalar function given f, f', f'' at a.v (chain rule).
inline Jet compose(Jet a, double f, double f1, double f2) {
  return {f, f1 * a.d1, f2 * a.d1 * a.d1 + f1 * a.d2};
}

inline Jet exp(Jet a) {
  const double e = std::exp(a.v);
  return compose(a, e, e, e);
}

inline Jet log(Jet a) { return compose(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }

inline Jet log1p(Jet a) {
  const double s = 1.0 + a.v;
  return compose(a, std::log1p(a.v), 1.0 / s, -1.0 / (s * s));
}

inline Jet sqrt(Jet a) {
  const double s = std::sqrt(a.v);
  return compose(a, s, 0.5 / s, -0.25 / (s * a.v));
}

inline Jet sin(Jet a) {
  const double s = std::sin(a.v);
  const double c = std::cos(a.v);
  return compose(a, s, c, -s);
}

inline Jet cos(Jet a) {
  const double s = std::sin(a.v);
  const double c = std::cos(a.v);
  return compose(a, c, -s, -c);
}

/// x^p for x > 0, or any x when p is a nonnegative integer.
inline Jet pow(Jet a, double p) {
  if (p == 0.0) return Jet::constant(1.0);
  const double f = std::pow(a.v, p);
  const double f1 = (p == 1.0) ? 1.0 : p * std::pow(a.v, p - 1.0);
  const double f2 = (p == 1.0 || p == 2.0) ? (p == 2.0 ? 2.0 : 0.0)
                                           : p * (p - 1.0) * std::pow(a.v, p - 2.0);
  return compose(a, f, f1, f2);
}

// Scalar overloads so templated family code compiles for double.
inline double value_of(double x) { return x; }
inline double value_of(const Jet& j) { return j.v; }

}  // namespace shelab::models
