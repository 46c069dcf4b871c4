#pragma once

#include <cmath>
#include <complex>

namespace intop {

/// Value with first and second derivative in one variable.
struct Jet2 {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  static Jet2 variable(double x) { return {x, 1.0, 0.0}; }
  static Jet2 constant(double x) { return {x, 0.0, 0.0}; }
};

inline Jet2 operator+(Jet2 a, Jet2 b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet2 operator-(Jet2 a, Jet2 b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
inline Jet2 operator-(Jet2 a) { return {-a.v, -a.d1, -a.d2}; }
inline Jet2 operator*(double s, Jet2 a) { return {s * a.v, s * a.d1, s * a.d2}; }
inline Jet2 operator*(Jet2 a, double s) { return s * a; }
inline Jet2 operator+(Jet2 a, double s) { return {a.v + s, a.d1, a.d2}; }
inline Jet2 operator-(Jet2 a, double s) { return {a.v - s, a.d1, a.d2}; }

inline Jet2 operator*(Jet2 a, Jet2 b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1,
          a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}

inline Jet2 reciprocal(Jet2 a) {
  const double inv = 1.0 / a.v;
  return {inv, -a.d1 * inv * inv,
          (2.0 * a.d1 * a.d1 * inv - a.d2) * inv * inv};
}

inline Jet2 operator/(Jet2 a, Jet2 b) { return a * reciprocal(b); }
inline Jet2 operator/(Jet2 a, double s) { return (1.0 / s) * a; }

inline Jet2 exp(Jet2 a) {
  const double e = std::exp(a.v);
  return {e, e * a.d1, e * (a.d2 + a.d1 * a.d1)};
}

/// Chain rule for a scalar function with known f, f', f'' at a.v.
inline Jet2 compose(Jet2 a, double f, double df, double d2f) {
  return {f, df * a.d1, d2f * a.d1 * a.d1 + df * a.d2};
}

/// Complex-valued jet, used for linear combinations of real jets.
struct ComplexJet {
  std::complex<double> v{};
  std::complex<double> d1{};
  std::complex<double> d2{};

  void add(std::complex<double> amplitude, const Jet2& j) {
    v += amplitude * j.v;
    d1 += amplitude * j.d1;
    d2 += amplitude * j.d2;
  }
};

}  // namespace intop
