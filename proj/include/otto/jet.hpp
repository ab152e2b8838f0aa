#pragma once

#include <cmath>

namespace otto {

/// Second-order truncated Taylor polynomial in two variables (x, y):
///   f + fx dx + fy dy + 1/2 fxx dx^2 + fxy dx dy + 1/2 fyy dy^2.
///
/// Forward-mode arithmetic on Jet2 yields exact first and second partials of
/// any expression built from the operations below.
struct Jet2 {
  double v = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  double dxx = 0.0;
  double dxy = 0.0;
  double dyy = 0.0;

  constexpr Jet2() = default;
  constexpr Jet2(double value) : v(value) {}  // NOLINT: constants promote implicitly
  constexpr Jet2(double value, double gx, double gy, double hxx, double hxy, double hyy)
      : v(value), dx(gx), dy(gy), dxx(hxx), dxy(hxy), dyy(hyy) {}

  static constexpr Jet2 variable_x(double x) { return {x, 1.0, 0.0, 0.0, 0.0, 0.0}; }
  static constexpr Jet2 variable_y(double y) { return {y, 0.0, 1.0, 0.0, 0.0, 0.0}; }

  bool is_constant() const noexcept {
    return dx == 0.0 && dy == 0.0 && dxx == 0.0 && dxy == 0.0 && dyy == 0.0;
  }
  bool is_finite() const noexcept {
    return std::isfinite(v) && std::isfinite(dx) && std::isfinite(dy) && std::isfinite(dxx) &&
           std::isfinite(dxy) && std::isfinite(dyy);
  }
};

/// Composes a scalar function with value f, derivative f1 and second derivative
/// f2 (all taken at a.v) with the jet a.
inline Jet2 chain(const Jet2& a, double f, double f1, double f2) {
  return {f,
          f1 * a.dx,
          f1 * a.dy,
          f2 * a.dx * a.dx + f1 * a.dxx,
          f2 * a.dx * a.dy + f1 * a.dxy,
          f2 * a.dy * a.dy + f1 * a.dyy};
}

inline Jet2 operator-(const Jet2& a) { return {-a.v, -a.dx, -a.dy, -a.dxx, -a.dxy, -a.dyy}; }

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  return {a.v + b.v, a.dx + b.dx, a.dy + b.dy, a.dxx + b.dxx, a.dxy + b.dxy, a.dyy + b.dyy};
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  return {a.v - b.v, a.dx - b.dx, a.dy - b.dy, a.dxx - b.dxx, a.dxy - b.dxy, a.dyy - b.dyy};
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  return {a.v * b.v,
          a.dx * b.v + a.v * b.dx,
          a.dy * b.v + a.v * b.dy,
          a.dxx * b.v + 2.0 * a.dx * b.dx + a.v * b.dxx,
          a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy,
          a.dyy * b.v + 2.0 * a.dy * b.dy + a.v * b.dyy};
}

inline Jet2 inv(const Jet2& a) {
  const double r = 1.0 / a.v;
  return chain(a, r, -r * r, 2.0 * r * r * r);
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
  if (b.is_constant()) {
    return {a.v / b.v, a.dx / b.v, a.dy / b.v, a.dxx / b.v, a.dxy / b.v, a.dyy / b.v};
  }
  return a * inv(b);
}

inline Jet2 sqrt(const Jet2& a) {
  const double s = std::sqrt(a.v);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

inline Jet2 log(const Jet2& a) { return chain(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }

inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.v);
  return chain(a, e, e, e);
}

/// a^p for a constant exponent; valid for negative a when p is an integer.
inline Jet2 pow(const Jet2& a, double p) {
  if (p == 0.0) return Jet2(1.0);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return chain(a, std::pow(a.v, p), p * std::pow(a.v, p - 1.0),
               p * (p - 1.0) * std::pow(a.v, p - 2.0));
}

inline Jet2 pow(const Jet2& a, const Jet2& b) {
  if (b.is_constant()) return pow(a, b.v);
  return exp(b * log(a));
}

}  // namespace otto
