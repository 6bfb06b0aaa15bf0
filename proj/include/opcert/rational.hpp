#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace opcert {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rat& r) { return static_cast<double>(r); }

/// Gaussian rational: exact element of Q(i).
struct GRat {
  Rat re{0};
  Rat im{0};

  GRat() = default;
  GRat(Rat r) : re(std::move(r)) {}
  GRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
  GRat(int r) : re(r) {}

  bool is_zero() const { return re == 0 && im == 0; }
  GRat conj() const { return {re, -im}; }
  Rat norm_sq() const { return re * re + im * im; }

  friend GRat operator+(const GRat& a, const GRat& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GRat operator-(const GRat& a, const GRat& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GRat operator-(const GRat& a) { return {-a.re, -a.im}; }
  friend GRat operator*(const GRat& a, const GRat& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GRat operator/(const GRat& a, const GRat& b) {
    Rat d = b.norm_sq();
    if (d == 0) throw std::domain_error("GRat: division by zero");
    GRat num = a * b.conj();
    return {num.re / d, num.im / d};
  }
  GRat& operator+=(const GRat& b) { return *this = *this + b; }
  GRat& operator-=(const GRat& b) { return *this = *this - b; }
  GRat& operator*=(const GRat& b) { return *this = *this * b; }
  GRat& operator/=(const GRat& b) { return *this = *this / b; }
  friend bool operator==(const GRat& a, const GRat& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GRat& a, const GRat& b) { return !(a == b); }
};

// Scalar traits shared by the exact field types (Rat, GRat).
inline bool is_zero(const Rat& r) { return r == 0; }
inline bool is_zero(const GRat& g) { return g.is_zero(); }
inline Rat conj(const Rat& r) { return r; }
inline GRat conj(const GRat& g) { return g.conj(); }

/// Parses a rational literal: "p/q", "p", optional sign. Rejects q = 0.
inline Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      return Rat(BigInt(s));
    }
    BigInt p(s.substr(0, slash));
    BigInt q(s.substr(slash + 1));
    if (q == 0) throw std::invalid_argument("zero denominator");
    return Rat(p, q);
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid rational literal: '" + s + "'");
  }
}

inline std::string rat_to_string(const Rat& r) {
  BigInt num = numerator(r), den = denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

/// Continued-fraction rationalization of a double, denominator capped.
/// Returns nullopt when no convergent within the cap approximates x
/// to the requested accuracy.
inline std::optional<Rat> rationalize(double x, std::int64_t max_den = 1000000,
                                      double accuracy = 1e-7) {
  if (!std::isfinite(x)) return std::nullopt;
  // Convergents p_k/q_k of the continued fraction of x.
  double v = x;
  std::int64_t p0 = 1, q0 = 0;
  std::int64_t p1 = static_cast<std::int64_t>(std::floor(v)), q1 = 1;
  for (int it = 0; it < 64; ++it) {
    double approx = static_cast<double>(p1) / static_cast<double>(q1);
    if (std::abs(approx - x) <= accuracy * std::max(1.0, std::abs(x))) {
      return Rat(BigInt(p1), BigInt(q1));
    }
    double frac = v - std::floor(v);
    if (frac < 1e-15) break;
    v = 1.0 / frac;
    double af = std::floor(v);
    if (af > 4e18) break;
    std::int64_t a = static_cast<std::int64_t>(af);
    // overflow-safe advance
    if (q1 != 0 && (a > (max_den - q0) / q1)) break;
    std::int64_t p2 = a * p1 + p0;
    std::int64_t q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
  }
  double approx = static_cast<double>(p1) / static_cast<double>(q1);
  if (q1 <= max_den &&
      std::abs(approx - x) <= accuracy * std::max(1.0, std::abs(x))) {
    return Rat(BigInt(p1), BigInt(q1));
  }
  return std::nullopt;
}

}  // namespace opcert
