#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "opcert/linalg.hpp"
#include "opcert/rational.hpp"

namespace opcert {

/// Sparse multivariate polynomial over Q. Exponent vectors all share the
/// same variable count; the zero polynomial has an empty term map.
class Poly {
 public:
  using Monomial = std::vector<int>;

  Poly() = default;
  Poly(int v) {  // ring-element construction T(0)/T(1)
    if (v != 0) terms_[Monomial{}] = Rat(v);
  }
  static Poly constant(int nvars, Rat c) {
    Poly p;
    p.nvars_ = nvars;
    if (c != 0) p.terms_[Monomial{}] = std::move(c);
    return p;
  }
  static Poly variable(int nvars, int i, Rat coeff = Rat(1)) {
    Poly p;
    p.nvars_ = nvars;
    if (coeff != 0) {
      Monomial m(i + 1, 0);
      m[i] = 1;
      p.terms_[std::move(m)] = std::move(coeff);
    }
    return p;
  }

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, Rat>& terms() const { return terms_; }

  // Monomials are stored trailing-zero-trimmed so that polynomials built
  // with different nominal variable counts compare and combine correctly.
  void add_term(Monomial m, const Rat& c) {
    while (!m.empty() && m.back() == 0) m.pop_back();
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      if (c != 0) terms_[std::move(m)] = c;
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly r = a;
    r.nvars_ = std::max(a.nvars_, b.nvars_);
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
  }
  friend Poly operator-(const Poly& a, const Poly& b) {
    Poly r = a;
    r.nvars_ = std::max(a.nvars_, b.nvars_);
    for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
    return r;
  }
  friend Poly operator-(const Poly& a) {
    Poly r;
    r.nvars_ = a.nvars_;
    for (const auto& [m, c] : a.terms_) r.terms_[m] = -c;
    return r;
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    r.nvars_ = std::max(a.nvars_, b.nvars_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m(std::max(ma.size(), mb.size()), 0);
        for (size_t i = 0; i < ma.size(); ++i) m[i] += ma[i];
        for (size_t i = 0; i < mb.size(); ++i) m[i] += mb[i];
        r.add_term(std::move(m), ca * cb);
      }
    return r;
  }
  Poly& operator+=(const Poly& b) { return *this = *this + b; }
  Poly& operator-=(const Poly& b) { return *this = *this - b; }
  Poly& operator*=(const Poly& b) { return *this = *this * b; }
  friend bool operator==(const Poly& a, const Poly& b) {
    return (a - b).is_zero();
  }

  Rat eval(const Vec<Rat>& x) const {
    Rat acc(0);
    for (const auto& [m, c] : terms_) {
      Rat t = c;
      for (size_t i = 0; i < m.size(); ++i)
        for (int k = 0; k < m[i]; ++k) t *= x[i];
      acc += t;
    }
    return acc;
  }

  Poly derivative(int i) const {
    Poly r;
    r.nvars_ = nvars_;
    for (const auto& [m, c] : terms_) {
      if (i >= static_cast<int>(m.size()) || m[i] == 0) continue;
      Monomial d = m;
      d[i] -= 1;
      r.add_term(std::move(d), c * m[i]);
    }
    return r;
  }

  int degree() const {
    int d = -1;
    for (const auto& [m, c] : terms_) {
      int s = 0;
      for (int e : m) s += e;
      if (s > d) d = s;
    }
    return d;
  }

  std::string str(const std::string& var = "x") const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [m, c] : terms_) {
      if (!out.empty()) out += " + ";
      out += rat_to_string(c);
      for (size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) continue;
        out += "*" + var + std::to_string(i + 1);
        if (m[i] > 1) out += "^" + std::to_string(m[i]);
      }
    }
    return out;
  }

 private:
  int nvars_ = 0;
  std::map<Monomial, Rat> terms_;
};

inline bool is_zero(const Poly& p) { return p.is_zero(); }

/// All exponent vectors in n variables with total degree exactly d,
/// in lexicographic order.
inline void monomials_of_degree(int n, int d, std::vector<std::vector<int>>& out,
                                std::vector<int>& cur, int pos = 0) {
  if (pos == n - 1) {
    cur[pos] = d;
    out.push_back(cur);
    return;
  }
  for (int e = d; e >= 0; --e) {
    cur[pos] = e;
    monomials_of_degree(n, d - e, out, cur, pos + 1);
  }
}

inline std::vector<std::vector<int>> monomials_up_to_degree(int n, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  for (int k = 0; k <= d; ++k) monomials_of_degree(n, k, out, cur);
  return out;
}

}  // namespace opcert
