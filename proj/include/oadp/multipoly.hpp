#pragma once

// Dense exponent-map multivariate polynomials. Every polynomial in the
// catalog has at most ~10 variables and degree <= 8, so a std::map keyed by
// exponent vectors (deterministic iteration order) is simple and fast enough;
// the solver compiles systems into flat term arrays before iterating.

#include "oadp/rational.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <vector>

namespace oadp {

namespace detail {
template <class To, class From>
To coeff_cast(const From& c) {
  return static_cast<To>(c);
}
template <>
inline Complex coeff_cast<Complex, Rational>(const Rational& c) {
  return to_complex(c);
}
template <>
inline Rational coeff_cast<Rational, Rational>(const Rational& c) {
  return c;
}
}  // namespace detail

template <class Coeff>
class MultiPoly {
 public:
  using Monomial = std::vector<int>;
  using TermMap = std::map<Monomial, Coeff>;

  MultiPoly() : nvars_(0) {}
  explicit MultiPoly(int nvars) : nvars_(nvars) {}

  static MultiPoly constant(int nvars, const Coeff& c) {
    MultiPoly p(nvars);
    p.add_term(Monomial(nvars, 0), c);
    return p;
  }
  static MultiPoly variable(int nvars, int i) {
    MultiPoly p(nvars);
    Monomial m(nvars, 0);
    m[i] = 1;
    p.add_term(m, Coeff(1));
    return p;
  }

  int num_vars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }

  void add_term(const Monomial& m, const Coeff& c) {
    if (c == Coeff(0)) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
    } else {
      it->second += c;
      if (it->second == Coeff(0)) terms_.erase(it);
    }
  }

  MultiPoly& operator+=(const MultiPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  MultiPoly& operator-=(const MultiPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, Coeff(-c));
    return *this;
  }
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator-(const MultiPoly& a) {
    MultiPoly r(a.nvars_);
    for (const auto& [m, c] : a.terms_) r.terms_.emplace(m, Coeff(-c));
    return r;
  }

  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    MultiPoly r(a.nvars_);
    Monomial m(a.nvars_, 0);
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        for (int i = 0; i < a.nvars_; ++i) m[i] = ma[i] + mb[i];
        r.add_term(m, ca * cb);
      }
    }
    return r;
  }
  friend MultiPoly operator*(const Coeff& s, const MultiPoly& a) {
    MultiPoly r(a.nvars_);
    if (s == Coeff(0)) return r;
    for (const auto& [m, c] : a.terms_) r.terms_.emplace(m, s * c);
    return r;
  }
  friend MultiPoly operator*(const MultiPoly& a, const Coeff& s) { return s * a; }

  MultiPoly derivative(int var) const {
    MultiPoly r(nvars_);
    for (const auto& [m, c] : terms_) {
      if (m[var] == 0) continue;
      Monomial d = m;
      d[var] -= 1;
      r.add_term(d, c * Coeff(m[var]));
    }
    return r;
  }

  int total_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) {
      int s = 0;
      for (int e : m) s += e;
      d = std::max(d, s);
    }
    return d;
  }
  int degree_in(int var) const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m[var]);
    return d;
  }
  bool is_homogeneous(int degree) const {
    for (const auto& [m, c] : terms_) {
      int s = 0;
      for (int e : m) s += e;
      if (s != degree) return false;
    }
    return true;
  }

  // Evaluation at a point of any scalar type the coefficients convert to.
  template <class T, class Vec>
  T eval(const Vec& u) const {
    T acc(0);
    for (const auto& [m, c] : terms_) {
      T t = detail::coeff_cast<T>(c);
      for (int i = 0; i < nvars_; ++i)
        for (int e = 0; e < m[i]; ++e) t *= u[i];
      acc += t;
    }
    return acc;
  }

  // Substitution of one polynomial per variable (all sharing a variable set).
  MultiPoly compose(const std::vector<MultiPoly>& args) const {
    const int out_vars = args.empty() ? 0 : args.front().num_vars();
    // Memoized powers of each argument, grown on demand.
    std::vector<std::vector<MultiPoly>> pow(args.size());
    for (size_t i = 0; i < args.size(); ++i) pow[i].push_back(MultiPoly::constant(out_vars, Coeff(1)));
    MultiPoly r(out_vars);
    for (const auto& [m, c] : terms_) {
      MultiPoly t = MultiPoly::constant(out_vars, c);
      for (int i = 0; i < nvars_; ++i) {
        while (static_cast<int>(pow[i].size()) <= m[i]) pow[i].push_back(pow[i].back() * args[i]);
        if (m[i] > 0) t = t * pow[i][m[i]];
      }
      r += t;
    }
    return r;
  }

  // Same polynomial seen inside a larger variable set, variables shifted by
  // `offset` (used to build two-point secant systems on (u, v, lambda)).
  MultiPoly embed(int new_nvars, int offset) const {
    MultiPoly r(new_nvars);
    Monomial m(new_nvars, 0);
    for (const auto& [me, c] : terms_) {
      std::fill(m.begin(), m.end(), 0);
      for (int i = 0; i < nvars_; ++i) m[offset + i] = me[i];
      r.terms_.emplace(m, c);
    }
    return r;
  }

  // Homogenization with respect to a fresh variable prepended at index 0.
  MultiPoly homogenize(int degree) const {
    MultiPoly r(nvars_ + 1);
    Monomial m(nvars_ + 1, 0);
    for (const auto& [me, c] : terms_) {
      int s = 0;
      for (int e : me) s += e;
      m[0] = degree - s;
      for (int i = 0; i < nvars_; ++i) m[i + 1] = me[i];
      r.terms_.emplace(m, c);
    }
    return r;
  }

  template <class To, class F>
  MultiPoly<To> map_coefficients(F&& f) const {
    MultiPoly<To> r(nvars_);
    for (const auto& [m, c] : terms_) r.add_term(m, f(c));
    return r;
  }

  std::string str(const std::vector<std::string>& names = {}) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << "(" << c << ")";
      for (int i = 0; i < nvars_; ++i) {
        if (m[i] == 0) continue;
        os << "*" << (i < static_cast<int>(names.size()) ? names[i] : "x" + std::to_string(i));
        if (m[i] > 1) os << "^" << m[i];
      }
    }
    return os.str();
  }

  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

 private:
  int nvars_;
  TermMap terms_;
};

using RationalPoly = MultiPoly<Rational>;
using ComplexPoly = MultiPoly<Complex>;

inline ComplexPoly to_complex_poly(const RationalPoly& p) {
  return p.map_coefficients<Complex>([](const Rational& c) { return to_complex(c); });
}

}  // namespace oadp
