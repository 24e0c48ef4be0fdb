#pragma once

// Exact rational scalar and dense exact-matrix aliases used throughout the
// library. Construction-time linear algebra (kernels, ranks, tangent-space
// annihilators) is done exactly over Q; complex doubles appear only inside
// the iterative solver.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace oadp {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RationalVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline Complex to_complex(const Rational& q) { return Complex(to_double(q), 0.0); }

// Parses "p/q" or "p"; denominators are normalized positive and fractions
// reduced by the underlying GMP canonicalization.
inline Rational parse_rational(const std::string& text) {
  try {
    return Rational(text);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a rational literal: '" + text + "'");
  }
}

inline std::string to_string(const Rational& q) { return q.str(); }

// |q| comparison helper for canonical normalization of exact points.
inline Rational rational_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace oadp
