#include "oadp/linalg.hpp"

#include <boost/multiprecision/gmp.hpp>

#include <stdexcept>

namespace oadp {

namespace {

// Scales each row to integer entries (kernel and rank are row-scaling
// invariant), then runs one-step Bareiss elimination: all intermediate
// entries are minors of the scaled matrix, so the division by the previous
// pivot is exact and coefficient growth stays polynomial.
struct Echelon {
  RationalMatrix mat;          // echelon form (integer entries)
  std::vector<int> pivot_cols; // one per pivot row, increasing
};

Echelon fraction_free_echelon(const RationalMatrix& input) {
  RationalMatrix a = input;
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());
  for (int i = 0; i < rows; ++i) {
    Integer l(1);
    for (int j = 0; j < cols; ++j) l = lcm(l, Integer(denominator(a(i, j))));
    if (l != 1) {
      const Rational s(l);
      for (int j = 0; j < cols; ++j) a(i, j) *= s;
    }
  }
  Echelon e;
  Rational prev_pivot(1);
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int pr = -1;
    for (int i = row; i < rows; ++i) {
      if (a(i, col) != 0) {
        pr = i;
        break;
      }
    }
    if (pr < 0) continue;
    if (pr != row) a.row(pr).swap(a.row(row));
    const Rational pivot = a(row, col);
    for (int i = row + 1; i < rows; ++i) {
      const Rational factor = a(i, col);
      for (int j = col; j < cols; ++j)
        a(i, j) = (a(i, j) * pivot - factor * a(row, j)) / prev_pivot;
    }
    prev_pivot = pivot;
    e.pivot_cols.push_back(col);
    ++row;
  }
  e.mat = std::move(a);
  return e;
}

RationalVector make_primitive(const RationalVector& v) {
  Integer den_lcm(1);
  for (int i = 0; i < v.size(); ++i) den_lcm = lcm(den_lcm, Integer(denominator(v[i])));
  Integer num_gcd(0);
  RationalVector r = v;
  for (int i = 0; i < r.size(); ++i) {
    r[i] *= Rational(den_lcm);
    num_gcd = gcd(num_gcd, Integer(numerator(r[i])));
  }
  if (num_gcd == 0) return r;
  int lead = -1;
  for (int i = 0; i < r.size(); ++i) {
    r[i] /= Rational(num_gcd);
    if (lead < 0 && r[i] != 0) lead = i;
  }
  if (lead >= 0 && r[lead] < 0)
    for (int i = 0; i < r.size(); ++i) r[i] = -r[i];
  return r;
}

}  // namespace

std::vector<RationalVector> rational_kernel(const RationalMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw std::invalid_argument("rational_kernel of empty matrix");
  const Echelon e = fraction_free_echelon(m);
  const int cols = static_cast<int>(m.cols());
  const int rank = static_cast<int>(e.pivot_cols.size());
  std::vector<bool> is_pivot(cols, false);
  for (int c : e.pivot_cols) is_pivot[c] = true;
  std::vector<RationalVector> basis;
  for (int free_col = 0; free_col < cols; ++free_col) {
    if (is_pivot[free_col]) continue;
    RationalVector v = RationalVector::Zero(cols);
    v[free_col] = 1;
    // Back-substitution through the echelon rows, bottom-up.
    for (int r = rank - 1; r >= 0; --r) {
      const int pc = e.pivot_cols[r];
      if (pc > free_col) continue;
      Rational acc(0);
      for (int j = pc + 1; j < cols; ++j)
        if (e.mat(r, j) != 0 && v[j] != 0) acc += e.mat(r, j) * v[j];
      v[pc] = -acc / e.mat(r, pc);
    }
    basis.push_back(make_primitive(v));
  }
  return basis;
}

int rational_rank(const RationalMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  return static_cast<int>(fraction_free_echelon(m).pivot_cols.size());
}

int numeric_rank(const ComplexMatrix& m, double tol) {
  if (tol <= 0) throw std::invalid_argument("numeric_rank needs tol > 0");
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > tol * sv[0]) ++r;
  return r;
}

bool in_rational_span(const std::vector<RationalVector>& basis, const RationalVector& v) {
  if (basis.empty()) {
    for (int i = 0; i < v.size(); ++i)
      if (v[i] != 0) return false;
    return true;
  }
  const int cols = static_cast<int>(v.size());
  RationalMatrix with(static_cast<int>(basis.size()) + 1, cols);
  for (size_t i = 0; i < basis.size(); ++i) with.row(static_cast<int>(i)) = basis[i].transpose();
  with.row(static_cast<int>(basis.size())) = v.transpose();
  return rational_rank(with) == rational_rank(with.topRows(static_cast<int>(basis.size())));
}

RationalVector random_rational_point(SplitRng& rng, int size, long bound) {
  RationalVector v(size);
  for (int i = 0; i < size; ++i) v[i] = Rational(rng.nonzero_int(bound));
  return v;
}

RationalMatrix random_invertible_matrix(SplitRng& rng, int size, long bound) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    RationalMatrix m(size, size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) m(i, j) = Rational(rng.uniform_int(-bound, bound));
    if (rational_rank(m) == size) return m;
  }
  throw std::runtime_error("failed to draw an invertible matrix");
}

}  // namespace oadp

namespace oadp {

namespace {
void homogeneous_monomials_rec(int nhom, int d, std::vector<int>& current,
                               std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == nhom - 1) {
    current.push_back(d);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int e = d; e >= 0; --e) {
    current.push_back(e);
    homogeneous_monomials_rec(nhom, d - e, current, out);
    current.pop_back();
  }
}
}  // namespace

std::vector<std::vector<int>> homogeneous_monomials(int nhom, int d) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  homogeneous_monomials_rec(nhom, d, current, out);
  return out;
}

}  // namespace oadp
