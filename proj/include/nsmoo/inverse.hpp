#pragma once

// Inference of objective functions from Pareto critical data.
//
// With f_i = sum_j c_ij b_j, the KKT condition sum_i alpha_i grad f_i(x) = 0
// is linear in c.  Stacking it over all data gives L c = 0; the right singular
// vector of the smallest singular value s yields objectives with
// ||sum_i alpha_i grad f_i(x)|| <= s at every datum.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "nsmoo/core.hpp"

namespace nsmoo {

struct BasisFunction {
  std::string name;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

struct BasisSet {
  std::string name;
  std::vector<BasisFunction> functions;

  std::size_t size() const noexcept { return functions.size(); }
};

/// All monomials in n variables of total degree 0..degree, ordered by degree
/// and then lexicographically by exponent (x_1 first).
inline BasisSet polynomial_basis(std::size_t n, int degree) {
  if (n == 0) throw PreconditionError("polynomial basis: n must be positive");
  if (degree < 1) throw PreconditionError("polynomial basis: degree must be positive");
  BasisSet basis;
  basis.name = "poly" + std::to_string(degree);
  std::vector<std::vector<int>> exps;
  std::vector<int> e(n, 0);
  // enumerate exponents of total degree d, x_1's exponent descending
  std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int left) {
    if (pos + 1 == n) {
      e[pos] = left;
      exps.push_back(e);
      return;
    }
    for (int a = left; a >= 0; --a) {
      e[pos] = a;
      rec(pos + 1, left - a);
    }
  };
  for (int d = 0; d <= degree; ++d) rec(0, d);

  for (const auto& ex : exps) {
    BasisFunction f;
    for (std::size_t i = 0; i < n; ++i) {
      if (ex[i] == 0) continue;
      if (!f.name.empty()) f.name += "*";
      f.name += "x" + std::to_string(i + 1);
      if (ex[i] > 1) f.name += "^" + std::to_string(ex[i]);
    }
    if (f.name.empty()) f.name = "1";
    f.value = [ex](const Vector& x) {
      double v = 1.0;
      for (std::size_t i = 0; i < ex.size(); ++i) v *= std::pow(x[static_cast<Eigen::Index>(i)], ex[i]);
      return v;
    };
    f.gradient = [ex](const Vector& x) -> Vector {
      Vector g = Vector::Zero(x.size());
      for (std::size_t j = 0; j < ex.size(); ++j) {
        if (ex[j] == 0) continue;
        double v = ex[j] * std::pow(x[static_cast<Eigen::Index>(j)], ex[j] - 1);
        for (std::size_t i = 0; i < ex.size(); ++i)
          if (i != j) v *= std::pow(x[static_cast<Eigen::Index>(i)], ex[i]);
        g[static_cast<Eigen::Index>(j)] = v;
      }
      return g;
    };
    basis.functions.push_back(std::move(f));
  }
  return basis;
}

inline BasisSet basis_by_name(const std::string& name, std::size_t n) {
  if (name == "poly2") return polynomial_basis(n, 2);
  if (name == "poly3") return polynomial_basis(n, 3);
  throw PreconditionError("unknown basis '" + name + "' (expected poly2 or poly3)");
}

struct ParetoDatum {
  Vector x;
  SimplexWeights alpha;
};

/// Rows (datum m, component r) -> m * n + r; columns (objective i, basis j) -> i * d + j.
inline Matrix assemble_system(const std::vector<ParetoDatum>& data, const BasisSet& basis, std::size_t k) {
  if (data.empty()) throw PreconditionError("assemble_system: no data");
  if (basis.size() == 0) throw PreconditionError("assemble_system: empty basis");
  const Eigen::Index n = data.front().x.size();
  const auto d = static_cast<Eigen::Index>(basis.size());
  const auto kk = static_cast<Eigen::Index>(k);
  Matrix M = Matrix::Zero(static_cast<Eigen::Index>(data.size()) * n, kk * d);
  for (std::size_t m = 0; m < data.size(); ++m) {
    const ParetoDatum& dat = data[m];
    if (dat.x.size() != n) throw PreconditionError("assemble_system: data points differ in dimension");
    if (dat.alpha.size() != k) throw PreconditionError("assemble_system: alpha has wrong length");
    const Eigen::Index row = static_cast<Eigen::Index>(m) * n;
    for (Eigen::Index j = 0; j < d; ++j) {
      const Vector g = basis.functions[static_cast<std::size_t>(j)].gradient(dat.x);
      for (Eigen::Index i = 0; i < kk; ++i) {
        const double a = dat.alpha[static_cast<std::size_t>(i)];
        if (a != 0.0) M.block(row, i * d + j, n, 1) = a * g;
      }
    }
  }
  return M;
}

struct SingularPair {
  double value = 0.0;
  Vector vector;                  // unit, first nonzero entry positive
  std::size_t null_dimension = 0;  // numerical nullity of M
};

/// Smallest singular value of M and its right singular vector.  For wide
/// matrices (rows < cols) the value is 0 and the vector spans part of the
/// null space.
inline SingularPair smallest_singular_vector(const Matrix& M) {
  if (M.size() == 0) throw PreconditionError("smallest_singular_vector: empty matrix");
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const Eigen::Index cols = M.cols();
  SingularPair out;
  out.vector = svd.matrixV().col(cols - 1);
  out.value = cols > sv.size() ? 0.0 : sv[sv.size() - 1];

  const double tol = 1e-12 * (sv.size() ? sv[0] : 0.0);
  std::size_t nullity = static_cast<std::size_t>(cols - sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] <= tol) ++nullity;
  out.null_dimension = nullity;

  for (Eigen::Index i = 0; i < out.vector.size(); ++i) {
    if (std::abs(out.vector[i]) > 1e-12) {
      if (out.vector[i] < 0.0) out.vector = -out.vector;
      break;
    }
  }
  return out;
}

struct InverseResult {
  Matrix coefficients;  // k x d, Frobenius norm 1
  double smallest_singular = 0.0;
  std::vector<double> residuals;  // ||sum_i alpha_i grad f_i(x)|| per datum
  std::size_t null_dimension = 0;
  bool underdetermined = false;  // k d > |D| n
};

/// Gradient of f_i = sum_j c_ij b_j at x.
inline Vector recovered_gradient(const InverseResult& r, const BasisSet& basis, std::size_t i, const Vector& x) {
  Vector g = Vector::Zero(x.size());
  for (std::size_t j = 0; j < basis.size(); ++j)
    g += r.coefficients(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * basis.functions[j].gradient(x);
  return g;
}

inline InverseResult infer(const std::vector<ParetoDatum>& data, const BasisSet& basis, std::size_t k) {
  const Matrix M = assemble_system(data, basis, k);
  const SingularPair sp = smallest_singular_vector(M);
  const auto d = static_cast<Eigen::Index>(basis.size());
  const auto kk = static_cast<Eigen::Index>(k);

  InverseResult out;
  out.coefficients.resize(kk, d);
  for (Eigen::Index i = 0; i < kk; ++i) out.coefficients.row(i) = sp.vector.segment(i * d, d).transpose();
  out.smallest_singular = sp.value;
  out.null_dimension = sp.null_dimension;
  out.underdetermined = M.cols() > M.rows();

  const Vector Mv = M * sp.vector;
  const Eigen::Index n = data.front().x.size();
  for (std::size_t m = 0; m < data.size(); ++m) out.residuals.push_back(Mv.segment(static_cast<Eigen::Index>(m) * n, n).norm());
  return out;
}

}  // namespace nsmoo
