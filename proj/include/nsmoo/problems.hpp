#pragma once

// Analytic test problems with known Pareto sets.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nsmoo/continuation.hpp"
#include "nsmoo/core.hpp"

namespace nsmoo {

/// Description of a problem's Pareto set plus the Euclidean distance to it.
struct KnownSolution {
  std::string description;
  std::function<double(const Vector&)> distance;
};

inline double distance_to_segment(const Vector& x, const Vector& a, const Vector& b) {
  const Vector d = b - a;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((x - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (x - (a + t * d)).norm();
}

struct CatalogProblem {
  MopProblem problem;
  std::optional<KnownSolution> known;
};

/// f_i(x) = ||x - c_i||^2, i = 1, 2.  Pareto set: the segment [c1, c2].
inline CatalogProblem make_paraboloid(const Vector& c1, const Vector& c2) {
  if (c1.size() != c2.size() || c1.size() == 0) throw PreconditionError("paraboloid: centers must share a positive dimension");
  if (c1 == c2) throw PreconditionError("paraboloid: centers must differ");
  CatalogProblem out;
  out.problem.name = "paraboloid";
  out.problem.n = static_cast<std::size_t>(c1.size());
  for (const Vector& c : {c1, c2}) {
    Objective obj;
    obj.value = [c](const Vector& x) { return (x - c).squaredNorm(); };
    obj.subgrad = [c](const Vector& x) -> Vector { return 2.0 * (x - c); };
    obj.smooth = true;
    out.problem.objectives.push_back(std::move(obj));
    out.problem.lipschitz_hint.emplace_back(std::nullopt);
  }
  out.known = KnownSolution{"segment [c1, c2]", [c1, c2](const Vector& x) { return distance_to_segment(x, c1, c2); }};
  return out;
}

/// f_1 = |x_1| + x_2^2, f_2 = |x_1 - shift| + x_2^2 on R^2.  The subgradient of
/// |.| at its kink is taken as 0.
inline CatalogProblem make_abs_biobjective(double shift) {
  if (!(shift > 0.0)) throw PreconditionError("abs_biobjective: shift must be positive");
  auto sgn = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };
  CatalogProblem out;
  out.problem.name = "abs_biobjective";
  out.problem.n = 2;
  for (double center : {0.0, shift}) {
    Objective obj;
    obj.value = [center](const Vector& x) { return std::abs(x[0] - center) + x[1] * x[1]; };
    obj.subgrad = [center, sgn](const Vector& x) -> Vector {
      Vector g(2);
      g << sgn(x[0] - center), 2.0 * x[1];
      return g;
    };
    out.problem.objectives.push_back(std::move(obj));
    out.problem.lipschitz_hint.emplace_back(std::nullopt);
  }
  Vector a = Vector::Zero(2);
  Vector b(2);
  b << shift, 0.0;
  out.known = KnownSolution{"{x_2 = 0, 0 <= x_1 <= shift}", [a, b](const Vector& x) { return distance_to_segment(x, a, b); }};
  return out;
}

/// f(x) = ||x - center||^2 (k = 1).  Pareto set: {center}.
inline CatalogProblem make_sphere(const Vector& center) {
  if (center.size() == 0) throw PreconditionError("sphere: empty center");
  CatalogProblem out;
  out.problem.name = "sphere";
  out.problem.n = static_cast<std::size_t>(center.size());
  Objective obj;
  obj.value = [center](const Vector& x) { return (x - center).squaredNorm(); };
  obj.subgrad = [center](const Vector& x) -> Vector { return 2.0 * (x - center); };
  obj.smooth = true;
  out.problem.objectives.push_back(std::move(obj));
  out.problem.lipschitz_hint.emplace_back(std::nullopt);
  out.known = KnownSolution{"{center}", [center](const Vector& x) { return (x - center).norm(); }};
  return out;
}

struct L1Quadratic {
  SmoothObjective loss;  // L(x) = 0.5 ||Ax - b||^2
  MopProblem problem;    // (L, ||.||_1)
  bool rank_deficient = false;
};

inline L1Quadratic make_l1_quadratic(const Matrix& A, const Vector& b) {
  if (A.rows() != b.size()) throw PreconditionError("l1_quadratic: A and b disagree in rows");
  if (A.cols() == 0) throw PreconditionError("l1_quadratic: A has no columns");
  L1Quadratic out;
  const auto n = static_cast<std::size_t>(A.cols());
  const Matrix AtA = A.transpose() * A;
  out.rank_deficient = Eigen::FullPivLU<Matrix>(A).rank() < A.cols();

  out.loss.n = n;
  out.loss.value = [A, b](const Vector& x) { return 0.5 * (A * x - b).squaredNorm(); };
  out.loss.gradient = [A, b](const Vector& x) -> Vector { return A.transpose() * (A * x - b); };
  out.loss.hessian = [AtA](const Vector&) -> Matrix { return AtA; };

  out.problem.name = "l1_quadratic";
  out.problem.n = n;
  Objective loss;
  loss.value = out.loss.value;
  loss.subgrad = out.loss.gradient;
  loss.smooth = true;
  Objective l1;
  l1.value = [](const Vector& x) { return x.lpNorm<1>(); };
  l1.subgrad = [](const Vector& x) -> Vector {
    return x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
  };
  out.problem.objectives = {std::move(loss), std::move(l1)};
  out.problem.lipschitz_hint = {std::nullopt, std::sqrt(static_cast<double>(n))};
  return out;
}

/// Named constructor parameters.  Vectors are stored as single columns and
/// scalars as 1x1 matrices.
using ParamMap = std::map<std::string, Matrix>;

struct ProblemCatalogEntry {
  std::string name;
  std::string description;
  std::vector<std::pair<std::string, std::string>> parameters;  // name, default
  std::function<CatalogProblem(const ParamMap&)> make;
};

namespace detail {

inline void reject_unknown(const ParamMap& params, const std::vector<std::string>& known, const std::string& problem) {
  for (const auto& [key, value] : params) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw PreconditionError(problem + ": unknown parameter '" + key + "'");
  }
}

inline Vector param_vector(const ParamMap& params, const std::string& key, Vector fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  const Matrix& m = it->second;
  if (m.cols() != 1) throw PreconditionError("parameter '" + key + "' must be a vector");
  return m.col(0);
}

inline double param_scalar(const ParamMap& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (it->second.size() != 1) throw PreconditionError("parameter '" + key + "' must be a scalar");
  return it->second(0, 0);
}

inline Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace detail

inline const std::vector<ProblemCatalogEntry>& problem_catalog() {
  static const std::vector<ProblemCatalogEntry> catalog = {
      {"paraboloid",
       "f_i(x) = ||x - c_i||^2, i = 1,2; Pareto set is the segment [c1, c2]",
       {{"c1", "[0, 0]"}, {"c2", "[1, 0.5]"}},
       [](const ParamMap& p) {
         detail::reject_unknown(p, {"c1", "c2"}, "paraboloid");
         return make_paraboloid(detail::param_vector(p, "c1", detail::vec2(0.0, 0.0)),
                                detail::param_vector(p, "c2", detail::vec2(1.0, 0.5)));
       }},
      {"abs_biobjective",
       "f_1 = |x_1| + x_2^2, f_2 = |x_1 - shift| + x_2^2; Pareto set {x_2 = 0, 0 <= x_1 <= shift}",
       {{"shift", "2"}},
       [](const ParamMap& p) {
         detail::reject_unknown(p, {"shift"}, "abs_biobjective");
         return make_abs_biobjective(detail::param_scalar(p, "shift", 2.0));
       }},
      {"sphere",
       "f(x) = ||x - center||^2 (single objective); Pareto set {center}",
       {{"center", "[0, 0]"}},
       [](const ParamMap& p) {
         detail::reject_unknown(p, {"center"}, "sphere");
         return make_sphere(detail::param_vector(p, "center", detail::vec2(0.0, 0.0)));
       }},
      {"l1_quadratic",
       "(L(x), ||x||_1) with L(x) = 0.5 ||Ax - b||^2",
       {{"A", "identity of size |b|"}, {"b", "[3, 1]"}},
       [](const ParamMap& p) {
         detail::reject_unknown(p, {"A", "b"}, "l1_quadratic");
         const Vector b = detail::param_vector(p, "b", detail::vec2(3.0, 1.0));
         auto it = p.find("A");
         const Matrix A = it == p.end() ? Matrix(Matrix::Identity(b.size(), b.size())) : it->second;
         return CatalogProblem{make_l1_quadratic(A, b).problem, std::nullopt};
       }},
  };
  return catalog;
}

inline const ProblemCatalogEntry& find_problem(const std::string& name) {
  for (const auto& e : problem_catalog())
    if (e.name == name) return e;
  throw PreconditionError("unknown problem '" + name + "'");
}

}  // namespace nsmoo
