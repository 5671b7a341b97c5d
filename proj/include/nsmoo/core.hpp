#pragma once

// Problem representation and the dominance / criticality primitives shared by
// every solver in the library.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace nsmoo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (bad sizes, v = 0, r <= 0, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An objective oracle returned a non-finite value or subgradient.
class EvaluationError : public Error {
 public:
  EvaluationError(std::size_t objective, const std::string& what)
      : Error("objective " + std::to_string(objective) + ": " + what), objective_(objective) {}

  std::size_t objective() const noexcept { return objective_; }

 private:
  std::size_t objective_;
};

/// One objective f_i: its value and one arbitrary Clarke subgradient per point.
/// Both callables must be pure functions of x.
struct Objective {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> subgrad;
  bool smooth = false;
};

struct MopProblem {
  std::string name;
  std::size_t n = 0;
  std::vector<Objective> objectives;
  std::vector<std::optional<double>> lipschitz_hint;

  std::size_t k() const noexcept { return objectives.size(); }
};

inline bool all_finite(const Vector& x) { return x.allFinite(); }

/// Nonnegative weights summing to one.
class SimplexWeights {
 public:
  SimplexWeights() = default;

  explicit SimplexWeights(Vector w) : w_(std::move(w)) {
    if (w_.size() == 0) throw PreconditionError("simplex weights: empty");
    for (Eigen::Index i = 0; i < w_.size(); ++i) {
      if (!std::isfinite(w_[i]) || w_[i] < 0.0)
        throw PreconditionError("simplex weights: entry " + std::to_string(i) + " is negative or non-finite");
    }
    if (std::abs(w_.sum() - 1.0) > 1e-12) throw PreconditionError("simplex weights: entries do not sum to 1");
  }

  /// Scales a nonnegative vector onto the simplex.
  static SimplexWeights normalized(Vector w) {
    const double s = w.sum();
    if (!(s > 0.0)) throw PreconditionError("simplex weights: nothing to normalize");
    w /= s;
    // absorb the rounding residue in the largest entry
    Eigen::Index imax = 0;
    w.maxCoeff(&imax);
    w[imax] += 1.0 - w.sum();
    return SimplexWeights(std::move(w));
  }

  static SimplexWeights uniform(std::size_t m) {
    return normalized(Vector::Ones(static_cast<Eigen::Index>(m)));
  }

  const Vector& values() const noexcept { return w_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(w_.size()); }
  double operator[](std::size_t i) const { return w_[static_cast<Eigen::Index>(i)]; }

 private:
  Vector w_;
};

struct BundleElement {
  std::size_t objective = 0;
  Vector subgradient;
};

/// Approximate steepest-descent direction together with the bundle W that
/// produced it. direction = -(sum of bundle vectors weighted by bundle_weights).
struct CriticalityCertificate {
  Vector direction;
  double residual = 0.0;
  std::vector<BundleElement> bundle;
  SimplexWeights bundle_weights;
  double epsilon = 0.0;
  bool acceptable = false;
  std::size_t enrichments = 0;
};

inline double checked_value(const MopProblem& problem, std::size_t i, const Vector& x) {
  const double v = problem.objectives[i].value(x);
  if (!std::isfinite(v)) throw EvaluationError(i, "non-finite value");
  return v;
}

inline Vector checked_subgrad(const MopProblem& problem, std::size_t i, const Vector& x) {
  Vector g = problem.objectives[i].subgrad(x);
  if (g.size() != x.size()) throw EvaluationError(i, "subgradient has wrong dimension");
  if (!g.allFinite()) throw EvaluationError(i, "non-finite subgradient");
  return g;
}

inline Vector evaluate(const MopProblem& problem, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != problem.n)
    throw PreconditionError("evaluate: x has dimension " + std::to_string(x.size()) + ", expected " +
                            std::to_string(problem.n));
  if (!x.allFinite()) throw PreconditionError("evaluate: x is not finite");
  Vector f(static_cast<Eigen::Index>(problem.k()));
  for (std::size_t i = 0; i < problem.k(); ++i) f[static_cast<Eigen::Index>(i)] = checked_value(problem, i, x);
  return f;
}

enum class Dominance { strictly, weakly, none };

inline const char* to_string(Dominance d) {
  switch (d) {
    case Dominance::strictly: return "strictly";
    case Dominance::weakly: return "weakly";
    case Dominance::none: return "none";
  }
  return "none";
}

/// Does image a dominate image b?
inline Dominance dominates(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw PreconditionError("dominates: length mismatch");
  bool all_less = true;
  bool all_leq = true;
  bool any_diff = false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!(a[i] < b[i])) all_less = false;
    if (!(a[i] <= b[i])) all_leq = false;
    if (a[i] != b[i]) any_diff = true;
  }
  if (all_less) return Dominance::strictly;
  if (all_leq && any_diff) return Dominance::weakly;
  return Dominance::none;
}

/// ||sum_i alpha_i grad f_i(x)||_2, with the oracle subgradient standing in
/// for the gradient.
inline double kkt_residual(const MopProblem& problem, const Vector& x, const SimplexWeights& alpha) {
  if (alpha.size() != problem.k()) throw PreconditionError("kkt_residual: alpha has wrong length");
  Vector sum = Vector::Zero(x.size());
  for (std::size_t i = 0; i < problem.k(); ++i) sum += alpha[i] * checked_subgrad(problem, i, x);
  return sum.norm();
}

}  // namespace nsmoo
