#pragma once

// Weighted-sum and Pascoletti-Serafini scalarizations, both solved with the
// non-smooth descent method applied to a single scalarized objective.

#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "nsmoo/core.hpp"
#include "nsmoo/descent.hpp"

namespace nsmoo {

struct PsSpec {
  Vector z;
  Vector r;

  void validate(std::size_t k) const {
    if (static_cast<std::size_t>(z.size()) != k || static_cast<std::size_t>(r.size()) != k)
      throw PreconditionError("PS spec: z and r must have one entry per objective");
    if (!z.allFinite() || !r.allFinite()) throw PreconditionError("PS spec: non-finite entry");
    if (!(r.array() > 0.0).all()) throw PreconditionError("PS spec: r must be strictly positive");
  }
};

struct ScalarSolution {
  Vector x;
  Vector f;
  double value = 0.0;  // weighted sum, or tau for PS
  DescentTrace trace;
};

/// g(x) = sum_i alpha_i f_i(x), subgradient sum_i alpha_i xi_i.
inline MopProblem weighted_sum_problem(const MopProblem& problem, const SimplexWeights& alpha) {
  if (alpha.size() != problem.k()) throw PreconditionError("weighted sum: alpha has wrong length");
  MopProblem g;
  g.name = problem.name + "/weighted_sum";
  g.n = problem.n;
  Objective obj;
  obj.value = [problem, alpha](const Vector& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < problem.k(); ++i)
      if (alpha[i] != 0.0) s += alpha[i] * problem.objectives[i].value(x);
    return s;
  };
  obj.subgrad = [problem, alpha](const Vector& x) -> Vector {
    Vector s = Vector::Zero(x.size());
    for (std::size_t i = 0; i < problem.k(); ++i)
      if (alpha[i] != 0.0) s += alpha[i] * problem.objectives[i].subgrad(x);
    return s;
  };
  obj.smooth = true;
  for (const auto& o : problem.objectives) obj.smooth = obj.smooth && o.smooth;
  g.objectives.push_back(std::move(obj));
  g.lipschitz_hint.emplace_back(std::nullopt);
  return g;
}

namespace detail {

inline std::size_t ps_argmax(const MopProblem& problem, const PsSpec& spec, const Vector& x, double& best) {
  std::size_t arg = 0;
  best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < problem.k(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double v = (problem.objectives[i].value(x) - spec.z[ii]) / spec.r[ii];
    if (v > best + 1e-12) {
      best = v;
      arg = i;
    }
  }
  return arg;
}

}  // namespace detail

/// g(x) = max_i (f_i(x) - z_i) / r_i; the subgradient comes from the lowest
/// maximizing index (ties within 1e-12).
inline MopProblem ps_problem(const MopProblem& problem, const PsSpec& spec) {
  spec.validate(problem.k());
  MopProblem g;
  g.name = problem.name + "/pascoletti_serafini";
  g.n = problem.n;
  Objective obj;
  obj.value = [problem, spec](const Vector& x) {
    double best = 0.0;
    detail::ps_argmax(problem, spec, x, best);
    return best;
  };
  obj.subgrad = [problem, spec](const Vector& x) -> Vector {
    double best = 0.0;
    const std::size_t i = detail::ps_argmax(problem, spec, x, best);
    return problem.objectives[i].subgrad(x) / spec.r[static_cast<Eigen::Index>(i)];
  };
  g.objectives.push_back(std::move(obj));
  g.lipschitz_hint.emplace_back(std::nullopt);
  return g;
}

inline ScalarSolution weighted_sum_solve(const MopProblem& problem, const SimplexWeights& alpha, const Vector& x0,
                                         const DescentConfig& cfg) {
  const MopProblem g = weighted_sum_problem(problem, alpha);
  ScalarSolution out;
  out.trace = solve(g, x0, cfg);
  out.x = out.trace.final().x;
  out.f = evaluate(problem, out.x);
  out.value = alpha.values().dot(out.f);
  return out;
}

/// Solves min tau s.t. f(x) - z <= tau r through min_x max_i (f_i(x) - z_i) / r_i.
/// `value` is the attained tau.
inline ScalarSolution ps_solve(const MopProblem& problem, const PsSpec& spec, const Vector& x0,
                               const DescentConfig& cfg) {
  const MopProblem g = ps_problem(problem, spec);
  ScalarSolution out;
  out.trace = solve(g, x0, cfg);
  out.x = out.trace.final().x;
  out.f = evaluate(problem, out.x);
  out.value = g.objectives[0].value(out.x);
  return out;
}

using ScalarizationSpec = std::variant<SimplexWeights, PsSpec>;

enum class StartStrategy { fixed, warm_start };

struct SweepEntry {
  ScalarizationSpec spec;
  Vector x;
  Vector f;
  double scalar_value = std::numeric_limits<double>::quiet_NaN();
  Termination termination = Termination::max_iterations;
  bool solved = false;    // solver ran to completion without throwing
  bool accepted = false;  // survived the dominance filter
  std::string error;
};

struct FrontSweep {
  std::vector<SweepEntry> entries;
  /// True when no solved image is dominated by another; repeated images are
  /// collapsed without clearing the flag.
  bool nondominated = true;

  std::size_t accepted_count() const {
    std::size_t c = 0;
    for (const auto& e : entries) c += e.accepted ? 1 : 0;
    return c;
  }
};

struct SweepOptions {
  StartStrategy start = StartStrategy::fixed;
  double dominance_slack = 1e-9;
  double duplicate_tol = 1e-6;  // images closer than this (max norm) count as identical
};

/// Solves every spec, then marks as accepted the entries whose image is not
/// dominated by another (one representative, the first, per identical image).
inline FrontSweep front_sweep(const MopProblem& problem, const std::vector<ScalarizationSpec>& specs, const Vector& x0,
                              const DescentConfig& cfg, const SweepOptions& opt = {}) {
  if (specs.empty()) throw PreconditionError("front_sweep: no specs");
  FrontSweep sweep;
  Vector start = x0;
  for (const auto& spec : specs) {
    SweepEntry entry;
    entry.spec = spec;
    try {
      ScalarSolution sol = std::holds_alternative<SimplexWeights>(spec)
                               ? weighted_sum_solve(problem, std::get<SimplexWeights>(spec), start, cfg)
                               : ps_solve(problem, std::get<PsSpec>(spec), start, cfg);
      entry.x = sol.x;
      entry.f = sol.f;
      entry.scalar_value = sol.value;
      entry.termination = sol.trace.termination;
      entry.solved = true;
      if (opt.start == StartStrategy::warm_start) start = sol.x;
    } catch (const Error& e) {
      entry.error = e.what();
    }
    sweep.entries.push_back(std::move(entry));
  }

  auto& es = sweep.entries;
  for (std::size_t b = 0; b < es.size(); ++b) {
    if (!es[b].solved) continue;
    bool repeated = false, dominated = false;
    for (std::size_t a = 0; a < es.size() && !dominated; ++a) {
      if (a == b || !es[a].solved) continue;
      const Vector diff = es[a].f - es[b].f;
      if (diff.lpNorm<Eigen::Infinity>() <= opt.duplicate_tol) {
        repeated = repeated || a < b;
        continue;
      }
      if ((diff.array() <= opt.dominance_slack).all()) dominated = true;
    }
    es[b].accepted = !repeated && !dominated;
    if (dominated) sweep.nondominated = false;
  }
  return sweep;
}

}  // namespace nsmoo
