#pragma once

// Descent method for non-smooth multiobjective problems based on an
// approximation of the Goldstein epsilon-subdifferential.
//
// At a point x the bundle W starts with one subgradient per objective.  The
// trial direction is v = -argmin{||xi|| : xi in conv(W)}.  v is acceptable when
//
//     f_i(x + (eps/||v||) v) <= f_i(x) - c * eps * ||v||    for all i.
//
// Otherwise a subgradient xi' with <xi', v> > -c ||v||^2 is sampled on the
// segment (x, x + (eps/||v||) v) and added to W.  Eps is reduced whenever the
// residual ||v|| falls below kappa * eps.

#include <cmath>
#include <cstddef>
#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nsmoo/core.hpp"
#include "nsmoo/minnorm.hpp"

namespace nsmoo {

struct DescentConfig {
  double c = 0.25;
  double eps0 = 0.1;
  double theta_eps = 0.5;
  double kappa = 1.0;
  double beta = 0.5;
  std::size_t max_outer = 10000;
  std::size_t max_enrich = 100;
  double tol_crit = 1e-6;
  double tol_eps = 1e-6;

  void validate() const {
    auto in_open_unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (!in_open_unit(c)) throw PreconditionError("descent config: c must lie in (0,1)");
    if (!(eps0 > 0.0)) throw PreconditionError("descent config: eps0 must be positive");
    if (!in_open_unit(theta_eps)) throw PreconditionError("descent config: theta_eps must lie in (0,1)");
    if (!(kappa > 0.0)) throw PreconditionError("descent config: kappa must be positive");
    if (!in_open_unit(beta)) throw PreconditionError("descent config: beta must lie in (0,1)");
    if (!(tol_crit >= 0.0)) throw PreconditionError("descent config: tol_crit must be nonnegative");
    if (!(tol_eps >= 0.0)) throw PreconditionError("descent config: tol_eps must be nonnegative");
  }
};

/// compute_direction gave up: the enrichment budget ran out, or no enriching
/// subgradient was found.  Carries the bundle collected so far.
class EnrichmentError : public Error {
 public:
  EnrichmentError(const std::string& what, std::vector<BundleElement> bundle)
      : Error(what), bundle_(std::move(bundle)) {}
  const std::vector<BundleElement>& bundle() const noexcept { return bundle_; }

 private:
  std::vector<BundleElement> bundle_;
};

class LineSearchError : public Error {
 public:
  using Error::Error;
};

enum class Termination { critical, max_iterations, line_search_failure, enrichment_failure };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::critical: return "critical";
    case Termination::max_iterations: return "max_iterations";
    case Termination::line_search_failure: return "line_search_failure";
    case Termination::enrichment_failure: return "enrichment_failure";
  }
  return "unknown";
}

struct DescentIterate {
  Vector x;
  Vector f;
  double epsilon = 0.0;
  double residual = 0.0;
  double step_length = 0.0;  // step that produced this iterate, 0 for the start point
};

struct DescentTrace {
  std::vector<DescentIterate> iterates;
  Termination termination = Termination::max_iterations;
  std::string message;
  CriticalityCertificate certificate;  // last certificate computed
  std::size_t outer_iterations = 0;

  const DescentIterate& final() const { return iterates.back(); }
  std::size_t accepted_steps() const { return iterates.empty() ? 0 : iterates.size() - 1; }
};

/// Returns xi' in df_i(x + t'v), t' in (0, eps/||v||), with <xi', v> > -c||v||^2.
/// Bisection on h(t) = f_i(x + tv) - f_i(x) + c t ||v||^2, which is positive at
/// the right end of the bracket and nonpositive at the left end.
inline Vector find_enriching_subgradient(const MopProblem& problem, const Vector& x, const Vector& v,
                                         std::size_t failing_i, double epsilon, double c,
                                         std::size_t max_bisections = 50) {
  const double vnorm = v.norm();
  if (!(vnorm > 0.0)) throw PreconditionError("find_enriching_subgradient: direction is zero");
  if (failing_i >= problem.k()) throw PreconditionError("find_enriching_subgradient: objective index out of range");
  if (!(epsilon > 0.0)) throw PreconditionError("find_enriching_subgradient: epsilon must be positive");

  const double v2 = vnorm * vnorm;
  const double fx = checked_value(problem, failing_i, x);
  auto gap = [&](double t) { return checked_value(problem, failing_i, x + t * v) - fx + c * t * v2; };

  double lo = 0.0;
  double hi = epsilon / vnorm;
  for (std::size_t it = 0; it < max_bisections; ++it) {
    const double t = 0.5 * (lo + hi);
    Vector xi = checked_subgrad(problem, failing_i, x + t * v);
    if (xi.dot(v) > -c * v2) return xi;
    if (gap(t) > 0.0)
      hi = t;
    else
      lo = t;
  }
  throw EnrichmentError("find_enriching_subgradient: bisection budget exhausted for objective " +
                            std::to_string(failing_i),
                        {});
}

/// Stop the enrichment loop once the residual is at most `stop_residual`.
/// solve() passes max(tol_crit, kappa * eps), since it would shrink eps then
/// anyway; the public default is cfg.tol_crit.
inline CriticalityCertificate compute_direction(const MopProblem& problem, const Vector& x, double epsilon,
                                                const DescentConfig& cfg,
                                                std::optional<double> stop_residual = std::nullopt) {
  if (!(epsilon > 0.0)) throw PreconditionError("compute_direction: epsilon must be positive");
  const double stop = stop_residual.value_or(cfg.tol_crit);
  const std::size_t k = problem.k();
  const Vector fx = evaluate(problem, x);

  std::vector<BundleElement> bundle;
  std::vector<Vector> generators;
  for (std::size_t i = 0; i < k; ++i) {
    bundle.push_back({i, checked_subgrad(problem, i, x)});
    generators.push_back(bundle.back().subgradient);
  }

  for (std::size_t enrich = 0;; ++enrich) {
    HullQpResult qp = min_norm_point(generators);
    CriticalityCertificate cert;
    cert.direction = -qp.point;
    cert.residual = cert.direction.norm();
    cert.bundle = bundle;
    cert.bundle_weights = qp.weights;
    cert.epsilon = epsilon;
    cert.enrichments = enrich;
    if (cert.residual <= stop) return cert;

    const double t = epsilon / cert.residual;
    const Vector trial = x + t * cert.direction;
    std::size_t failing = k;
    for (std::size_t i = 0; i < k; ++i) {
      if (checked_value(problem, i, trial) > fx[static_cast<Eigen::Index>(i)] - cfg.c * epsilon * cert.residual) {
        failing = i;
        break;
      }
    }
    if (failing == k) {
      cert.acceptable = true;
      return cert;
    }
    if (enrich >= cfg.max_enrich)
      throw EnrichmentError("compute_direction: no acceptable direction after " + std::to_string(enrich) +
                                " enrichments",
                            std::move(bundle));
    Vector xi;
    try {
      xi = find_enriching_subgradient(problem, x, cert.direction, failing, epsilon, cfg.c);
    } catch (const EnrichmentError& e) {
      throw EnrichmentError(e.what(), std::move(bundle));
    }
    bundle.push_back({failing, xi});
    generators.push_back(std::move(xi));
  }
}

/// Backtracking from t = eps/||v||; returns the first t = (eps/||v||) beta^m
/// satisfying f_i(x + tv) <= f_i(x) - c t ||v||^2 for all i.
inline double line_search(const MopProblem& problem, const Vector& x, const Vector& v, double epsilon,
                          const DescentConfig& cfg, std::size_t max_backtracks = 60) {
  const double vnorm = v.norm();
  if (!(vnorm > 0.0)) throw PreconditionError("line_search: direction is zero");
  if (!(epsilon > 0.0)) throw PreconditionError("line_search: epsilon must be positive");
  const Vector fx = evaluate(problem, x);
  const double v2 = vnorm * vnorm;
  double t = epsilon / vnorm;
  for (std::size_t m = 0; m <= max_backtracks; ++m, t *= cfg.beta) {
    const Vector xt = x + t * v;
    if (xt == x) break;  // step below floating-point resolution
    bool ok = true;
    for (std::size_t i = 0; i < problem.k() && ok; ++i)
      ok = checked_value(problem, i, xt) <= fx[static_cast<Eigen::Index>(i)] - cfg.c * t * v2;
    if (ok) return t;
  }
  throw LineSearchError("line_search: no admissible step");
}

/// Runs the descent method from x0.  `max_steps` caps the number of accepted
/// steps (the subdivision selector uses short runs); 0 means unlimited.
inline DescentTrace solve(const MopProblem& problem, const Vector& x0, const DescentConfig& cfg,
                          std::size_t max_steps = 0) {
  cfg.validate();
  if (!x0.allFinite()) throw PreconditionError("solve: x0 is not finite");

  DescentTrace trace;
  Vector x = x0;
  Vector fx = evaluate(problem, x);
  double eps = cfg.eps0;
  trace.iterates.push_back({x, fx, eps, std::numeric_limits<double>::quiet_NaN(), 0.0});

  for (trace.outer_iterations = 0; trace.outer_iterations < cfg.max_outer; ++trace.outer_iterations) {
    CriticalityCertificate cert;
    try {
      cert = compute_direction(problem, x, eps, cfg, std::max(cfg.tol_crit, cfg.kappa * eps));
    } catch (const EnrichmentError& e) {
      trace.termination = Termination::enrichment_failure;
      trace.message = e.what();
      return trace;
    }
    trace.certificate = cert;
    if (std::isnan(trace.iterates.back().residual)) trace.iterates.back().residual = cert.residual;

    if (cert.residual <= cfg.tol_crit && eps <= cfg.tol_eps) {
      trace.termination = Termination::critical;
      return trace;
    }
    if (cert.residual <= cfg.kappa * eps) {
      eps *= cfg.theta_eps;
      continue;
    }
    if (max_steps != 0 && trace.accepted_steps() >= max_steps) {
      trace.termination = Termination::max_iterations;
      trace.message = "step budget exhausted";
      return trace;
    }

    double t = 0.0;
    try {
      t = line_search(problem, x, cert.direction, eps, cfg);
    } catch (const LineSearchError& e) {
      trace.termination = Termination::line_search_failure;
      trace.message = e.what();
      return trace;
    }
    x = x + t * cert.direction;
    fx = evaluate(problem, x);
    trace.iterates.push_back({x, fx, eps, std::numeric_limits<double>::quiet_NaN(), t});
  }
  trace.termination = Termination::max_iterations;
  trace.message = "outer iteration budget exhausted";
  return trace;
}

}  // namespace nsmoo
