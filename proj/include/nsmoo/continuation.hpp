#pragma once

// Regularization path of min L(x) + lambda ||x||_1, traced as the Pareto
// critical set of (L, ||.||_1) by predictor-corrector continuation in lambda.
//
// On a smooth piece with active set A and sign vector s the path solves
//     grad_A L(x) + lambda s = 0,   x_i = 0 for i not in A,
// and the piece ends at a kink where either some x_i, i in A, reaches zero or
// some inactive |grad_i L(x)| reaches lambda.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nsmoo/core.hpp"

namespace nsmoo {

/// Smooth loss L with gradient and (optionally) Hessian.  Without an analytic
/// Hessian, central differences of the gradient with step 1e-5 (1 + |x_i|) are
/// used.
struct SmoothObjective {
  std::size_t n = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Matrix(const Vector&)> hessian;

  Matrix hessian_at(const Vector& x) const {
    if (hessian) return hessian(x);
    const auto dim = x.size();
    Matrix H(dim, dim);
    Vector xp = x;
    Vector xm = x;
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double h = 1e-5 * (1.0 + std::abs(x[i]));
      xp[i] = x[i] + h;
      xm[i] = x[i] - h;
      H.col(i) = (gradient(xp) - gradient(xm)) / (2.0 * h);
      xp[i] = x[i];
      xm[i] = x[i];
    }
    return 0.5 * (H + H.transpose());
  }
};

class CorrectorError : public Error {
 public:
  using Error::Error;
};

/// The corrected point left the orthant given by the sign vector.
class SignViolation : public CorrectorError {
 public:
  SignViolation(const std::string& what, std::size_t index) : CorrectorError(what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class PredictorError : public Error {
 public:
  using Error::Error;
};

struct ActiveSet {
  std::vector<std::size_t> indices;  // sorted
  std::vector<int> signs;            // +1 / -1, aligned with indices

  std::size_t size() const noexcept { return indices.size(); }
  bool contains(std::size_t i) const { return std::binary_search(indices.begin(), indices.end(), i); }

  void insert(std::size_t i, int sign) {
    auto it = std::lower_bound(indices.begin(), indices.end(), i);
    const auto pos = it - indices.begin();
    indices.insert(it, i);
    signs.insert(signs.begin() + pos, sign);
  }

  void erase(std::size_t i) {
    auto it = std::lower_bound(indices.begin(), indices.end(), i);
    if (it == indices.end() || *it != i) return;
    const auto pos = it - indices.begin();
    indices.erase(it);
    signs.erase(signs.begin() + pos);
  }

  Vector sign_vector() const {
    Vector s(static_cast<Eigen::Index>(signs.size()));
    for (std::size_t p = 0; p < signs.size(); ++p) s[static_cast<Eigen::Index>(p)] = signs[p];
    return s;
  }
};

struct PathEvent {
  enum class Kind { activation, deactivation };
  Kind kind = Kind::activation;
  std::size_t index = 0;
  double lambda = 0.0;
  int sign = 0;  // sign assigned on activation
};

inline const char* to_string(PathEvent::Kind k) {
  return k == PathEvent::Kind::activation ? "activation" : "deactivation";
}

struct PathSample {
  double lambda = 0.0;
  Vector x;
};

struct PathSegment {
  ActiveSet active;
  std::vector<PathSample> samples;
  std::optional<PathEvent> entry_event;
  std::optional<PathEvent> exit_event;
};

struct RegPath {
  std::vector<PathSegment> segments;
  double lambda_max = 0.0;
  bool complete = true;
  std::string diagnostic;

  /// Kink events in path order (activations and deactivations).
  std::vector<PathEvent> events() const {
    std::vector<PathEvent> out;
    for (const auto& s : segments)
      if (s.entry_event) out.push_back(*s.entry_event);
    return out;
  }
};

struct PathConfig {
  double lambda_stop = 1e-6;
  double dlambda_init = 0.0;  // 0: 0.05 * lambda_max
  double dlambda_max = 0.0;   // 0: 0.1 * lambda_max
  double dlambda_min = 1e-12;
  double event_tol = 1e-9;
  std::size_t max_segments = 1000;
  std::size_t max_samples = 1000000;
  /// Lambdas at which the path must be sampled (in addition to the adaptive steps).
  std::vector<double> sample_lambdas;
};

inline double lambda_max(const SmoothObjective& L) {
  return L.gradient(Vector::Zero(static_cast<Eigen::Index>(L.n))).lpNorm<Eigen::Infinity>();
}

namespace detail {

inline Vector reduced_gradient(const Vector& g, const ActiveSet& A) {
  Vector out(static_cast<Eigen::Index>(A.size()));
  for (std::size_t p = 0; p < A.size(); ++p)
    out[static_cast<Eigen::Index>(p)] = g[static_cast<Eigen::Index>(A.indices[p])];
  return out;
}

inline Matrix reduced_hessian(const SmoothObjective& L, const Vector& x, const ActiveSet& A) {
  const Matrix H = L.hessian_at(x);
  const auto m = static_cast<Eigen::Index>(A.size());
  Matrix out(m, m);
  for (Eigen::Index p = 0; p < m; ++p)
    for (Eigen::Index q = 0; q < m; ++q)
      out(p, q) = H(static_cast<Eigen::Index>(A.indices[static_cast<std::size_t>(p)]),
                    static_cast<Eigen::Index>(A.indices[static_cast<std::size_t>(q)]));
  return out;
}

// Newton on grad_A L(x) + lambda s = 0 with x off A pinned to zero.  No sign check.
inline Vector newton_reduced(const SmoothObjective& L, const ActiveSet& A, double lambda, const Vector& x_guess,
                             std::size_t max_iter = 50) {
  Vector x = Vector::Zero(static_cast<Eigen::Index>(L.n));
  for (std::size_t i : A.indices) x[static_cast<Eigen::Index>(i)] = x_guess[static_cast<Eigen::Index>(i)];
  if (A.size() == 0) return x;
  const Vector s = A.sign_vector();
  const double tol = 1e-10 * (1.0 + lambda);
  for (std::size_t it = 0; it <= max_iter; ++it) {
    const Vector F = reduced_gradient(L.gradient(x), A) + lambda * s;
    if (!F.allFinite()) throw CorrectorError("corrector: non-finite residual");
    if (F.lpNorm<Eigen::Infinity>() <= tol) return x;
    if (it == max_iter) break;
    Eigen::FullPivLU<Matrix> lu(reduced_hessian(L, x, A));
    if (!lu.isInvertible()) throw CorrectorError("corrector: singular reduced Hessian");
    const Vector dx = lu.solve(-F);
    for (std::size_t p = 0; p < A.size(); ++p)
      x[static_cast<Eigen::Index>(A.indices[p])] += dx[static_cast<Eigen::Index>(p)];
  }
  throw CorrectorError("corrector: Newton did not converge in " + std::to_string(max_iter) + " iterations");
}

// Event function per coordinate: s_p x_i on A, lambda - |grad_i L| off A.  An
// event has happened once one of them is negative.
inline std::optional<std::size_t> first_violation(const SmoothObjective& L, const ActiveSet& A, double lambda,
                                                  const Vector& x, double slack) {
  const Vector g = L.gradient(x);
  for (std::size_t i = 0; i < L.n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    double e = 0.0;
    auto it = std::lower_bound(A.indices.begin(), A.indices.end(), i);
    if (it != A.indices.end() && *it == i)
      e = A.signs[static_cast<std::size_t>(it - A.indices.begin())] * x[ii];
    else
      e = lambda - std::abs(g[ii]);
    if (e < -slack) return i;
  }
  return std::nullopt;
}

inline double event_value(const SmoothObjective& L, const ActiveSet& A, double lambda, const Vector& x,
                          std::size_t i) {
  const auto ii = static_cast<Eigen::Index>(i);
  auto it = std::lower_bound(A.indices.begin(), A.indices.end(), i);
  if (it != A.indices.end() && *it == i) return A.signs[static_cast<std::size_t>(it - A.indices.begin())] * x[ii];
  return lambda - std::abs(L.gradient(x)[ii]);
}

inline double event_slack(double lambda_scale) { return 1e-12 * (1.0 + lambda_scale); }

}  // namespace detail

/// Newton corrector on the reduced stationarity system; fails with
/// SignViolation when the solution leaves the orthant of `A.signs`.
inline Vector corrector(const SmoothObjective& L, const ActiveSet& A, double lambda, const Vector& x_guess) {
  if (!(lambda >= 0.0)) throw PreconditionError("corrector: lambda must be nonnegative");
  Vector x = detail::newton_reduced(L, A, lambda, x_guess);
  const double slack = 1e-12 * (1.0 + x.lpNorm<Eigen::Infinity>());
  for (std::size_t p = 0; p < A.size(); ++p) {
    const std::size_t i = A.indices[p];
    if (A.signs[p] * x[static_cast<Eigen::Index>(i)] < -slack)
      throw SignViolation("corrector: x_" + std::to_string(i) + " has the wrong sign", i);
  }
  return x;
}

struct Prediction {
  double lambda = 0.0;
  Vector x_guess;
  Vector tangent;  // dx_A / dlambda
};

/// First-order step from (lambda, x) to lambda - dlambda along
/// dx_A/dlambda = -(hess_AA L)^{-1} s.
inline Prediction predictor(const SmoothObjective& L, const ActiveSet& A, double lambda, const Vector& x,
                            double dlambda) {
  Prediction p;
  p.lambda = lambda - dlambda;
  p.x_guess = x;
  p.tangent = Vector::Zero(static_cast<Eigen::Index>(A.size()));
  if (A.size() == 0) return p;
  Eigen::FullPivLU<Matrix> lu(detail::reduced_hessian(L, x, A));
  if (!lu.isInvertible()) throw PredictorError("predictor: singular reduced Hessian");
  p.tangent = lu.solve(-A.sign_vector());
  for (std::size_t q = 0; q < A.size(); ++q)
    p.x_guess[static_cast<Eigen::Index>(A.indices[q])] -= dlambda * p.tangent[static_cast<Eigen::Index>(q)];
  return p;
}

struct LocatedEvent {
  PathEvent event;
  PathSample at;  // last event-free point on the current piece
};

/// Looks for a kink between two corrected samples of the piece (A, s), where
/// `upper.lambda > lower.lambda`.  Returns the largest such lambda, localized by
/// bisection to `tol` and refined by one secant step.
inline std::optional<LocatedEvent> detect_event(const SmoothObjective& L, const ActiveSet& A,
                                                const PathSample& upper, const PathSample& lower,
                                                double tol = 1e-9) {
  if (!(upper.lambda > lower.lambda)) throw PreconditionError("detect_event: expected upper.lambda > lower.lambda");
  const double slack = detail::event_slack(upper.lambda);
  if (!detail::first_violation(L, A, lower.lambda, lower.x, slack)) return std::nullopt;

  PathSample hi = upper;
  PathSample lo = lower;
  auto corrected_at = [&](double lam) {
    const double w = (lam - lo.lambda) / (hi.lambda - lo.lambda);
    const Vector guess = lo.x + w * (hi.x - lo.x);
    return PathSample{lam, detail::newton_reduced(L, A, lam, guess)};
  };
  while (hi.lambda - lo.lambda > tol) {
    PathSample mid = corrected_at(0.5 * (hi.lambda + lo.lambda));
    if (detail::first_violation(L, A, mid.lambda, mid.x, slack))
      lo = std::move(mid);
    else
      hi = std::move(mid);
  }
  const std::size_t index = *detail::first_violation(L, A, lo.lambda, lo.x, slack);

  const double e_hi = detail::event_value(L, A, hi.lambda, hi.x, index);
  const double e_lo = detail::event_value(L, A, lo.lambda, lo.x, index);
  if (e_hi > e_lo) {
    const double lam = hi.lambda - e_hi * (hi.lambda - lo.lambda) / (e_hi - e_lo);
    if (lam > lo.lambda && lam < hi.lambda) {
      PathSample refined = corrected_at(lam);
      if (!detail::first_violation(L, A, refined.lambda, refined.x, slack)) hi = std::move(refined);
    }
  }

  LocatedEvent out;
  out.at = hi;
  out.event.index = index;
  out.event.lambda = hi.lambda;
  if (A.contains(index)) {
    out.event.kind = PathEvent::Kind::deactivation;
  } else {
    out.event.kind = PathEvent::Kind::activation;
    const double g = L.gradient(hi.x)[static_cast<Eigen::Index>(index)];
    out.event.sign = g > 0.0 ? -1 : 1;
  }
  return out;
}

/// Traces the lambda-homotopy branch from (lambda_max, 0) down to lambda_stop.
inline RegPath trace_path(const SmoothObjective& L, const PathConfig& cfg = {}) {
  RegPath path;
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(L.n));
  const Vector g0 = L.gradient(zero);
  path.lambda_max = g0.lpNorm<Eigen::Infinity>();
  const double lmax = path.lambda_max;

  if (!(lmax > cfg.lambda_stop)) {
    PathSegment seg;
    seg.samples.push_back({lmax, zero});
    path.segments.push_back(std::move(seg));
    return path;
  }

  std::vector<double> grid;
  for (double g : cfg.sample_lambdas)
    if (g > cfg.lambda_stop && g < lmax) grid.push_back(g);
  std::sort(grid.begin(), grid.end(), std::greater<>());

  const double dl_init = cfg.dlambda_init > 0.0 ? cfg.dlambda_init : 0.05 * lmax;
  const double dl_max = cfg.dlambda_max > 0.0 ? cfg.dlambda_max : 0.1 * lmax;

  Eigen::Index j0 = 0;
  g0.cwiseAbs().maxCoeff(&j0);
  PathEvent start{PathEvent::Kind::activation, static_cast<std::size_t>(j0), lmax, g0[j0] > 0.0 ? -1 : 1};

  PathSegment seg;
  seg.active.insert(start.index, start.sign);
  seg.entry_event = start;
  seg.samples.push_back({lmax, zero});

  double lambda = lmax;
  Vector x = zero;
  double dl = dl_init;
  std::size_t n_samples = 1;

  auto fail = [&](const std::string& why) {
    path.complete = false;
    path.diagnostic = why + " at lambda = " + std::to_string(lambda);
  };

  while (lambda > cfg.lambda_stop) {
    if (path.segments.size() >= cfg.max_segments) {
      fail("segment budget exhausted");
      break;
    }
    if (n_samples >= cfg.max_samples) {
      fail("sample budget exhausted");
      break;
    }
    double target = std::max(lambda - dl, cfg.lambda_stop);
    for (double g : grid) {
      if (g < lambda && g > target) {
        target = g;
        break;
      }
    }

    PathSample next;
    try {
      Prediction pred = predictor(L, seg.active, lambda, x, lambda - target);
      next = {target, detail::newton_reduced(L, seg.active, target, pred.x_guess)};
    } catch (const Error& e) {
      dl *= 0.5;
      if (dl < cfg.dlambda_min) {
        fail(std::string("continuation stagnated (") + e.what() + ")");
        break;
      }
      continue;
    }

    std::optional<LocatedEvent> ev;
    try {
      ev = detect_event(L, seg.active, PathSample{lambda, x}, next, cfg.event_tol);
    } catch (const Error& e) {
      fail(std::string("event localization failed (") + e.what() + ")");
      break;
    }

    if (!ev) {
      seg.samples.push_back(next);
      ++n_samples;
      lambda = next.lambda;
      x = std::move(next.x);
      dl = std::min(1.2 * dl, dl_max);
      continue;
    }

    // close the piece at the kink and open the next one
    seg.samples.push_back(ev->at);
    seg.exit_event = ev->event;
    ActiveSet active = seg.active;
    path.segments.push_back(std::move(seg));

    lambda = ev->at.lambda;
    x = ev->at.x;
    if (ev->event.kind == PathEvent::Kind::deactivation) {
      active.erase(ev->event.index);
      x[static_cast<Eigen::Index>(ev->event.index)] = 0.0;
    } else {
      active.insert(ev->event.index, ev->event.sign);
    }
    try {
      x = detail::newton_reduced(L, active, lambda, x);
    } catch (const Error& e) {
      fail(std::string("restart after kink failed (") + e.what() + ")");
      seg = PathSegment{};
      break;
    }
    seg = PathSegment{};
    seg.active = std::move(active);
    seg.entry_event = ev->event;
    seg.samples.push_back({lambda, x});
    ++n_samples;
    dl = dl_init;
  }
  if (!seg.samples.empty()) path.segments.push_back(std::move(seg));
  return path;
}

}  // namespace nsmoo
