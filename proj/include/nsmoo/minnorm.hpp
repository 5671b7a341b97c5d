#pragma once

// Minimum-norm point of the convex hull of finitely many vectors, computed
// with Wolfe's active-set ("corral") method.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "nsmoo/core.hpp"

namespace nsmoo {

struct HullQpResult {
  Vector point;
  SimplexWeights weights;  // over the generators as passed in
  std::size_t iterations = 0;
};

namespace detail {

// Minimizer of ||y|| over the affine hull of the corral points.  Returns the
// affine coefficients (summing to one).
inline Vector affine_minimizer(const std::vector<Vector>& pts, const std::vector<std::size_t>& corral) {
  const auto m = static_cast<Eigen::Index>(corral.size());
  Vector mu(m);
  if (m == 1) {
    mu[0] = 1.0;
    return mu;
  }
  const Vector& p0 = pts[corral[0]];
  Matrix D(p0.size(), m - 1);
  for (Eigen::Index j = 1; j < m; ++j) D.col(j - 1) = pts[corral[static_cast<std::size_t>(j)]] - p0;
  // y = p0 + D z, least squares D z ~ -p0
  const Vector z = D.colPivHouseholderQr().solve(-p0);
  mu[0] = 1.0 - z.sum();
  mu.tail(m - 1) = z;
  return mu;
}

}  // namespace detail

struct MinNormOptions {
  double duplicate_tol = 1e-14;
  double optimality_tol = 1e-12;
  std::size_t max_iterations = 0;  // 0: 100 + 20 * generators
};

inline HullQpResult min_norm_point(const std::vector<Vector>& generators, const MinNormOptions& opt = {}) {
  if (generators.empty()) throw PreconditionError("min_norm_point: empty generator list");
  const Eigen::Index dim = generators.front().size();
  for (const auto& g : generators) {
    if (g.size() != dim) throw PreconditionError("min_norm_point: generators differ in dimension");
    if (!g.allFinite()) throw PreconditionError("min_norm_point: non-finite generator");
  }

  // deduplicated points, each remembered by its first occurrence
  std::vector<Vector> pts;
  std::vector<std::size_t> first_index;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    std::size_t found = pts.size();
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if ((pts[j] - generators[i]).lpNorm<Eigen::Infinity>() <= opt.duplicate_tol) {
        found = j;
        break;
      }
    }
    if (found == pts.size()) {
      pts.push_back(generators[i]);
      first_index.push_back(i);
    }
  }

  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.squaredNorm());

  std::size_t start = 0;
  for (std::size_t j = 1; j < pts.size(); ++j)
    if (pts[j].squaredNorm() < pts[start].squaredNorm()) start = j;

  std::vector<std::size_t> corral{start};
  Vector lambda = Vector::Ones(1);
  Vector x = pts[start];

  const std::size_t max_iter = opt.max_iterations ? opt.max_iterations : 100 + 20 * pts.size();
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    // major cycle
    std::size_t j = 0;
    double best = x.dot(pts[0]);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const double v = x.dot(pts[i]);
      if (v < best) {
        best = v;
        j = i;
      }
    }
    if (x.squaredNorm() - best <= opt.optimality_tol * scale) break;
    if (std::find(corral.begin(), corral.end(), j) != corral.end()) break;
    corral.push_back(j);
    lambda.conservativeResize(lambda.size() + 1);
    lambda[lambda.size() - 1] = 0.0;

    // minor cycles
    while (true) {
      const Vector mu = detail::affine_minimizer(pts, corral);
      if ((mu.array() > 1e-15).all()) {
        lambda = mu;
        break;
      }
      double theta = 1.0;
      for (Eigen::Index i = 0; i < mu.size(); ++i) {
        if (mu[i] <= 1e-15) {
          const double denom = lambda[i] - mu[i];
          if (denom > 0.0) theta = std::min(theta, lambda[i] / denom);
        }
      }
      lambda = lambda + theta * (mu - lambda);
      std::vector<std::size_t> kept;
      std::vector<double> kept_w;
      for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda[i] > 1e-15) {
          kept.push_back(corral[static_cast<std::size_t>(i)]);
          kept_w.push_back(lambda[i]);
        }
      }
      if (kept.empty()) {  // cannot happen in exact arithmetic
        kept.push_back(corral.back());
        kept_w.push_back(1.0);
      }
      corral = kept;
      lambda = Eigen::Map<const Vector>(kept_w.data(), static_cast<Eigen::Index>(kept_w.size()));
      lambda /= lambda.sum();
      if (corral.size() == 1) break;
    }
    x = Vector::Zero(dim);
    for (std::size_t i = 0; i < corral.size(); ++i) x += lambda[static_cast<Eigen::Index>(i)] * pts[corral[i]];
  }

  Vector w = Vector::Zero(static_cast<Eigen::Index>(generators.size()));
  for (std::size_t i = 0; i < corral.size(); ++i)
    w[static_cast<Eigen::Index>(first_index[corral[i]])] = std::max(0.0, lambda[static_cast<Eigen::Index>(i)]);

  HullQpResult result;
  result.weights = SimplexWeights::normalized(std::move(w));
  result.point = Vector::Zero(dim);
  for (std::size_t i = 0; i < generators.size(); ++i) result.point += result.weights[i] * generators[i];
  result.iterations = iter;
  return result;
}

/// True iff the min-norm point of conv(generators) has norm <= tol.
inline bool contains_origin(const std::vector<Vector>& generators, double tol) {
  return min_norm_point(generators).point.norm() <= tol;
}

}  // namespace nsmoo
