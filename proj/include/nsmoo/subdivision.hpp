#pragma once

// Box coverings of the Pareto set: alternate dyadic subdivision of the
// covering with a sample / short descent / select pass.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nsmoo/core.hpp"
#include "nsmoo/descent.hpp"

namespace nsmoo {

struct Box {
  Vector lower;
  Vector upper;
  int depth = 0;

  double volume() const { return (upper - lower).prod(); }

  /// Closed containment.
  bool contains(const Vector& x) const {
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }
};

struct BoxCovering {
  std::vector<Box> boxes;
  Box domain;
  int depth = 0;
  std::size_t samples_per_box = 10;

  double volume() const {
    double v = 0.0;
    for (const auto& b : boxes) v += b.volume();
    return v;
  }

  bool covers(const Vector& x) const {
    return std::any_of(boxes.begin(), boxes.end(), [&](const Box& b) { return b.contains(x); });
  }
};

class ParetoSetLost : public Error {
 public:
  explicit ParetoSetLost(int depth) : Error("Pareto set lost at depth " + std::to_string(depth)) {}
};

inline BoxCovering initial_covering(const Box& domain, std::size_t samples_per_box = 10) {
  if (domain.lower.size() != domain.upper.size() || domain.lower.size() == 0)
    throw PreconditionError("covering: malformed domain");
  if (!(domain.lower.array() < domain.upper.array()).all())
    throw PreconditionError("covering: domain must satisfy lower < upper");
  BoxCovering cov;
  cov.domain = domain;
  cov.domain.depth = 0;
  cov.boxes = {cov.domain};
  cov.samples_per_box = samples_per_box;
  return cov;
}

/// Splits every box in two along its longest edge (lowest axis on ties).
inline BoxCovering subdivide(const BoxCovering& cov) {
  BoxCovering out;
  out.domain = cov.domain;
  out.depth = cov.depth + 1;
  out.samples_per_box = cov.samples_per_box;
  out.boxes.reserve(2 * cov.boxes.size());
  for (const Box& b : cov.boxes) {
    const Vector w = b.upper - b.lower;
    Eigen::Index axis = 0;
    for (Eigen::Index i = 1; i < w.size(); ++i)
      if (w[i] > w[axis] * (1.0 + 1e-12)) axis = i;
    const double mid = 0.5 * (b.lower[axis] + b.upper[axis]);
    Box left = b;
    Box right = b;
    left.upper[axis] = mid;
    right.lower[axis] = mid;
    left.depth = right.depth = out.depth;
    out.boxes.push_back(std::move(left));
    out.boxes.push_back(std::move(right));
  }
  return out;
}

namespace detail {

inline double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double result = 0.0;
  double f = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= static_cast<double>(base);
  }
  return result;
}

inline std::uint64_t nth_prime(std::size_t i) {
  static constexpr std::array<std::uint64_t, 32> primes = {2,  3,  5,  7,  11, 13, 17, 19, 23,  29,  31,
                                                            37, 41, 43, 47, 53, 59, 61, 67, 71,  73,  79,
                                                            83, 89, 97, 101, 103, 107, 109, 113, 127, 131};
  if (i >= primes.size()) throw PreconditionError("halton: dimension above 32 not supported");
  return primes[i];
}

// Halton points 1..count in [0,1)^n with a seed-dependent Cranley-Patterson
// shift.  The shift comes from raw mt19937_64 output so it is identical on
// every standard library.
inline std::vector<Vector> shifted_halton(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Vector shift(static_cast<Eigen::Index>(n));
  for (std::size_t d = 0; d < n; ++d)
    shift[static_cast<Eigen::Index>(d)] = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  std::vector<Vector> pts;
  pts.reserve(count);
  for (std::size_t j = 1; j <= count; ++j) {
    Vector u(static_cast<Eigen::Index>(n));
    for (std::size_t d = 0; d < n; ++d) {
      double v = radical_inverse(j, nth_prime(d)) + shift[static_cast<Eigen::Index>(d)];
      u[static_cast<Eigen::Index>(d)] = v - std::floor(v);
    }
    pts.push_back(std::move(u));
  }
  return pts;
}

// Does cell b hold x?  Cells are half-open except on the domain's upper face.
inline bool in_cell(const Box& b, const Box& domain, const Vector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < b.lower[i]) return false;
    if (b.upper[i] == domain.upper[i]) {
      if (x[i] > b.upper[i]) return false;
    } else if (x[i] >= b.upper[i]) {
      return false;
    }
  }
  return true;
}

}  // namespace detail

/// Keeps exactly the boxes that contain the end point of at least one short
/// descent run started from samples_per_box quasi-random points per box.
inline BoxCovering select(const BoxCovering& cov, const MopProblem& problem, const DescentConfig& cfg,
                          std::size_t steps, std::uint64_t seed) {
  if (steps < 1) throw PreconditionError("select: steps must be at least 1");
  const auto n = static_cast<std::size_t>(cov.domain.lower.size());
  if (n != problem.n) throw PreconditionError("select: domain dimension does not match the problem");
  const std::vector<Vector> unit =
      detail::shifted_halton(n, cov.samples_per_box, seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(cov.depth));

  std::vector<Vector> endpoints;
  endpoints.reserve(cov.boxes.size() * unit.size());
  for (const Box& b : cov.boxes) {
    const Vector width = b.upper - b.lower;
    for (const Vector& u : unit) {
      const Vector x0 = b.lower + width.cwiseProduct(u);
      try {
        endpoints.push_back(solve(problem, x0, cfg, steps).final().x);
      } catch (const EvaluationError&) {
        endpoints.push_back(x0);
      }
    }
  }

  std::vector<char> keep(cov.boxes.size(), 0);
  for (const Vector& p : endpoints) {
    if (!cov.domain.contains(p)) continue;
    for (std::size_t i = 0; i < cov.boxes.size(); ++i) {
      if (detail::in_cell(cov.boxes[i], cov.domain, p)) {
        keep[i] = 1;
        break;
      }
    }
  }

  BoxCovering out;
  out.domain = cov.domain;
  out.depth = cov.depth;
  out.samples_per_box = cov.samples_per_box;
  for (std::size_t i = 0; i < cov.boxes.size(); ++i)
    if (keep[i]) out.boxes.push_back(cov.boxes[i]);
  return out;
}

struct CoverOptions {
  std::size_t samples_per_box = 10;
  std::size_t steps = 10;
};

inline BoxCovering cover(const MopProblem& problem, const Box& domain, int target_depth, const DescentConfig& cfg,
                         std::uint64_t seed, const CoverOptions& opt = {}) {
  if (target_depth < 1) throw PreconditionError("cover: target_depth must be at least 1");
  BoxCovering cov = initial_covering(domain, opt.samples_per_box);
  while (cov.depth < target_depth) {
    cov = select(subdivide(cov), problem, cfg, opt.steps, seed);
    if (cov.boxes.empty()) throw ParetoSetLost(cov.depth);
  }
  return cov;
}

}  // namespace nsmoo
