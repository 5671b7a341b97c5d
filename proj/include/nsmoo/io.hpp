#pragma once

// CSV / JSON artifacts.  Decimal output uses 17 significant digits so every
// double survives a write/read cycle unchanged.  Indices in files are 1-based,
// matching the x_1..x_n column names.

#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "nsmoo/continuation.hpp"
#include "nsmoo/core.hpp"
#include "nsmoo/descent.hpp"
#include "nsmoo/inverse.hpp"
#include "nsmoo/scalarize.hpp"
#include "nsmoo/subdivision.hpp"

namespace nsmoo::io {

using json = nlohmann::ordered_json;

class FormatError : public Error {
 public:
  using Error::Error;
};

inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

inline json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw FormatError("expected a numeric array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw FormatError("expected a numeric array");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

inline std::string header(const std::string& prefix, std::size_t count) {
  std::string out;
  for (std::size_t i = 1; i <= count; ++i) out += (i > 1 ? "," : "") + prefix + std::to_string(i);
  return out;
}

inline std::string row(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i > 0 ? "," : "") + num(v[i]);
  return out;
}

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw FormatError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw FormatError("not a number: '" + s + "'");
  return v;
}

// ---- descent trace -------------------------------------------------------

/// Columns: iter, x_1..x_n, f_1..f_k, eps, residual, step.
inline void write_trace_csv(std::ostream& os, const DescentTrace& trace) {
  if (trace.iterates.empty()) return;
  const auto n = static_cast<std::size_t>(trace.iterates.front().x.size());
  const auto k = static_cast<std::size_t>(trace.iterates.front().f.size());
  os << "iter," << header("x_", n) << "," << header("f_", k) << ",eps,residual,step\n";
  for (std::size_t it = 0; it < trace.iterates.size(); ++it) {
    const auto& r = trace.iterates[it];
    os << it << "," << row(r.x) << "," << row(r.f) << "," << num(r.epsilon) << "," << num(r.residual) << ","
       << num(r.step_length) << "\n";
  }
}

inline json summary_json(const DescentTrace& trace) {
  json j;
  j["final_x"] = to_json(trace.final().x);
  j["final_f"] = to_json(trace.final().f);
  j["residual"] = trace.certificate.residual;
  j["epsilon"] = trace.certificate.epsilon;
  j["termination"] = to_string(trace.termination);
  j["accepted_steps"] = trace.accepted_steps();
  j["outer_iterations"] = trace.outer_iterations;
  if (!trace.message.empty()) j["message"] = trace.message;
  return j;
}

// ---- box covering --------------------------------------------------------

inline json to_json(const BoxCovering& cov) {
  json j;
  j["domain"] = {{"lower", to_json(cov.domain.lower)}, {"upper", to_json(cov.domain.upper)}};
  j["depth"] = cov.depth;
  json boxes = json::array();
  for (const Box& b : cov.boxes) boxes.push_back({{"lower", to_json(b.lower)}, {"upper", to_json(b.upper)}});
  j["boxes"] = std::move(boxes);
  return j;
}

inline BoxCovering covering_from_json(const json& j) {
  try {
    BoxCovering cov;
    cov.domain.lower = vector_from_json(j.at("domain").at("lower"));
    cov.domain.upper = vector_from_json(j.at("domain").at("upper"));
    cov.depth = j.at("depth").get<int>();
    for (const auto& b : j.at("boxes")) {
      Box box{vector_from_json(b.at("lower")), vector_from_json(b.at("upper")), cov.depth};
      cov.boxes.push_back(std::move(box));
    }
    return cov;
  } catch (const json::exception& e) {
    throw FormatError(std::string("covering: ") + e.what());
  }
}

// ---- scalarization sweep -------------------------------------------------

/// Columns: kind, alpha_1..alpha_k, z_1..z_k, r_1..r_k, x_1..x_n, f_1..f_k,
/// scalar_value, accepted, termination.  Cells that do not apply are empty.
inline void write_sweep_csv(std::ostream& os, const FrontSweep& sweep, std::size_t n, std::size_t k) {
  os << "kind," << header("alpha_", k) << "," << header("z_", k) << "," << header("r_", k) << "," << header("x_", n)
     << "," << header("f_", k) << ",scalar_value,accepted,termination\n";
  const std::string blank_k(k - 1, ',');
  const std::string blank_n(n - 1, ',');
  for (const auto& e : sweep.entries) {
    if (std::holds_alternative<SimplexWeights>(e.spec)) {
      os << "weights," << row(std::get<SimplexWeights>(e.spec).values()) << "," << blank_k << "," << blank_k << ",";
    } else {
      const auto& ps = std::get<PsSpec>(e.spec);
      os << "ps," << blank_k << "," << row(ps.z) << "," << row(ps.r) << ",";
    }
    if (e.solved)
      os << row(e.x) << "," << row(e.f) << "," << num(e.scalar_value) << "," << (e.accepted ? 1 : 0) << ","
         << to_string(e.termination) << "\n";
    else
      os << blank_n << "," << blank_k << ",,0,error\n";
  }
}

// ---- regularization path -------------------------------------------------

inline std::string active_set_string(const ActiveSet& A) {
  std::string out;
  for (std::size_t p = 0; p < A.size(); ++p) out += (p > 0 ? ";" : "") + std::to_string(A.indices[p] + 1);
  return out;
}

/// Columns: lambda, active_set, x_1..x_n, L_value, l1_norm.
inline void write_path_csv(std::ostream& os, const RegPath& path, const SmoothObjective& L) {
  os << "lambda,active_set," << header("x_", L.n) << ",L_value,l1_norm\n";
  for (const auto& seg : path.segments) {
    const std::string A = active_set_string(seg.active);
    for (const auto& s : seg.samples)
      os << num(s.lambda) << "," << A << "," << row(s.x) << "," << num(L.value(s.x)) << "," << num(s.x.lpNorm<1>())
         << "\n";
  }
}

inline json to_json(const PathEvent& e) {
  json j;
  j["kind"] = to_string(e.kind);
  j["index"] = e.index + 1;
  j["lambda"] = e.lambda;
  if (e.kind == PathEvent::Kind::activation) j["sign"] = e.sign;
  return j;
}

inline json to_json(const RegPath& path) {
  json j;
  j["lambda_max"] = path.lambda_max;
  j["complete"] = path.complete;
  if (!path.diagnostic.empty()) j["diagnostic"] = path.diagnostic;
  json events = json::array();
  for (const auto& e : path.events()) events.push_back(to_json(e));
  j["events"] = std::move(events);
  json segs = json::array();
  for (const auto& s : path.segments) {
    json js;
    json idx = json::array();
    for (std::size_t i : s.active.indices) idx.push_back(i + 1);
    js["active_set"] = std::move(idx);
    js["signs"] = s.active.signs;
    js["lambda_begin"] = s.samples.front().lambda;
    js["lambda_end"] = s.samples.back().lambda;
    js["samples"] = s.samples.size();
    js["entry_event"] = s.entry_event ? to_json(*s.entry_event) : json(nullptr);
    js["exit_event"] = s.exit_event ? to_json(*s.exit_event) : json(nullptr);
    segs.push_back(std::move(js));
  }
  j["segments"] = std::move(segs);
  return j;
}

// ---- inverse problem -----------------------------------------------------

struct ParetoData {
  std::vector<ParetoDatum> data;
  std::size_t n = 0;
  std::size_t k = 0;
};

/// Reads columns x_1..x_n, alpha_1..alpha_k (header required, any order).
inline ParetoData read_pareto_data_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("data: empty file");
  const auto cols = split(line);
  std::vector<int> xcol, acol;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const std::string& h = cols[c];
    auto index_of = [&](const std::string& prefix) -> std::size_t {
      try {
        return static_cast<std::size_t>(std::stoul(h.substr(prefix.size())));
      } catch (const std::exception&) {
        throw FormatError("data: bad column name '" + h + "'");
      }
    };
    if (h.rfind("x_", 0) == 0) {
      const std::size_t i = index_of("x_");
      if (i == 0) throw FormatError("data: bad column name '" + h + "'");
      if (xcol.size() < i) xcol.resize(i, -1);
      xcol[i - 1] = static_cast<int>(c);
    } else if (h.rfind("alpha_", 0) == 0) {
      const std::size_t i = index_of("alpha_");
      if (i == 0) throw FormatError("data: bad column name '" + h + "'");
      if (acol.size() < i) acol.resize(i, -1);
      acol[i - 1] = static_cast<int>(c);
    } else {
      throw FormatError("data: unexpected column '" + h + "'");
    }
  }
  for (int c : xcol)
    if (c < 0) throw FormatError("data: x columns are not contiguous");
  for (int c : acol)
    if (c < 0) throw FormatError("data: alpha columns are not contiguous");
  if (xcol.empty() || acol.empty()) throw FormatError("data: need x_ and alpha_ columns");

  ParetoData out;
  out.n = xcol.size();
  out.k = acol.size();
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != cols.size()) throw FormatError("data line " + std::to_string(lineno) + ": wrong column count");
    Vector x(static_cast<Eigen::Index>(out.n));
    Vector a(static_cast<Eigen::Index>(out.k));
    try {
      for (std::size_t i = 0; i < out.n; ++i) x[static_cast<Eigen::Index>(i)] = parse_double(cells[static_cast<std::size_t>(xcol[i])]);
      for (std::size_t i = 0; i < out.k; ++i) a[static_cast<Eigen::Index>(i)] = parse_double(cells[static_cast<std::size_t>(acol[i])]);
      out.data.push_back({x, SimplexWeights(a)});
    } catch (const Error& e) {
      throw FormatError("data line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (out.data.empty()) throw FormatError("data: no rows");
  return out;
}

inline void write_pareto_data_csv(std::ostream& os, const std::vector<ParetoDatum>& data) {
  if (data.empty()) return;
  os << header("x_", static_cast<std::size_t>(data.front().x.size())) << ","
     << header("alpha_", data.front().alpha.size()) << "\n";
  for (const auto& d : data) os << row(d.x) << "," << row(d.alpha.values()) << "\n";
}

inline json to_json(const InverseResult& r, const BasisSet& basis) {
  json j;
  j["smallest_singular"] = r.smallest_singular;
  j["null_dimension"] = r.null_dimension;
  j["underdetermined"] = r.underdetermined;
  json names = json::array();
  for (const auto& f : basis.functions) names.push_back(f.name);
  j["basis"] = basis.name;
  j["basis_functions"] = std::move(names);
  json c = json::array();
  for (Eigen::Index i = 0; i < r.coefficients.rows(); ++i) c.push_back(to_json(Vector(r.coefficients.row(i).transpose())));
  j["coefficients"] = std::move(c);
  j["residuals"] = r.residuals;
  return j;
}

}  // namespace nsmoo::io
