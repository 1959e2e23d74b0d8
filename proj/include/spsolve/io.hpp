#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "spsolve/saddle.hpp"
#include "spsolve/trace.hpp"

namespace spsolve {

/// Fixed 17-significant-digit decimal formatting; round-trips binary64.
inline std::string fmt_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Plain structured text: [section] headers with key = value entries.
// A value may continue over following lines until the next key or section
// (used for numeric grids). '#' starts a comment. Repeated section names are
// preserved in order.
// ---------------------------------------------------------------------------

struct ConfigSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : entries)
      if (k == key) return &v;
    return nullptr;
  }
};

namespace detail_io {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace detail_io

inline std::vector<ConfigSection> parse_sections(std::istream& in) {
  std::vector<ConfigSection> sections;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail_io::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("line " + std::to_string(lineno) + ": malformed section header");
      sections.push_back({detail_io::trim(line.substr(1, line.size() - 2)), {}});
      continue;
    }
    auto eq = line.find('=');
    if (eq != std::string::npos) {
      if (sections.empty())
        throw ParseError("line " + std::to_string(lineno) + ": entry before any [section]");
      std::string key = detail_io::trim(line.substr(0, eq));
      std::string value = detail_io::trim(line.substr(eq + 1));
      if (key.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty key");
      sections.back().entries.emplace_back(std::move(key), std::move(value));
    } else {
      // Continuation of the previous value (numeric grid rows).
      if (sections.empty() || sections.back().entries.empty())
        throw ParseError("line " + std::to_string(lineno) + ": continuation without a key");
      auto& v = sections.back().entries.back().second;
      if (!v.empty()) v += ' ';
      v += line;
    }
  }
  return sections;
}

inline std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string tok;
  while (ss >> tok) {
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ParseError(what + ": bad number '" + tok + "'");
    }
  }
  return out;
}

inline double parse_double(const ConfigSection& sec, const std::string& key) {
  const std::string* v = sec.find(key);
  if (!v) throw ParseError("section [" + sec.name + "]: missing key '" + key + "'");
  auto nums = parse_numbers(*v, "[" + sec.name + "] " + key);
  if (nums.size() != 1) throw ParseError("section [" + sec.name + "]: key '" + key + "' must be one number");
  return nums[0];
}

inline int parse_int(const ConfigSection& sec, const std::string& key) {
  double v = parse_double(sec, key);
  int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw ParseError("section [" + sec.name + "]: key '" + key + "' must be an integer");
  return i;
}

// ---------------------------------------------------------------------------
// Instance files: [params] with the seven constants, then [f], [g] as
// dim/hessian/linear grids and [B] as rows/cols/entries.
// ---------------------------------------------------------------------------

inline void write_matrix_grid(std::ostream& out, const Mat& M) {
  for (int i = 0; i < M.rows; ++i) {
    out << " ";
    for (int j = 0; j < M.cols; ++j) out << ' ' << fmt_g17(M(i, j));
    out << '\n';
  }
}

inline void write_instance(std::ostream& out, const SaddlePointProblem& pb) {
  auto [Hf, cf] = detail::probe_quadratic(pb.f);
  auto [Hg, cg] = detail::probe_quadratic(pb.g);
  if (!pb.B.dense) throw InvalidInstance("write_instance: dense B required");
  const ProblemParams& p = pb.params;
  out << "[params]\n";
  out << "L_x = " << fmt_g17(p.L_x) << '\n';
  out << "L_y = " << fmt_g17(p.L_y) << '\n';
  out << "L_xy = " << fmt_g17(p.L_xy) << '\n';
  out << "mu_x = " << fmt_g17(p.mu_x) << '\n';
  out << "mu_y = " << fmt_g17(p.mu_y) << '\n';
  out << "mu_xy = " << fmt_g17(p.mu_xy) << '\n';
  out << "mu_yx = " << fmt_g17(p.mu_yx) << '\n';
  out << "\n[f]\ndim = " << pb.dx() << "\nhessian =\n";
  write_matrix_grid(out, Hf);
  out << "linear =\n ";
  for (double v : cf) out << ' ' << fmt_g17(v);
  out << "\n\n[g]\ndim = " << pb.dy() << "\nhessian =\n";
  write_matrix_grid(out, Hg);
  out << "linear =\n ";
  for (double v : cg) out << ' ' << fmt_g17(v);
  out << "\n\n[B]\nrows = " << pb.B.rows << "\ncols = " << pb.B.cols << "\nentries =\n";
  write_matrix_grid(out, *pb.B.dense);
}

inline void write_instance_file(const std::string& path, const SaddlePointProblem& pb) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  write_instance(out, pb);
}

namespace detail_io {

inline Mat read_grid(const ConfigSection& sec, const std::string& key, int rows, int cols) {
  const std::string* v = sec.find(key);
  if (!v) throw ParseError("section [" + sec.name + "]: missing key '" + key + "'");
  auto nums = parse_numbers(*v, "[" + sec.name + "] " + key);
  if (static_cast<int>(nums.size()) != rows * cols)
    throw ParseError("section [" + sec.name + "]: key '" + key + "' needs " +
                     std::to_string(rows * cols) + " numbers, got " + std::to_string(nums.size()));
  Mat M(rows, cols);
  M.a = std::move(nums);
  return M;
}

inline SmoothFn read_quadratic(const ConfigSection& sec, double L, double mu) {
  int dim = parse_int(sec, "dim");
  if (dim < 1) throw ParseError("section [" + sec.name + "]: dim must be positive");
  Mat H = read_grid(sec, "hessian", dim, dim);
  Mat lin = read_grid(sec, "linear", 1, dim);
  return quadratic_fn(std::move(H), std::move(lin.a), L, mu);
}

}  // namespace detail_io

inline SaddlePointProblem read_instance(std::istream& in) {
  auto sections = parse_sections(in);
  auto get = [&](const std::string& name) -> const ConfigSection& {
    for (const auto& s : sections)
      if (s.name == name) return s;
    throw ParseError("instance file: missing [" + name + "] section");
  };
  const ConfigSection& ps = get("params");
  ProblemParams p;
  p.L_x = parse_double(ps, "L_x");
  p.L_y = parse_double(ps, "L_y");
  p.L_xy = parse_double(ps, "L_xy");
  p.mu_x = parse_double(ps, "mu_x");
  p.mu_y = parse_double(ps, "mu_y");
  p.mu_xy = parse_double(ps, "mu_xy");
  p.mu_yx = parse_double(ps, "mu_yx");

  SaddlePointProblem pb;
  pb.params = p;
  pb.f = detail_io::read_quadratic(get("f"), p.L_x, p.mu_x);
  pb.g = detail_io::read_quadratic(get("g"), p.L_y, p.mu_y);
  const ConfigSection& bs = get("B");
  int rows = parse_int(bs, "rows");
  int cols = parse_int(bs, "cols");
  pb.B = dense_map(detail_io::read_grid(bs, "entries", rows, cols));
  pb.validate();
  return pb;
}

inline SaddlePointProblem read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file '" + path + "'");
  return read_instance(in);
}

// ---------------------------------------------------------------------------
// Trace CSV.
// ---------------------------------------------------------------------------

inline constexpr const char* kTraceHeader =
    "phase,r2,psi,gap,grad_f,grad_g,matvec_B,matvec_Bt,exec_time";

inline void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    out << r.phase << ',' << fmt_g17(r.r2) << ',';
    if (r.psi) out << fmt_g17(*r.psi);
    out << ',';
    if (r.gap) out << fmt_g17(*r.gap);
    out << ',' << r.grad_f << ',' << r.grad_g << ',' << r.matvec_B << ',' << r.matvec_Bt << ','
        << fmt_g17(r.exec_time) << '\n';
  }
}

inline std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("trace csv: empty file");
  if (detail_io::trim(line) != kTraceHeader) throw ParseError("trace csv: unexpected header");
  while (std::getline(in, line)) {
    if (detail_io::trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < 9) cells.push_back("");
    if (cells.size() != 9) throw ParseError("trace csv: bad row '" + line + "'");
    TraceRecord r;
    r.phase = std::stoi(cells[0]);
    r.r2 = std::stod(cells[1]);
    if (!cells[2].empty()) r.psi = std::stod(cells[2]);
    if (!cells[3].empty()) r.gap = std::stod(cells[3]);
    r.grad_f = std::stoll(cells[4]);
    r.grad_g = std::stoll(cells[5]);
    r.matvec_B = std::stoll(cells[6]);
    r.matvec_Bt = std::stoll(cells[7]);
    r.exec_time = std::stod(cells[8]);
    out.push_back(r);
  }
  return out;
}

}  // namespace spsolve
