#include "rotavg/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace rotavg {

namespace {

constexpr double kAcceptOrth = 1e-6;

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t k = 0;
  while (k < line.size()) {
    while (k < line.size() && (line[k] == ' ' || line[k] == '\t')) ++k;
    const std::size_t start = k;
    while (k < line.size() && line[k] != ' ' && line[k] != '\t') ++k;
    if (k > start) out.push_back(line.substr(start, k - start));
  }
  return out;
}

double to_double(std::string_view tok, int line) {
  double x = 0.0;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x)) {
    throw ParseError(line, "invalid number '" + std::string(tok) + "'");
  }
  return x;
}

long long to_int(std::string_view tok, int line) {
  long long x = 0;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, x);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line, "invalid integer '" + std::string(tok) + "'");
  }
  return x;
}

Rotation to_rotation(const std::vector<std::string_view>& tok, std::size_t first,
                     int line, std::vector<std::string>* warnings) {
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = to_double(tok[first + 3 * r + c], line);
  }
  const double err = orthogonality_error<double>(m);
  if (err > kAcceptOrth) {
    throw ParseError(line, "block is not a rotation (orthogonality error " +
                               format_double(err) + ")");
  }
  if (err > So3Tolerances<double>::orth) {
    if (warnings) {
      warnings->push_back("line " + std::to_string(line) +
                          ": rotation re-projected (orthogonality error " +
                          format_double(err) + ")");
    }
    return project_to_so3<double>(m);
  }
  return Rotation(m);
}

// Walks non-comment lines, handing (line number, tokens) to `fn`.
template <typename Fn>
void for_each_record(std::string_view text, Fn&& fn) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto tok = split(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    fn(line_no, tok);
    if (nl == text.size()) break;
  }
}

int parse_header(const std::vector<std::string_view>& tok, int line) {
  if (tok[0] != "n" || tok.size() != 2) {
    throw ParseError(line, "expected header 'n <vertex count>'");
  }
  const long long n = to_int(tok[1], line);
  if (n < 1 || n > 10'000'000) throw ParseError(line, "vertex count out of range");
  return static_cast<int>(n);
}

std::string rotation_fields(const Rotation& r) {
  std::string s;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      s += ' ';
      s += format_double(r(a, b));
    }
  }
  return s;
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

CameraGraph parse_problem(std::string_view text, std::vector<std::string>* warnings) {
  int n = -1;
  std::vector<Edge> edges;
  std::set<std::pair<int, int>> seen;
  for_each_record(text, [&](int line, const std::vector<std::string_view>& tok) {
    if (n < 0) {
      n = parse_header(tok, line);
      return;
    }
    if (tok[0] != "e") {
      throw ParseError(line, "unknown record '" + std::string(tok[0]) + "'");
    }
    if (tok.size() != 12) {
      throw ParseError(line, "edge record needs 2 indices and 9 rotation entries");
    }
    const long long i = to_int(tok[1], line);
    const long long j = to_int(tok[2], line);
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw ParseError(line, "vertex index out of range");
    }
    if (i == j) throw ParseError(line, "self-loop");
    if (!seen.insert({std::min(i, j), std::max(i, j)}).second) {
      throw ParseError(line, "duplicate edge");
    }
    edges.push_back({static_cast<int>(i), static_cast<int>(j),
                     to_rotation(tok, 3, line, warnings)});
  });
  if (n < 0) throw ParseError(0, "missing header 'n <vertex count>'");
  return CameraGraph(n, std::move(edges));
}

std::string serialize_problem(const CameraGraph& g) {
  std::string out = "n " + std::to_string(g.num_vertices()) + "\n";
  for (const Edge& e : g.edges()) {
    out += "e " + std::to_string(e.i) + " " + std::to_string(e.j) +
           rotation_fields(e.rotation) + "\n";
  }
  return out;
}

SolutionStack parse_solution(std::string_view text, std::vector<std::string>* warnings) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(0, std::string("invalid JSON report: ") + e.what());
    }
    if (!j.contains("solution") || !j["solution"].contains("rotations")) {
      throw ParseError(0, "JSON report has no solution.rotations");
    }
    std::vector<Rotation> rots;
    for (const auto& entry : j["solution"]["rotations"]) {
      if (!entry.is_array() || entry.size() != 9) {
        throw ParseError(0, "each rotation must be an array of 9 numbers");
      }
      Eigen::Matrix3d m;
      for (int k = 0; k < 9; ++k) m(k / 3, k % 3) = entry[k].get<double>();
      const double err = orthogonality_error<double>(m);
      if (err > kAcceptOrth) throw ParseError(0, "solution entry is not a rotation");
      rots.push_back(err > So3Tolerances<double>::orth ? project_to_so3<double>(m)
                                                       : Rotation(m));
    }
    return SolutionStack(std::move(rots));
  }

  int n = -1;
  std::vector<std::optional<Rotation>> rots;
  for_each_record(text, [&](int line, const std::vector<std::string_view>& tok) {
    if (n < 0) {
      n = parse_header(tok, line);
      rots.assign(n, std::nullopt);
      return;
    }
    if (tok[0] != "r" || tok.size() != 11) {
      throw ParseError(line, "expected 'r <i> <9 rotation entries>'");
    }
    const long long i = to_int(tok[1], line);
    if (i < 0 || i >= n) throw ParseError(line, "vertex index out of range");
    if (rots[i]) throw ParseError(line, "duplicate rotation for vertex " + std::to_string(i));
    rots[i] = to_rotation(tok, 2, line, warnings);
  });
  if (n < 0) throw ParseError(0, "missing header 'n <vertex count>'");
  std::vector<Rotation> out;
  for (int i = 0; i < n; ++i) {
    if (!rots[i]) throw ParseError(0, "no rotation for vertex " + std::to_string(i));
    out.push_back(*rots[i]);
  }
  return SolutionStack(std::move(out));
}

std::string serialize_solution(const SolutionStack& r) {
  std::string out = "n " + std::to_string(r.size()) + "\n";
  for (int i = 0; i < r.size(); ++i) {
    out += "r " + std::to_string(i) + rotation_fields(r[i]) + "\n";
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

nlohmann::json rotations_to_json(const SolutionStack& r) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Rotation& rot : r.rotations()) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < 9; ++k) row.push_back(rot(k / 3, k % 3));
    arr.push_back(std::move(row));
  }
  return arr;
}

nlohmann::json certificate_to_json(const Certificate& c) {
  const double deg = 180.0 / std::numbers::pi;
  nlohmann::json j = {
      {"verdict", to_string(c.verdict)},
      {"lambda_min_margin", c.lambda_min_margin},
      {"tolerance", c.tolerance},
      {"duality_gap", c.duality_gap},
      {"primal_objective", c.primal_objective},
      {"dual_objective", c.dual_objective},
      {"max_residual", c.max_residual},
      {"max_residual_deg", c.max_residual * deg},
      {"apriori_bound", c.apriori_bound},
      {"apriori_bound_deg", c.apriori_bound * deg},
      {"alpha_max", c.apriori_bound},
      {"within_apriori_bound", c.max_residual <= c.apriori_bound},
      {"stationarity_residual", c.stationarity_residual},
      {"eigensolver", c.used_lanczos ? "lanczos" : "dense"},
  };
  if (c.cycle_bound) {
    j["cycle_bound"] = *c.cycle_bound;
    j["cycle_bound_deg"] = *c.cycle_bound * deg;
  } else {
    j["cycle_bound"] = nullptr;
  }
  return j;
}

nlohmann::json trace_to_json(const SolveTrace& t) {
  return {
      {"initial_objective", t.initial_objective},
      {"final_objective", t.objectives.empty() ? t.initial_objective : t.objectives.back()},
      {"sweeps_run", t.sweeps_run},
      {"converged", t.converged},
      {"wall_time", t.wall_time},
      {"objectives", t.objectives},
  };
}

nlohmann::json config_to_json(const SolverConfig& c) {
  return {
      {"max_sweeps", c.max_sweeps},
      {"rel_tol", c.rel_tol},
      {"order", c.order == SweepOrder::Cyclic ? "cyclic" : "random"},
      {"seed", c.seed},
      {"spanning_tree_init", c.spanning_tree_init},
  };
}

}  // namespace rotavg
