#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rotavg/certificate.hpp"
#include "rotavg/sdp.hpp"

namespace rotavg {

// Problem files:
//
//   # comment
//   n <N>
//   e <i> <j> <r11> <r12> <r13> <r21> <r22> <r23> <r31> <r32> <r33>
//
// 0-indexed vertices, row-major rotation entries. Blocks whose
// orthogonality error is within 1e-6 are accepted; above 1e-9 they are
// re-projected to SO(3) and a warning is recorded.
inline constexpr int kReportFormatVersion = 1;

CameraGraph parse_problem(std::string_view text,
                          std::vector<std::string>* warnings = nullptr);
// Canonical form: header line and sorted edges, 17 significant digits.
std::string serialize_problem(const CameraGraph& g);

// Solution files use the same header with "r <i> <9 entries>" lines, one per
// vertex. parse_solution also accepts a JSON report carrying
// solution.rotations.
SolutionStack parse_solution(std::string_view text,
                             std::vector<std::string>* warnings = nullptr);
std::string serialize_solution(const SolutionStack& r);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

// 17 significant digits, round-trips exactly.
std::string format_double(double x);

nlohmann::json rotations_to_json(const SolutionStack& r);
nlohmann::json certificate_to_json(const Certificate& c);
nlohmann::json trace_to_json(const SolveTrace& t);
nlohmann::json config_to_json(const SolverConfig& c);

}  // namespace rotavg
