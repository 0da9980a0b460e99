#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "rotavg/certificate.hpp"
#include "rotavg/local.hpp"
#include "rotavg/sdp.hpp"
#include "rotavg/synth.hpp"

namespace rotavg {

// Solver settings used for benchmarking: BCD runs until the per-sweep
// decrease reaches rounding level, since the certificate's stationarity
// test is far stricter than the default stopping rule.
SolverConfig bench_solver_config();

// BCD, rounding, and certification. A rounded point that is not yet
// stationary is polished by LM started from it (a local refinement within
// the same basin); `polished` records when that happened.
struct BcdOutcome {
  DdSolution dd;
  SolutionStack solution;
  Certificate certificate;
  bool polished = false;
};

BcdOutcome solve_round_certify(const CameraGraph& g, const SolverConfig& solver,
                               const LMConfig& lm = {});

// Synthetic comparison of the relaxation solver against LM from random
// initialization, one seeded instance per run.
struct BenchConfig {
  SynthSpec spec;  // spec.seed is the base seed; run k uses seed + k
  int runs = 50;
  SolverConfig solver = bench_solver_config();
  LMConfig lm;
  int threads = 0;  // 0: ROTAVG_THREADS or hardware concurrency
};

struct BenchRun {
  std::uint64_t seed = 0;
  bool bcd_certified = false;
  bool bcd_polished = false;
  bool lm_certified = false;
  bool lm_reached_reference = false;
  double bcd_relaxation = 0.0;  // -tr(Rtilde Y)
  double bcd_primal = 0.0;      // objective of the rounded solution
  double lm_primal = 0.0;
  double reference = 0.0;       // lowest feasible objective found
  double bcd_time = 0.0;
  double lm_time = 0.0;
  int sweeps = 0;
  SolutionStack bcd_solution;
};

struct BenchSummary {
  std::vector<BenchRun> runs;
  double bcd_success = 0.0;  // fraction certified global
  double bcd_polished = 0.0; // fraction that needed LM polish
  double lm_success = 0.0;
  double lm_reached_fraction = 0.0;
  double bcd_mean_rel_error = 0.0;
  double lm_mean_rel_error = 0.0;
  double bcd_mean_time = 0.0;
  double lm_mean_time = 0.0;
};

BenchSummary run_bench(const BenchConfig& cfg);

struct ScalingPoint {
  int n = 0;
  double mean_bcd_time = 0.0;
};

struct ScalingReport {
  std::vector<ScalingPoint> points;
  bool monotone = false;
};

// Mean BCD wall time per size; `monotone` reports strictly growing times.
ScalingReport run_scaling(const BenchConfig& base, const std::vector<int>& sizes);

int bench_threads(int requested = 0);

nlohmann::json bench_to_json(const BenchConfig& cfg, const BenchSummary& s);
nlohmann::json scaling_to_json(const ScalingReport& r);

}  // namespace rotavg
