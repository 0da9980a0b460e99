#include "rotavg/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

namespace rotavg {

SolverConfig bench_solver_config() {
  SolverConfig c;
  c.rel_tol = 1e-14;
  c.max_sweeps = 50000;
  return c;
}

BcdOutcome solve_round_certify(const CameraGraph& g, const SolverConfig& solver,
                               const LMConfig& lm) {
  BcdOutcome out{solve_dd(BlockMeasurement(g), solver), {}, {}, false};
  out.solution = round_solution(out.dd.y, 0);
  out.certificate = certify(out.solution, g);
  if (out.certificate.verdict == Verdict::NotStationary) {
    out.solution = lm_solve(g, out.solution, lm).solution;
    out.certificate = certify(out.solution, g);
    out.polished = true;
  }
  return out;
}

int bench_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ROTAVG_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, count));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int k = next++; k < count; k = next++) {
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

BenchRun bench_one(const BenchConfig& cfg, int k) {
  BenchRun run;
  SynthSpec spec = cfg.spec;
  spec.seed = cfg.spec.seed + static_cast<std::uint64_t>(k);
  run.seed = spec.seed;
  const SynthInstance inst = generate(spec);
  const BlockMeasurement m(inst.graph);

  const BcdOutcome bcd = solve_round_certify(inst.graph, cfg.solver, cfg.lm);
  run.bcd_time = bcd.dd.trace.wall_time;
  run.sweeps = bcd.dd.trace.sweeps_run;
  run.bcd_relaxation = relaxation_objective(bcd.dd.y, m);
  run.bcd_primal = primal_objective(bcd.solution, m);
  run.bcd_certified = bcd.certificate.verdict == Verdict::CertifiedGlobal;
  run.bcd_polished = bcd.polished;
  run.bcd_solution = bcd.solution;

  // Random start: every truth rotation turned by a uniform angle in [0, 2 pi].
  const SolutionStack init = perturb_solution(
      inst.ground_truth, 2.0 * std::numbers::pi, spec.seed ^ 0x5DEECE66DULL);
  const LMResult lm = lm_solve(inst.graph, init, cfg.lm);
  run.lm_time = lm.wall_time;
  run.lm_primal = primal_objective(lm.solution, m);
  run.lm_certified = certify(lm.solution, inst.graph).verdict == Verdict::CertifiedGlobal;

  run.reference = std::min(run.bcd_primal, run.lm_primal);
  run.lm_reached_reference =
      run.lm_primal - run.reference <= 1e-6 * std::abs(run.reference);
  return run;
}

}  // namespace

BenchSummary run_bench(const BenchConfig& cfg) {
  if (cfg.runs < 1) throw InputError("bench needs at least one run");
  cfg.spec.validate();
  BenchSummary s;
  s.runs.resize(cfg.runs);
  parallel_for(cfg.runs, bench_threads(cfg.threads),
               [&](int k) { s.runs[k] = bench_one(cfg, k); });
  for (const BenchRun& r : s.runs) {
    const double scale = std::max(std::abs(r.reference), 1e-300);
    s.bcd_success += r.bcd_certified;
    s.bcd_polished += r.bcd_polished;
    s.lm_success += r.lm_certified;
    s.lm_reached_fraction += r.lm_reached_reference;
    s.bcd_mean_rel_error += std::abs(r.bcd_relaxation - r.reference) / scale;
    s.lm_mean_rel_error += (r.lm_primal - r.reference) / scale;
    s.bcd_mean_time += r.bcd_time;
    s.lm_mean_time += r.lm_time;
  }
  const double runs = cfg.runs;
  s.bcd_success /= runs;
  s.bcd_polished /= runs;
  s.lm_success /= runs;
  s.lm_reached_fraction /= runs;
  s.bcd_mean_rel_error /= runs;
  s.lm_mean_rel_error /= runs;
  s.bcd_mean_time /= runs;
  s.lm_mean_time /= runs;
  return s;
}

ScalingReport run_scaling(const BenchConfig& base, const std::vector<int>& sizes) {
  ScalingReport rep;
  for (int n : sizes) {
    SynthSpec spec = base.spec;
    spec.n = n;
    spec.validate();
    double total = 0.0;
    // Timed serially so runs do not compete for cores.
    for (int k = 0; k < base.runs; ++k) {
      spec.seed = base.spec.seed + static_cast<std::uint64_t>(k);
      const SynthInstance inst = generate(spec);
      total += solve_dd(BlockMeasurement(inst.graph), base.solver).trace.wall_time;
    }
    rep.points.push_back({n, total / base.runs});
  }
  rep.monotone = true;
  for (std::size_t k = 1; k < rep.points.size(); ++k) {
    if (!(rep.points[k].mean_bcd_time > rep.points[k - 1].mean_bcd_time)) {
      rep.monotone = false;
    }
  }
  return rep;
}

nlohmann::json bench_to_json(const BenchConfig& cfg, const BenchSummary& s) {
  nlohmann::json runs = nlohmann::json::array();
  for (const BenchRun& r : s.runs) {
    runs.push_back({{"seed", r.seed},
                    {"bcd_certified", r.bcd_certified},
                    {"bcd_polished", r.bcd_polished},
                    {"lm_certified", r.lm_certified},
                    {"lm_reached_reference", r.lm_reached_reference},
                    {"bcd_relaxation", r.bcd_relaxation},
                    {"bcd_primal", r.bcd_primal},
                    {"lm_primal", r.lm_primal},
                    {"reference", r.reference},
                    {"bcd_time", r.bcd_time},
                    {"lm_time", r.lm_time},
                    {"sweeps", r.sweeps}});
  }
  return {{"format_version", 1},
          {"command", "bench"},
          {"topology", to_string(cfg.spec.topology)},
          {"n", cfg.spec.n},
          {"sigma", cfg.spec.sigma},
          {"runs", cfg.runs},
          {"seed", cfg.spec.seed},
          {"bcd_success_fraction", s.bcd_success},
          {"bcd_polished_fraction", s.bcd_polished},
          {"lm_success_fraction", s.lm_success},
          {"lm_reached_reference_fraction", s.lm_reached_fraction},
          {"bcd_mean_relative_error", s.bcd_mean_rel_error},
          {"lm_mean_relative_error", s.lm_mean_rel_error},
          {"bcd_mean_time", s.bcd_mean_time},
          {"lm_mean_time", s.lm_mean_time},
          {"per_run", runs}};
}

nlohmann::json scaling_to_json(const ScalingReport& r) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : r.points) pts.push_back({{"n", p.n}, {"mean_bcd_time", p.mean_bcd_time}});
  return {{"points", pts}, {"monotone", r.monotone}};
}

}  // namespace rotavg
