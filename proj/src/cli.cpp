#include "rotavg/cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "rotavg/bench.hpp"
#include "rotavg/io.hpp"

namespace rotavg {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

CameraGraph load_problem(const std::string& path, std::ostream& err) {
  std::vector<std::string> warnings;
  CameraGraph g = parse_problem(read_text_file(path), &warnings);
  for (const auto& w : warnings) err << "warning: " << path << ": " << w << "\n";
  return g;
}

std::string certificate_text(const Certificate& c) {
  std::string s;
  s += "# verdict " + to_string(c.verdict) + "\n";
  s += "# lambda_min_margin " + format_double(c.lambda_min_margin) + "\n";
  s += "# duality_gap " + format_double(c.duality_gap) + "\n";
  s += "# primal_objective " + format_double(c.primal_objective) + "\n";
  s += "# stationarity_residual " + format_double(c.stationarity_residual) + "\n";
  s += "# max_residual " + fixed(c.max_residual * kDeg, 6) + " degrees\n";
  s += "# alpha_max " + fixed(c.apriori_bound * kDeg, 6) + " degrees\n";
  if (c.cycle_bound) s += "# cycle_bound " + fixed(*c.cycle_bound * kDeg, 6) + " degrees\n";
  return s;
}

struct SolveOptions {
  std::string input;
  std::string output;
  std::string format = "json";
  std::string order = "cyclic";
  double tol = 1e-9;
  int max_sweeps = 1000;
  std::uint64_t seed = 0;
  int anchor = 0;
  bool refine_lm = false;
  bool spanning_tree = false;
};

int run_solve(const SolveOptions& o, std::ostream& out, std::ostream& err) {
  const CameraGraph g = load_problem(o.input, err);
  SolverConfig cfg;
  cfg.rel_tol = o.tol;
  cfg.max_sweeps = o.max_sweeps;
  cfg.seed = o.seed;
  cfg.order = o.order == "random" ? SweepOrder::RandomPermutation : SweepOrder::Cyclic;
  cfg.spanning_tree_init = o.spanning_tree;

  const BlockMeasurement m(g);
  const DdSolution dd = solve_dd(m, cfg);
  for (const auto& w : dd.trace.warnings) err << "warning: " << w << "\n";
  SolutionStack sol = round_solution(dd.y, o.anchor);
  std::optional<LMResult> lm;
  if (o.refine_lm) {
    lm = lm_solve(g, sol);
    sol = lm->solution;
  }

  std::optional<Certificate> cert;
  if (g.num_vertices() >= 2 && g.is_connected()) {
    cert = certify(sol, g);
  } else {
    err << "warning: graph is not connected; no certificate computed\n";
  }

  const double relax = relaxation_objective(dd.y, m);
  const double primal = primal_objective(sol, m);
  if (o.format == "text") {
    std::string s = "# rotavg solve report, format version " +
                    std::to_string(kReportFormatVersion) + "\n";
    s += "# objective " + format_double(primal) + "\n";
    s += "# relaxation_objective " + format_double(relax) + "\n";
    s += "# chordal_cost " + format_double(chordal_cost(sol, g)) + "\n";
    s += "# sweeps " + std::to_string(dd.trace.sweeps_run) +
         (dd.trace.converged ? " (converged)" : " (max sweeps reached)") + "\n";
    s += "# wall_time " + format_double(dd.trace.wall_time) + "\n";
    if (cert) s += certificate_text(*cert);
    s += serialize_solution(sol);
    emit(s, o.output, out);
  } else {
    nlohmann::json j = {
        {"format_version", kReportFormatVersion},
        {"command", "solve"},
        {"n", g.num_vertices()},
        {"num_edges", g.num_edges()},
        {"solution", {{"anchor", o.anchor}, {"rotations", rotations_to_json(sol)}}},
        {"objective", primal},
        {"relaxation_objective", relax},
        {"relaxation_gap", primal - relax},
        {"chordal_cost", chordal_cost(sol, g)},
        {"trace", trace_to_json(dd.trace)},
        {"config", config_to_json(cfg)},
        {"refine_lm", o.refine_lm},
        {"certificate", cert ? certificate_to_json(*cert) : nlohmann::json(nullptr)},
    };
    if (lm) j["lm"] = {{"iterations", lm->iterations}, {"converged", lm->converged}};
    emit(j.dump(2) + "\n", o.output, out);
  }
  if (!cert) return kExitNotCertified;
  return cert->verdict == Verdict::CertifiedGlobal ? kExitOk : kExitNotCertified;
}

int run_certify(const std::string& input, const std::string& solution,
                const std::string& format, const std::string& output,
                std::ostream& out, std::ostream& err) {
  const CameraGraph g = load_problem(input, err);
  std::vector<std::string> warnings;
  const SolutionStack sol = parse_solution(read_text_file(solution), &warnings);
  for (const auto& w : warnings) err << "warning: " << solution << ": " << w << "\n";
  if (sol.size() != g.num_vertices()) {
    throw InputError("solution has " + std::to_string(sol.size()) +
                     " rotations but the problem has " +
                     std::to_string(g.num_vertices()) + " vertices");
  }
  const Certificate cert = certify(sol, g);
  if (format == "text") {
    emit(certificate_text(cert), output, out);
  } else {
    nlohmann::json j = {{"format_version", kReportFormatVersion},
                        {"command", "certify"},
                        {"n", g.num_vertices()},
                        {"num_edges", g.num_edges()},
                        {"chordal_cost", chordal_cost(sol, g)},
                        {"certificate", certificate_to_json(cert)}};
    emit(j.dump(2) + "\n", output, out);
  }
  return cert.verdict == Verdict::CertifiedGlobal ? kExitOk : kExitNotCertified;
}

int run_bound(const std::string& input, std::ostream& out, std::ostream& err) {
  const CameraGraph g = load_problem(input, err);
  const SpectralSummary s = spectral_summary(g);
  const double alpha = alpha_max_bound(s);
  out << "lambda2 " << fixed(s.fiedler, 9) << "\n";
  out << "d_max " << s.d_max << "\n";
  out << "d_min " << s.d_min << "\n";
  out << "alpha_max " << fixed(alpha * kDeg, 6) << " degrees (" << fixed(alpha, 9)
      << " rad)\n";
  if (g.is_cycle()) {
    const double c = cycle_bound(g.num_vertices());
    out << "cycle_bound " << fixed(c * kDeg, 6) << " degrees (" << fixed(c, 9)
        << " rad)\n";
  }
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Rotation averaging with global optimality certificates", "rotavg"};
  app.require_subcommand(1);

  SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve the relaxation by block coordinate descent");
  solve_cmd->add_option("--input", solve.input, "Problem file")->required();
  solve_cmd->add_option("--tol", solve.tol, "Relative objective decrease per sweep");
  solve_cmd->add_option("--max-sweeps", solve.max_sweeps)->check(CLI::PositiveNumber);
  solve_cmd->add_option("--order", solve.order)->check(CLI::IsMember({"cyclic", "random"}));
  solve_cmd->add_option("--seed", solve.seed);
  solve_cmd->add_option("--anchor", solve.anchor);
  solve_cmd->add_option("--refine-lm", solve.refine_lm, "Polish the rounded solution with LM")
      ->expected(0, 1)
      ->default_str("true");
  solve_cmd->add_flag("--spanning-tree-init", solve.spanning_tree);
  solve_cmd->add_option("--output", solve.output);
  solve_cmd->add_option("--format", solve.format)->check(CLI::IsMember({"json", "text"}));

  std::string cert_input, cert_solution, cert_format = "json", cert_output;
  auto* cert_cmd = app.add_subcommand("certify", "Certify a candidate solution");
  cert_cmd->add_option("--input", cert_input)->required();
  cert_cmd->add_option("--solution", cert_solution)->required();
  cert_cmd->add_option("--format", cert_format)->check(CLI::IsMember({"json", "text"}));
  cert_cmd->add_option("--output", cert_output);

  std::string bound_input;
  auto* bound_cmd = app.add_subcommand("bound", "Print the a-priori residual bounds");
  bound_cmd->add_option("--input", bound_input)->required();

  SynthSpec synth;
  std::string synth_topology = "cycle", synth_out, synth_truth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic problem");
  synth_cmd->add_option("--topology", synth_topology)
      ->check(CLI::IsMember({"cycle", "complete", "random_regular"}));
  synth_cmd->add_option("--n", synth.n)->required();
  synth_cmd->add_option("--sigma", synth.sigma);
  synth_cmd->add_option("--seed", synth.seed);
  synth_cmd->add_option("--degree", synth.degree, "Degree for random_regular");
  synth_cmd->add_option("--out", synth_out);
  synth_cmd->add_option("--truth", synth_truth, "Also write the ground-truth solution");

  BenchConfig bench;
  std::string bench_topology = "cycle", bench_output, bench_format = "text";
  bool bench_scaling = false;
  bench.spec.n = 20;
  bench.spec.sigma = 0.5;
  auto* bench_cmd = app.add_subcommand("bench", "Compare BCD with LM on synthetic data");
  bench_cmd->add_option("--topology", bench_topology)
      ->check(CLI::IsMember({"cycle", "complete", "random_regular"}));
  bench_cmd->add_option("--n", bench.spec.n);
  bench_cmd->add_option("--sigma", bench.spec.sigma);
  bench_cmd->add_option("--degree", bench.spec.degree);
  bench_cmd->add_option("--runs", bench.runs)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.spec.seed);
  bench_cmd->add_flag("--scaling", bench_scaling, "Time BCD for n in {20, 50, 100, 200}");
  bench_cmd->add_option("--format", bench_format)->check(CLI::IsMember({"json", "text"}));
  bench_cmd->add_option("--output", bench_output);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    if (*solve_cmd) return run_solve(solve, out, err);
    if (*cert_cmd) {
      return run_certify(cert_input, cert_solution, cert_format, cert_output, out, err);
    }
    if (*bound_cmd) return run_bound(bound_input, out, err);
    if (*synth_cmd) {
      synth.topology = parse_topology(synth_topology);
      const SynthInstance inst = generate(synth);
      emit(serialize_problem(inst.graph), synth_out, out);
      if (!synth_truth.empty()) write_text_file(synth_truth, serialize_solution(inst.ground_truth));
      return kExitOk;
    }
    if (*bench_cmd) {
      bench.spec.topology = parse_topology(bench_topology);
      if (bench_scaling) {
        // Scaling is timed with the default solve settings.
        bench.solver = SolverConfig{};
        const ScalingReport rep = run_scaling(bench, {20, 50, 100, 200});
        if (bench_format == "json") {
          emit(scaling_to_json(rep).dump(2) + "\n", bench_output, out);
        } else {
          std::string s;
          for (const auto& p : rep.points) {
            s += "n " + std::to_string(p.n) + " bcd_time " + format_double(p.mean_bcd_time) + "\n";
          }
          s += std::string("monotone ") + (rep.monotone ? "true" : "false") + "\n";
          emit(s, bench_output, out);
        }
        return rep.monotone ? kExitOk : kExitNumericalFailure;
      }
      const BenchSummary s = run_bench(bench);
      if (bench_format == "json") {
        emit(bench_to_json(bench, s).dump(2) + "\n", bench_output, out);
      } else {
        std::ostringstream t;
        t << "topology " << to_string(bench.spec.topology) << " n " << bench.spec.n
          << " sigma " << bench.spec.sigma << " runs " << bench.runs << "\n";
        t << "bcd success_fraction " << fixed(s.bcd_success, 2) << " mean_rel_error "
          << format_double(s.bcd_mean_rel_error) << " mean_time " << fixed(s.bcd_mean_time, 4)
          << " polished " << fixed(s.bcd_polished, 2) << "\n";
        t << "lm  success_fraction " << fixed(s.lm_success, 2) << " mean_rel_error "
          << format_double(s.lm_mean_rel_error) << " mean_time " << fixed(s.lm_mean_time, 4)
          << " reached_reference " << fixed(s.lm_reached_fraction, 2) << "\n";
        emit(t.str(), bench_output, out);
      }
      return kExitOk;
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumericalFailure;
  }
  return kExitInputError;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace rotavg
