#include "bfrb/cli_app.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bfrb/config.hpp"
#include "bfrb/diagnostics.hpp"
#include "bfrb/problems.hpp"
#include "bfrb/trace_io.hpp"
#include "json.hpp"

namespace bfrb {

namespace {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("BFRB_LOG");
  if (!env) return LogLevel::info;
  const std::string v = env;
  if (v == "quiet") return LogLevel::quiet;
  if (v == "debug") return LogLevel::debug;
  return LogLevel::info;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::info) std::cerr << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::debug) std::cerr << msg << "\n";
}

bool is_shipped(const std::string& name) {
  for (const auto& sp : shipped_problems())
    if (sp.name == name) return true;
  return false;
}

ProblemInstance build_problem(const std::string& source) {
  if (is_shipped(source)) return build_shipped(source);
  std::ifstream probe(source);
  if (!probe)
    fail(Errc::config_parse_error,
         "problem source '" + source + "' is neither a shipped name nor a readable file");
  return load_problem_file(source);
}

void install_geometry(ProblemInstance& p, const GeometryConfig& gc) {
  LegendreGeometry g = gc.build(p.A.dimension());
  // compatibility probe: start points must be in the domain and B must have
  // a closed-form resolvent under this geometry
  g.require_in_domain(p.v0);
  g.require_in_domain(p.v1);
  p.B.resolve_dual(g, 1.0, g.gradient(p.v1));
  p.g = std::move(g);
}

SolverRun dispatch_solve(ProblemInstance& p, const SolverConfig& s) {
  switch (s.method) {
    case Method::frb_constant:
    case Method::projected_constant:
    case Method::tseng: {
      if (!s.mu_set)
        fail(Errc::config_parse_error,
             "[solver].mu is required for constant-step methods");
      ConstantStepConfig cfg;
      cfg.mu = s.mu;
      cfg.delta = s.delta;
      cfg.max_iters = s.max_iters;
      cfg.tol = s.tol;
      cfg.record_trace = s.record_trace;
      cfg.stop = s.stop;
      if (s.method == Method::frb_constant) return solve_frb_constant(p, cfg);
      if (s.method == Method::projected_constant) return solve_projected_constant(p, cfg);
      return solve_tseng_baseline(p, cfg);
    }
    case Method::frb_adaptive:
    case Method::projected_adaptive: {
      if (!(s.alpha > 0.0))
        fail(Errc::config_parse_error, "[solver].alpha is required for adaptive methods");
      AdaptiveStepConfig cfg;
      cfg.alpha = s.alpha;
      cfg.mu0 = s.mu0;
      cfg.mu1 = s.mu1;
      cfg.d_schedule = s.d_schedule;
      cfg.delta = s.delta;
      cfg.max_iters = s.max_iters;
      cfg.tol = s.tol;
      cfg.record_trace = s.record_trace;
      cfg.stop = s.stop;
      return s.method == Method::frb_adaptive ? solve_frb_adaptive(p, cfg)
                                              : solve_projected_adaptive(p, cfg);
    }
    case Method::proximal_point: {
      if (!s.mu_set)
        fail(Errc::config_parse_error, "[solver].mu is required for the proximal point method");
      ProximalPointConfig cfg;
      cfg.mu = s.mu;
      cfg.max_iters = s.max_iters;
      cfg.tol = s.tol;
      cfg.record_trace = s.record_trace;
      cfg.stop = s.stop;
      return solve_proximal_point(p, cfg);
    }
  }
  fail(Errc::config_parse_error, "unhandled solver method");
}

TraceMeta run_meta(const RunConfig& rc, const SolverRun& run) {
  TraceMeta meta = make_trace_meta(rc.problem_source, rc.geometry.kind, run);
  if (rc.geometry.kind == "weighted") {
    std::string w = "[";
    for (std::size_t i = 0; i < rc.geometry.weights.size(); ++i) {
      if (i) w += ", ";
      w += format_double(rc.geometry.weights[i]);
    }
    meta.entries["geometry_weights"] = w + "]";
  }
  if (rc.geometry.entropy_gamma)
    meta.entries["geometry_entropy_gamma"] = format_double(*rc.geometry.entropy_gamma);
  return meta;
}

int exit_code(Termination t) {
  switch (t) {
    case Termination::converged: return 0;
    case Termination::max_iters: return 2;
    case Termination::divergence_guard: return 3;
  }
  return 1;
}

LegendreGeometry geometry_from_meta(const TraceMeta& meta, std::size_t d) {
  const std::string kind = meta.get_or("geometry", "euclidean");
  if (kind == "weighted")
    return LegendreGeometry::weighted_quadratic(
        parse_vector(meta.get_or("geometry_weights", "[]"), "trace geometry_weights"));
  if (kind == "entropy")
    return LegendreGeometry::shannon_entropy(d, meta.get_double_or("geometry_entropy_gamma", 1.0));
  return LegendreGeometry::euclidean(d);
}

Vec read_solution_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::config_parse_error, "cannot open solution file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  // accept `[a, b]`, `reference = [a, b]`, or whitespace-separated numbers
  const auto eq = text.find('=');
  if (eq != std::string::npos) text = text.substr(eq + 1);
  const auto open = text.find('[');
  if (open != std::string::npos) {
    const auto close = text.rfind(']');
    if (close == std::string::npos)
      fail(Errc::config_parse_error, path + ": unbalanced brackets in the solution vector");
    return parse_vector(text.substr(open, close - open + 1), "solution");
  }
  Vec v;
  std::istringstream ss(text);
  double x;
  while (ss >> x) v.push_back(x);
  if (v.empty()) fail(Errc::config_parse_error, path + ": no numbers found");
  return v;
}

}  // namespace

int cmd_run(const std::string& config_path) {
  try {
    RunConfig rc = RunConfig::load(config_path);
    if (!rc.trace_path.empty()) rc.solver.record_trace = true;
    ProblemInstance p = build_problem(rc.problem_source);
    install_geometry(p, rc.geometry);
    log_debug("problem '" + p.label + "', dimension " + std::to_string(p.g.dimension()) +
              ", method " + method_name(rc.solver.method));

    const auto t0 = std::chrono::steady_clock::now();
    const SolverRun run = dispatch_solve(p, rc.solver);
    const auto t1 = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    if (!rc.trace_path.empty()) write_trace_csv(rc.trace_path, run, run_meta(rc, run));
    if (!rc.summary_path.empty()) write_summary_json(rc.summary_path, run, ms);

    std::ostringstream os;
    os << p.label << ": " << termination_name(run.termination) << " after " << run.iterations
       << " iterations, residual " << run.final_residual << ", " << run.a_evaluations
       << " A evaluations, " << ms << " ms";
    log_info(os.str());
    return exit_code(run.termination);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_compare(const std::string& config_path) {
  try {
    const RunConfig rc = RunConfig::load(config_path);
    if (rc.compare_methods.size() < 2)
      fail(Errc::config_parse_error, "[compare].methods must list at least two methods");

    struct Row {
      std::string method;
      long iterations;
      std::size_t a_evals;
      double ms;
      double residual;
      std::string status;
    };
    std::vector<Row> rows;
    for (Method m : rc.compare_methods) {
      ProblemInstance p = build_problem(rc.problem_source);  // fresh handles per run
      install_geometry(p, rc.geometry);
      SolverConfig s = rc.solver;
      s.method = m;
      const auto t0 = std::chrono::steady_clock::now();
      const SolverRun run = dispatch_solve(p, s);
      const auto t1 = std::chrono::steady_clock::now();
      rows.push_back({method_name(m), run.iterations, run.a_evaluations,
                      std::chrono::duration<double, std::milli>(t1 - t0).count(),
                      run.final_residual, termination_name(run.termination)});
    }

    std::ostringstream csv;
    csv << "method,iterations,a_evals,wall_time_ms,final_residual,status\n";
    for (const auto& r : rows)
      csv << r.method << "," << r.iterations << "," << r.a_evals << "," << format_double(r.ms)
          << "," << format_double(r.residual) << "," << r.status << "\n";
    if (!rc.table_path.empty()) {
      std::ofstream out(rc.table_path, std::ios::binary);
      if (!out) fail(Errc::config_parse_error, "cannot open table output: " + rc.table_path);
      out << csv.str();
    }

    std::printf("%-20s %12s %10s %14s %14s %s\n", "method", "iterations", "a_evals",
                "wall_time_ms", "residual", "status");
    for (const auto& r : rows)
      std::printf("%-20s %12ld %10zu %14.3f %14.3e %s\n", r.method.c_str(), r.iterations,
                  r.a_evals, r.ms, r.residual, r.status.c_str());
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_diagnose(const std::string& trace_path, const std::string& solution_path,
                 const std::string& json_out) {
  try {
    const TraceFile tf = read_trace_csv(trace_path);
    if (tf.run.iterates.empty())
      fail(Errc::no_trace, "trace has no iterate columns; rerun with record_trace");
    const Vec z = read_solution_file(solution_path);

    ProblemInstance p = build_problem(tf.meta.get_or("problem", ""));
    p.g = geometry_from_meta(tf.meta, p.A.dimension());

    nlohmann::json j;
    const LyapunovReport lya = check_lyapunov_descent(p, tf.run, z);
    j["lyapunov"] = lya.pass ? "PASS" : "FAIL";
    j["details"]["lyapunov"] = {{"start_index", lya.start_index},
                                {"first_violation", lya.first_violation},
                                {"max_violation", lya.max_violation},
                                {"min_energy", lya.min_energy},
                                {"message", lya.message}};

    bool rate_pass = true;
    if (tf.run.method == Method::frb_constant || tf.run.method == Method::projected_constant ||
        tf.run.method == Method::proximal_point) {
      const RateReport rate = rate_certificate(p, tf.run, z);
      rate_pass = rate.pass;
      j["rate"] = rate.pass ? "PASS" : "FAIL";
      j["details"]["rate"] = {{"c1", rate.c1},
                              {"checked", rate.checked},
                              {"violations", rate.violations},
                              {"worst_margin", rate.worst_margin}};
    } else {
      j["rate"] = "SKIPPED";
      j["details"]["rate"] = {{"reason", "rate certificate applies to constant-step runs"}};
    }

    const EvaluationReport ev = evaluation_report(tf.run);
    j["eval_count"] = ev.pass ? "PASS" : "FAIL";
    j["details"]["eval_count"] = {{"iterations", ev.iterations},
                                  {"a_evaluations", ev.a_evaluations},
                                  {"expected", ev.expected_a_evaluations},
                                  {"resolvent_calls", ev.resolvent_calls}};

    const std::string text = j.dump(2);
    std::cout << text << "\n";
    if (!json_out.empty()) {
      std::ofstream out(json_out, std::ios::binary);
      if (!out) fail(Errc::config_parse_error, "cannot open report output: " + json_out);
      out << text << "\n";
    }
    return (lya.pass && rate_pass && ev.pass) ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_problems_list() {
  std::printf("%-22s %5s  %s\n", "name", "dim", "description");
  for (const auto& sp : shipped_problems()) {
    const ProblemInstance p = sp.build();
    std::printf("%-22s %5zu  %s\n", sp.name.c_str(), p.g.dimension(), sp.description.c_str());
  }
  return 0;
}

int cmd_problems_export(const std::string& name, const std::string& out_path) {
  try {
    const ProblemInstance p = build_shipped(name);
    const std::string text = serialize_problem(p);
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) fail(Errc::config_parse_error, "cannot open output: " + out_path);
      out << text;
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace bfrb
