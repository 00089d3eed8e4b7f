#include "bfrb/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bfrb/config.hpp"
#include "json.hpp"

namespace bfrb {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string TraceMeta::get_or(const std::string& key, const std::string& fallback) const {
  const auto it = entries.find(key);
  return it == entries.end() ? fallback : it->second;
}

double TraceMeta::get_double_or(const std::string& key, double fallback) const {
  const auto it = entries.find(key);
  return it == entries.end() ? fallback : parse_double(it->second, "trace meta " + key);
}

TraceMeta make_trace_meta(const std::string& problem_source, const std::string& geometry_desc,
                          const SolverRun& run) {
  TraceMeta m;
  m.entries["format"] = "bfrb-trace-1";
  m.entries["problem"] = problem_source;
  m.entries["geometry"] = geometry_desc;
  m.entries["method"] = method_name(run.method);
  m.entries["iterations"] = std::to_string(run.iterations);
  m.entries["a_evaluations"] = std::to_string(run.a_evaluations);
  m.entries["resolvent_calls"] = std::to_string(run.resolvent_calls);
  m.entries["termination"] = termination_name(run.termination);
  m.entries["mu"] = format_double(run.mu);
  m.entries["delta"] = format_double(run.delta);
  m.entries["gamma"] = format_double(run.gamma);
  if (std::isfinite(run.alpha)) m.entries["alpha"] = format_double(run.alpha);
  m.entries["d_sum"] = format_double(run.d_sum);
  if (!run.iterates.empty())
    m.entries["dimension"] = std::to_string(run.iterates.front().size());
  return m;
}

void write_trace_csv(const std::string& path, const SolverRun& run, const TraceMeta& meta) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) fail(Errc::config_parse_error, "cannot open trace output: " + path);
  for (const auto& [k, v] : meta.entries) out << "# " << k << " = " << v << "\n";
  const bool with_iterates = !run.iterates.empty();
  out << "n,residual,step_change,mu,a_evals";
  if (with_iterates)
    for (std::size_t j = 0; j < run.iterates.front().size(); ++j) out << ",v" << j;
  out << "\n";
  for (std::size_t r = 0; r < run.records.size(); ++r) {
    const auto& rec = run.records[r];
    out << rec.n << "," << format_double(rec.residual) << "," << format_double(rec.step_change)
        << "," << format_double(rec.mu) << "," << rec.a_evals;
    if (with_iterates)
      for (double x : run.iterates[r]) out << "," << format_double(x);
    out << "\n";
  }
}

TraceFile read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::config_parse_error, "cannot open trace file: " + path);
  TraceFile tf;
  std::string line;
  bool header_seen = false;
  std::size_t iterate_cols = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        std::string val = line.substr(eq + 1);
        auto strip = [](std::string& s) {
          while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
          while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
        };
        strip(key);
        strip(val);
        tf.meta.entries[key] = val;
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header_seen) {
      header_seen = true;
      if (cells.size() < 5 || cells[0] != "n")
        fail(Errc::config_parse_error, path + ": unrecognized trace header");
      iterate_cols = cells.size() - 5;
      continue;
    }
    if (cells.size() != 5 + iterate_cols)
      fail(Errc::config_parse_error, path + ": ragged trace row");
    IterationRecord rec;
    rec.n = parse_long(cells[0], "trace n");
    rec.residual = parse_double(cells[1], "trace residual");
    rec.step_change = parse_double(cells[2], "trace step_change");
    rec.mu = parse_double(cells[3], "trace mu");
    rec.a_evals = static_cast<std::size_t>(parse_long(cells[4], "trace a_evals"));
    tf.run.records.push_back(rec);
    tf.run.mu_sequence.push_back(rec.mu);
    if (iterate_cols > 0) {
      Vec v(iterate_cols);
      for (std::size_t j = 0; j < iterate_cols; ++j)
        v[j] = parse_double(cells[5 + j], "trace iterate");
      tf.run.iterates.push_back(std::move(v));
    }
  }
  if (!header_seen) fail(Errc::config_parse_error, path + ": empty trace file");

  tf.run.method = method_from_name(tf.meta.get_or("method", "frb"));
  tf.run.iterations = static_cast<long>(tf.meta.get_double_or("iterations", 0));
  tf.run.a_evaluations =
      static_cast<std::size_t>(tf.meta.get_double_or("a_evaluations", 0));
  tf.run.resolvent_calls =
      static_cast<std::size_t>(tf.meta.get_double_or("resolvent_calls", 0));
  tf.run.mu = tf.meta.get_double_or("mu", std::numeric_limits<double>::quiet_NaN());
  tf.run.delta = tf.meta.get_double_or("delta", 0.1);
  tf.run.gamma = tf.meta.get_double_or("gamma", 1.0);
  tf.run.alpha = tf.meta.get_double_or("alpha", std::numeric_limits<double>::quiet_NaN());
  tf.run.d_sum = tf.meta.get_double_or("d_sum", 0.0);
  if (!tf.run.iterates.empty()) tf.run.final_iterate = tf.run.iterates.back();
  if (!tf.run.records.empty()) tf.run.final_residual = tf.run.records.back().residual;
  const std::string term = tf.meta.get_or("termination", "MAX_ITERS");
  tf.run.termination = term == "CONVERGED"          ? Termination::converged
                       : term == "DIVERGENCE_GUARD" ? Termination::divergence_guard
                                                    : Termination::max_iters;
  return tf;
}

void write_summary_json(const std::string& path, const SolverRun& run, double wall_time_ms) {
  nlohmann::json j;
  j["status"] = termination_name(run.termination);
  j["iterations"] = run.iterations;
  j["final_residual"] = run.final_residual;
  j["a_evaluations"] = run.a_evaluations;
  j["wall_time_ms"] = wall_time_ms;
  j["resolvent_calls"] = run.resolvent_calls;
  j["final_step_change"] = run.final_step_change;
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::config_parse_error, "cannot open summary output: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace bfrb
