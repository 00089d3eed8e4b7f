#pragma once
#include <map>
#include <string>
#include <vector>

#include "bfrb/solvers.hpp"

namespace bfrb {

/* Trace CSV files.
 *
 * Comment lines `# key = value` carry run metadata (problem reference,
 * geometry, method, parameters, totals) so a trace can be re-diagnosed
 * without the original config. Data header:
 *   n,residual,step_change,mu,a_evals[,v0,...,v{d-1}]
 * Iterate columns appear when the run recorded a full trace. Numbers are
 * written with "%.17g" so output is byte-reproducible.
 */

struct TraceMeta {
  std::map<std::string, std::string> entries;

  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double_or(const std::string& key, double fallback) const;
  bool has(const std::string& key) const { return entries.count(key) != 0; }
};

void write_trace_csv(const std::string& path, const SolverRun& run, const TraceMeta& meta);

struct TraceFile {
  TraceMeta meta;
  SolverRun run;  // reconstructed: iterates, mu_sequence, records, totals
};

TraceFile read_trace_csv(const std::string& path);

// Builds the metadata block for a run (problem reference + geometry + solver
// parameters + totals).
TraceMeta make_trace_meta(const std::string& problem_source, const std::string& geometry_desc,
                          const SolverRun& run);

void write_summary_json(const std::string& path, const SolverRun& run, double wall_time_ms);

std::string format_double(double v);  // %.17g

}  // namespace bfrb
