#pragma once
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bfrb/linalg.hpp"
#include "bfrb/solvers.hpp"
#include "bfrb/vec.hpp"

namespace bfrb {

/* Flat sectioned key-value configuration files.
 *
 *   [solver]
 *   method = frb
 *   mu = 0.4
 *
 * Values are decimal scalars, booleans, quoted or bare strings, vectors
 * `[a, b]`, matrices `[[a, b], [c, d]]`, or structs `{k = v, ...}`. Parse
 * errors name the offending key.
 */

class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key, double fallback) const;
  long get_long_or(const std::string& section, const std::string& key, long fallback) const;
  bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;
  Vec get_vector(const std::string& section, const std::string& key) const;

  const std::map<std::string, std::string>& section(const std::string& name) const;
  std::vector<std::string> section_names() const;

 private:
  std::string origin_;
  std::map<std::string, std::map<std::string, std::string>> sections_;
  const std::string& raw(const std::string& section, const std::string& key) const;
};

// Free-standing structured-value parsers (also used by problem files).
double parse_double(const std::string& text, const std::string& what);
long parse_long(const std::string& text, const std::string& what);
bool parse_bool(const std::string& text, const std::string& what);
Vec parse_vector(const std::string& text, const std::string& what);
Mat parse_matrix(const std::string& text, const std::string& what);
std::map<std::string, std::string> parse_struct(const std::string& text, const std::string& what);
std::string strip_quotes(const std::string& text);

struct GeometryConfig {
  std::string kind = "euclidean";  // euclidean | weighted | entropy
  Vec weights;
  std::optional<double> entropy_gamma;

  LegendreGeometry build(std::size_t dimension) const;
};

struct SolverConfig {
  Method method = Method::frb_constant;
  double mu = 0.0;
  bool mu_set = false;
  double alpha = 0.0;
  double delta = 0.1;
  double mu0 = 1.0, mu1 = 1.0;
  DSchedule d_schedule;
  long max_iters = 100000;
  double tol = 1e-8;
  bool record_trace = false;
  StopRule stop = StopRule::step_change;
};

struct RunConfig {
  std::string problem_source;  // shipped name or problem-file path
  GeometryConfig geometry;
  SolverConfig solver;
  std::vector<Method> compare_methods;
  std::string trace_path;
  std::string summary_path;
  std::string table_path;  // compare output
  long seed = 0;

  static RunConfig load(const std::string& path);
};

// Parses the [solver] section (shared by run and compare).
SolverConfig parse_solver_section(const ConfigFile& f);
GeometryConfig parse_geometry_section(const ConfigFile& f);
DSchedule parse_d_schedule(const std::string& text);
std::string format_d_schedule(const DSchedule& d);

}  // namespace bfrb
