#include "bfrb/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bfrb {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Splits "a, b, [c, d], {e=f}" at top-level commas.
std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '[' || ch == '{' || ch == '(') ++depth;
    if (ch == ']' || ch == '}' || ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

std::string expect_bracketed(const std::string& text, char open, char close,
                             const std::string& what) {
  const std::string t = trim(text);
  if (t.size() < 2 || t.front() != open || t.back() != close)
    fail(Errc::config_parse_error, what + ": expected " + open + "..." + close + ", got '" + t + "'");
  return t.substr(1, t.size() - 2);
}

}  // namespace

std::string strip_quotes(const std::string& text) {
  const std::string t = trim(text);
  if (t.size() >= 2 && ((t.front() == '"' && t.back() == '"') || (t.front() == '\'' && t.back() == '\'')))
    return t.substr(1, t.size() - 2);
  return t;
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end == t.c_str() || *end != '\0')
    fail(Errc::config_parse_error, what + ": not a number: '" + t + "'");
  return v;
}

long parse_long(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (end == t.c_str() || *end != '\0')
    fail(Errc::config_parse_error, what + ": not an integer: '" + t + "'");
  return v;
}

bool parse_bool(const std::string& text, const std::string& what) {
  const std::string t = strip_quotes(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  fail(Errc::config_parse_error, what + ": not a boolean: '" + t + "'");
}

Vec parse_vector(const std::string& text, const std::string& what) {
  const std::string inner = expect_bracketed(text, '[', ']', what);
  Vec v;
  if (trim(inner).empty()) return v;
  for (const auto& part : split_top_level(inner)) v.push_back(parse_double(part, what));
  return v;
}

Mat parse_matrix(const std::string& text, const std::string& what) {
  const std::string inner = expect_bracketed(text, '[', ']', what);
  const auto rows = split_top_level(inner);
  if (rows.empty()) fail(Errc::config_parse_error, what + ": empty matrix");
  std::vector<Vec> data;
  for (const auto& r : rows) data.push_back(parse_vector(r, what));
  const std::size_t cols = data[0].size();
  Mat m(data.size(), cols);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data[i].size() != cols) fail(Errc::config_parse_error, what + ": ragged matrix rows");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = data[i][j];
  }
  return m;
}

std::map<std::string, std::string> parse_struct(const std::string& text, const std::string& what) {
  const std::string inner = expect_bracketed(text, '{', '}', what);
  std::map<std::string, std::string> fields;
  for (const auto& part : split_top_level(inner)) {
    const auto eq = part.find('=');
    if (eq == std::string::npos)
      fail(Errc::config_parse_error, what + ": struct field without '=': '" + part + "'");
    fields[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
  }
  return fields;
}

/* ------------------------------------------------------------------ */
/*  ConfigFile                                                         */
/* ------------------------------------------------------------------ */

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::config_parse_error, "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
  ConfigFile f;
  f.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        fail(Errc::config_parse_error,
             origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      f.sections_[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(Errc::config_parse_error,
           origin + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty())
      fail(Errc::config_parse_error, origin + ":" + std::to_string(lineno) + ": empty key");
    f.sections_[section][key] = trim(t.substr(eq + 1));
  }
  return f;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) != 0;
}

const std::string& ConfigFile::raw(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end() || !s->second.count(key))
    fail(Errc::config_parse_error,
         origin_ + ": missing key '" + key + "' in section [" + section + "]");
  return s->second.at(key);
}

std::string ConfigFile::get_string(const std::string& section, const std::string& key) const {
  return strip_quotes(raw(section, key));
}

std::string ConfigFile::get_string_or(const std::string& section, const std::string& key,
                                      const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
  return parse_double(raw(section, key), "[" + section + "]." + key);
}

double ConfigFile::get_double_or(const std::string& section, const std::string& key,
                                 double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

long ConfigFile::get_long_or(const std::string& section, const std::string& key,
                             long fallback) const {
  return has(section, key) ? parse_long(raw(section, key), "[" + section + "]." + key) : fallback;
}

bool ConfigFile::get_bool_or(const std::string& section, const std::string& key,
                             bool fallback) const {
  return has(section, key) ? parse_bool(raw(section, key), "[" + section + "]." + key) : fallback;
}

Vec ConfigFile::get_vector(const std::string& section, const std::string& key) const {
  return parse_vector(raw(section, key), "[" + section + "]." + key);
}

const std::map<std::string, std::string>& ConfigFile::section(const std::string& name) const {
  static const std::map<std::string, std::string> empty;
  const auto s = sections_.find(name);
  return s == sections_.end() ? empty : s->second;
}

std::vector<std::string> ConfigFile::section_names() const {
  std::vector<std::string> names;
  for (const auto& [k, v] : sections_) names.push_back(k);
  return names;
}

/* ------------------------------------------------------------------ */
/*  Run configuration                                                  */
/* ------------------------------------------------------------------ */

DSchedule parse_d_schedule(const std::string& text) {
  const std::string t = strip_quotes(text);
  if (t == "zero" || t == "0") return DSchedule::zero();
  if (t.rfind("geometric", 0) == 0) {
    const auto open = t.find('(');
    if (open == std::string::npos || t.back() != ')')
      fail(Errc::config_parse_error, "d_schedule: expected geometric(ratio, scale)");
    const auto parts = split_top_level(t.substr(open + 1, t.size() - open - 2));
    if (parts.size() != 2)
      fail(Errc::config_parse_error, "d_schedule: geometric takes (ratio, scale)");
    return DSchedule::geometric(parse_double(parts[0], "d_schedule.ratio"),
                                parse_double(parts[1], "d_schedule.scale"));
  }
  if (!t.empty() && t.front() == '[')
    return DSchedule::explicit_list(parse_vector(t, "d_schedule"));
  fail(Errc::config_parse_error, "d_schedule: expected zero, geometric(r, s) or [.. values ..]");
}

std::string format_d_schedule(const DSchedule& d) {
  switch (d.kind) {
    case DSchedule::Kind::constant_zero:
      return "zero";
    case DSchedule::Kind::geometric: {
      std::ostringstream os;
      os << "geometric(" << d.ratio << ", " << d.scale << ")";
      return os.str();
    }
    case DSchedule::Kind::explicit_list: {
      std::ostringstream os;
      os << "[";
      for (std::size_t i = 0; i < d.values.size(); ++i) {
        if (i) os << ", ";
        os << d.values[i];
      }
      os << "]";
      return os.str();
    }
  }
  return "zero";
}

GeometryConfig parse_geometry_section(const ConfigFile& f) {
  GeometryConfig g;
  g.kind = f.get_string_or("geometry", "geometry", "euclidean");
  if (g.kind != "euclidean" && g.kind != "weighted" && g.kind != "entropy")
    fail(Errc::config_parse_error, "[geometry].geometry must be euclidean, weighted or entropy");
  if (f.has("geometry", "weights")) g.weights = f.get_vector("geometry", "weights");
  if (f.has("geometry", "entropy_gamma"))
    g.entropy_gamma = f.get_double("geometry", "entropy_gamma");
  return g;
}

LegendreGeometry GeometryConfig::build(std::size_t dimension) const {
  if (kind == "euclidean") return LegendreGeometry::euclidean(dimension);
  if (kind == "weighted") {
    if (weights.size() != dimension)
      fail(Errc::config_parse_error, "[geometry].weights must match the problem dimension");
    return LegendreGeometry::weighted_quadratic(weights);
  }
  if (!entropy_gamma)
    fail(Errc::config_parse_error,
         "[geometry].entropy_gamma is required for the entropy geometry");
  return LegendreGeometry::shannon_entropy(dimension, *entropy_gamma);
}

SolverConfig parse_solver_section(const ConfigFile& f) {
  SolverConfig s;
  s.method = method_from_name(f.get_string_or("solver", "method", "frb"));
  s.mu_set = f.has("solver", "mu");
  s.mu = f.get_double_or("solver", "mu", 0.0);
  s.alpha = f.get_double_or("solver", "alpha", 0.0);
  s.delta = f.get_double_or("solver", "delta", 0.1);
  s.mu0 = f.get_double_or("solver", "mu0", 1.0);
  s.mu1 = f.get_double_or("solver", "mu1", 1.0);
  if (f.has("solver", "d_schedule"))
    s.d_schedule = parse_d_schedule(f.get_string("solver", "d_schedule"));
  s.max_iters = f.get_long_or("solver", "max_iters", 100000);
  s.tol = f.get_double_or("solver", "tol", 1e-8);
  s.record_trace = f.get_bool_or("solver", "record_trace", false);
  const std::string stop = f.get_string_or("solver", "stop", "step");
  if (stop == "step")
    s.stop = StopRule::step_change;
  else if (stop == "residual")
    s.stop = StopRule::residual;
  else
    fail(Errc::config_parse_error, "[solver].stop must be 'step' or 'residual'");
  return s;
}

RunConfig RunConfig::load(const std::string& path) {
  const ConfigFile f = ConfigFile::parse_file(path);
  RunConfig rc;
  if (!f.has("problem", "source"))
    fail(Errc::config_parse_error, path + ": missing key 'source' in section [problem]");
  rc.problem_source = f.get_string("problem", "source");
  rc.geometry = parse_geometry_section(f);
  rc.solver = parse_solver_section(f);
  if (f.has("compare", "methods")) {
    std::istringstream ms(f.get_string("compare", "methods"));
    std::string tok;
    while (std::getline(ms, tok, ',')) {
      const std::string name = strip_quotes(trim(tok));
      if (!name.empty()) rc.compare_methods.push_back(method_from_name(name));
    }
  }
  rc.trace_path = f.get_string_or("output", "trace", "");
  rc.summary_path = f.get_string_or("output", "summary", "");
  rc.table_path = f.get_string_or("output", "table", "");
  rc.seed = f.get_long_or("output", "seed", f.get_long_or("problem", "seed", 0));
  return rc;
}

}  // namespace bfrb
