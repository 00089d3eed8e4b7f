#include "bfrb/problems.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bfrb/config.hpp"
#include "bfrb/trace_io.hpp"

namespace bfrb {

namespace {

// Block-skew matrix: consecutive coordinate pairs rotate with strength s;
// an odd trailing coordinate is left untouched.
Mat block_skew(std::size_t d, double s) {
  Mat m(d, d);
  for (std::size_t i = 0; i + 1 < d; i += 2) {
    m(i, i + 1) = s;
    m(i + 1, i) = -s;
  }
  return m;
}

Vec interior_pattern(std::size_t d) {
  Vec z(d);
  for (std::size_t i = 0; i < d; ++i) z[i] = (i % 2 == 0) ? 0.3 : -0.2;
  return z;
}

}  // namespace

ProblemInstance make_skew_box_vi(std::size_t d, double box_radius) {
  if (d == 0 || d % 2 != 0) fail(Errc::invalid_spec, "skew-box instance needs even dimension");
  if (!(box_radius > 0.0)) fail(Errc::invalid_spec, "box radius must be positive");
  const Mat s = block_skew(d, 1.0);
  ProblemInstance p{
      ForwardOperator::linear_with_constants(s, zeros(d), 1.0, 0.0),
      ResolventOracle::normal_cone_box(Vec(d, -box_radius), Vec(d, box_radius)),
      LegendreGeometry::euclidean(d),
      Vec(d, box_radius / 2.0),
      Vec(d, box_radius / 2.0),
      zeros(d),
      "skew_box_" + std::to_string(d)};
  return p;
}

ProblemInstance make_strongly_monotone_instance(std::size_t d, double tau, StrongVariant variant) {
  if (!(tau > 0.0)) fail(Errc::tau_nonpositive, "strongly monotone instance needs tau > 0");
  if (d == 0) fail(Errc::invalid_spec, "dimension must be positive");

  const Mat skew = block_skew(d, 0.5);

  if (variant == StrongVariant::strong_b) {
    // monotone A (pure skew), strongly monotone B: c (x - z0)
    const Vec z0 = interior_pattern(d);
    Mat sys = skew;
    for (std::size_t i = 0; i < d; ++i) sys(i, i) += tau;
    const Vec z_star = lu_solve(sys, scaled(z0, tau));
    ProblemInstance p{ForwardOperator::linear_with_constants(skew, zeros(d), 0.5, 0.0),
                      ResolventOracle::scaled_identity(d, tau, z0),
                      LegendreGeometry::euclidean(d),
                      Vec(d, 0.5),
                      Vec(d, 0.5),
                      z_star,
                      "strong_b_" + std::to_string(d)};
    return p;
  }

  Mat a0 = skew;
  for (std::size_t i = 0; i < d; ++i) a0(i, i) += tau;
  // exact constants: a0^T a0 = (tau^2 + 0.25) I on rotation pairs
  const double lip = std::sqrt(tau * tau + 0.25);

  Vec z_star, b(d, 0.0);
  if (variant == StrongVariant::interior) {
    z_star = interior_pattern(d);
    const Vec az = a0.apply(z_star);
    for (std::size_t i = 0; i < d; ++i) b[i] = -az[i];
  } else {
    // zero pinned to the upper face of the first coordinate
    z_star = interior_pattern(d);
    z_star[0] = 1.0;
    Vec target(d, 0.0);
    target[0] = -0.7;  // inward force keeps the face active
    const Vec az = a0.apply(z_star);
    for (std::size_t i = 0; i < d; ++i) b[i] = target[i] - az[i];
  }

  ProblemInstance p{ForwardOperator::linear_with_constants(a0, std::move(b), lip, tau),
                    ResolventOracle::normal_cone_box(Vec(d, -1.0), Vec(d, 1.0)),
                    LegendreGeometry::euclidean(d),
                    Vec(d, 0.5),
                    Vec(d, 0.5),
                    z_star,
                    (variant == StrongVariant::interior ? "strong_interior_" : "strong_boundary_") +
                        std::to_string(d)};
  return p;
}

GasMarketSpec GasMarketSpec::uniform(std::size_t firms, std::size_t periods, double alpha,
                                     double beta, double cost, double capacity,
                                     bool budget_coupling) {
  GasMarketSpec s;
  s.firms = firms;
  s.periods = periods;
  s.alpha = alpha;
  s.beta = beta;
  s.cost = Vec(firms, cost);
  s.capacity = Vec(firms, capacity);
  s.budget_coupling = budget_coupling;
  return s;
}

double cournot_symmetric_output(const GasMarketSpec& spec) {
  return (spec.beta - spec.cost.at(0)) / (spec.alpha * static_cast<double>(spec.firms + 1));
}

ProblemInstance make_gas_market(const GasMarketSpec& spec) {
  if (spec.firms < 1 || spec.periods < 1) fail(Errc::invalid_spec, "gas market needs firms >= 1, periods >= 1");
  if (!(spec.alpha > 0.0) || !(spec.beta > 0.0))
    fail(Errc::invalid_spec, "gas market needs positive demand coefficients");
  if (spec.cost.size() != spec.firms || spec.capacity.size() != spec.firms)
    fail(Errc::invalid_spec, "gas market cost/capacity must be per firm");
  for (double c : spec.cost)
    if (c < 0.0) fail(Errc::invalid_spec, "injection costs must be nonnegative");
  for (double q : spec.capacity)
    if (!(q > 0.0)) fail(Errc::invalid_spec, "injection capacities must be positive");

  GasFeasibleData gd;
  gd.firms = spec.firms;
  gd.periods = spec.periods;
  gd.cost = spec.cost;
  gd.capacity = spec.capacity;
  gd.coupling = spec.budget_coupling;
  const std::size_t d = gd.dimension();

  // Sales block per period: alpha * (ones + identity) across firms; the
  // inverse-demand intercept enters as the affine offset on sales.
  Mat m(d, d);
  Vec offset(d, 0.0);
  for (std::size_t t = 0; t < spec.periods; ++t)
    for (std::size_t i = 0; i < spec.firms; ++i) {
      const std::size_t oi = gd.out_index(i, t);
      offset[oi] = -spec.beta;
      for (std::size_t j = 0; j < spec.firms; ++j)
        m(oi, gd.out_index(j, t)) = spec.alpha * (i == j ? 2.0 : 1.0);
    }
  const double lip = spec.alpha * static_cast<double>(spec.firms + 1);

  ProblemInstance p{ForwardOperator::linear_with_constants(m, std::move(offset), lip, 0.0),
                    ResolventOracle::gas_feasible(gd),
                    LegendreGeometry::euclidean(d),
                    ones(d),
                    ones(d),
                    std::nullopt,
                    "cournot_m" + std::to_string(spec.firms) + "_k" + std::to_string(spec.periods)};
  p.reference_solution = oracle_solve(p, 1e-10);
  return p;
}

/* ------------------------------------------------------------------ */
/*  Shipped registry                                                   */
/* ------------------------------------------------------------------ */

namespace {

ProblemInstance make_rps_simplex() {
  Mat m(3, 3);
  m(0, 1) = 1.0;
  m(0, 2) = -1.0;
  m(1, 0) = -1.0;
  m(1, 2) = 1.0;
  m(2, 0) = 1.0;
  m(2, 1) = -1.0;
  ProblemInstance p{ForwardOperator::linear_with_constants(m, zeros(3), std::sqrt(3.0), 0.0),
                    ResolventOracle::normal_cone_simplex(3),
                    LegendreGeometry::euclidean(3),
                    Vec{0.5, 0.3, 0.2},
                    Vec{0.5, 0.3, 0.2},
                    Vec{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                    "rps_simplex"};
  return p;
}

ProblemInstance make_halving() {
  ProblemInstance p{ForwardOperator::zero(1),
                    ResolventOracle::scaled_identity(1, 1.0),
                    LegendreGeometry::euclidean(1),
                    Vec{8.0},
                    Vec{8.0},
                    Vec{0.0},
                    "halving_1"};
  return p;
}

GasMarketSpec default_market(std::size_t firms, std::size_t periods) {
  return GasMarketSpec::uniform(firms, periods, 0.5, 10.0, 1.0, 20.0, true);
}

}  // namespace

const std::vector<ShippedProblem>& shipped_problems() {
  static const std::vector<ShippedProblem> reg = {
      {"skew_box_2", "rotation field over [-1,1]^2, zero at the origin",
       [] { return make_skew_box_vi(2, 1.0); }},
      {"skew_box_10", "rotation field over [-1,1]^10, zero at the origin",
       [] { return make_skew_box_vi(10, 1.0); }},
      {"strong_interior_2", "strongly monotone affine field, zero inside the box",
       [] { return make_strongly_monotone_instance(2, 1.0, StrongVariant::interior); }},
      {"strong_boundary_2", "strongly monotone affine field, zero pinned to a box face",
       [] { return make_strongly_monotone_instance(2, 1.0, StrongVariant::boundary); }},
      {"strong_b_2", "skew field with strongly monotone B (shifted scaled identity)",
       [] { return make_strongly_monotone_instance(2, 1.0, StrongVariant::strong_b); }},
      {"rps_simplex", "cyclic matrix game over the probability simplex",
       [] { return make_rps_simplex(); }},
      {"halving_1", "zero forward operator with B x = x; proximal-point demo",
       [] { return make_halving(); }},
      {"cournot_m1_k1", "monopoly gas market, one period",
       [] { return make_gas_market(default_market(1, 1)); }},
      {"cournot_m2_k1", "two-firm gas market, one period",
       [] { return make_gas_market(default_market(2, 1)); }},
      {"cournot_m4_k1", "four-firm gas market, one period",
       [] { return make_gas_market(default_market(4, 1)); }},
      {"cournot_m1_k4", "monopoly gas market, four periods",
       [] { return make_gas_market(default_market(1, 4)); }},
      {"cournot_m2_k4", "two-firm gas market, four periods",
       [] { return make_gas_market(default_market(2, 4)); }},
      {"cournot_m4_k4", "four-firm gas market, four periods",
       [] { return make_gas_market(default_market(4, 4)); }},
  };
  return reg;
}

ProblemInstance build_shipped(const std::string& name) {
  for (const auto& sp : shipped_problems())
    if (sp.name == name) return sp.build();
  fail(Errc::config_parse_error, "unknown shipped problem '" + name + "'");
}

/* ------------------------------------------------------------------ */
/*  Problem files                                                      */
/* ------------------------------------------------------------------ */

namespace {

std::string vec_text(const Vec& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s + "]";
}

std::string mat_text(const Mat& m) {
  std::string s = "[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (i) s += ", ";
    s += "[";
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) s += ", ";
      s += format_double(m(i, j));
    }
    s += "]";
  }
  return s + "]";
}

ForwardOperator parse_forward(const std::string& text) {
  auto f = parse_struct(text, "A");
  const std::string type = strip_quotes(f.at("type"));
  if (type == "zero") {
    if (!f.count("dimension")) fail(Errc::config_parse_error, "A: zero operator needs dimension");
    return ForwardOperator::zero(static_cast<std::size_t>(parse_long(f.at("dimension"), "A.dimension")));
  }
  if (type == "linear") {
    Mat m = parse_matrix(f.at("matrix"), "A.matrix");
    Vec off = f.count("offset") ? parse_vector(f.at("offset"), "A.offset") : zeros(m.rows());
    if (f.count("lipschitz")) {
      const double lip = parse_double(f.at("lipschitz"), "A.lipschitz");
      const double tau = f.count("tau") ? parse_double(f.at("tau"), "A.tau") : 0.0;
      return ForwardOperator::linear_with_constants(m, std::move(off), lip, tau);
    }
    return ForwardOperator::linear(m, std::move(off));
  }
  fail(Errc::config_parse_error, "A: unknown operator type '" + type + "'");
}

ResolventOracle parse_resolvent(const std::string& text) {
  auto f = parse_struct(text, "B");
  const std::string type = strip_quotes(f.at("type"));
  if (type == "box")
    return ResolventOracle::normal_cone_box(parse_vector(f.at("lower"), "B.lower"),
                                            parse_vector(f.at("upper"), "B.upper"));
  if (type == "simplex")
    return ResolventOracle::normal_cone_simplex(
        static_cast<std::size_t>(parse_long(f.at("dimension"), "B.dimension")));
  if (type == "scaled_identity") {
    const double c = parse_double(f.at("c"), "B.c");
    Vec shift = f.count("shift") ? parse_vector(f.at("shift"), "B.shift") : Vec{};
    const std::size_t d = f.count("dimension")
                              ? static_cast<std::size_t>(parse_long(f.at("dimension"), "B.dimension"))
                              : shift.size();
    if (d == 0) fail(Errc::config_parse_error, "B: scaled_identity needs dimension or shift");
    return ResolventOracle::scaled_identity(d, c, std::move(shift));
  }
  if (type == "gas") {
    GasFeasibleData gd;
    gd.firms = static_cast<std::size_t>(parse_long(f.at("firms"), "B.firms"));
    gd.periods = static_cast<std::size_t>(parse_long(f.at("periods"), "B.periods"));
    gd.cost = parse_vector(f.at("cost"), "B.cost");
    gd.capacity = parse_vector(f.at("capacity"), "B.capacity");
    gd.coupling = f.count("coupling") ? parse_bool(f.at("coupling"), "B.coupling") : false;
    return ResolventOracle::gas_feasible(std::move(gd));
  }
  fail(Errc::config_parse_error, "B: unknown operator type '" + type + "'");
}

}  // namespace

ProblemInstance load_problem_file(const std::string& path) {
  const ConfigFile f = ConfigFile::parse_file(path);
  const std::string section = "";
  if (!f.has(section, "A") || !f.has(section, "B"))
    fail(Errc::config_parse_error, "problem file must declare A and B: " + path);
  ForwardOperator a = parse_forward(f.get_string(section, "A"));
  ResolventOracle b = parse_resolvent(f.get_string(section, "B"));
  if (a.dimension() != b.dimension())
    fail(Errc::config_parse_error, "problem file: A and B dimensions disagree");
  const std::size_t d = a.dimension();
  Vec v1 = f.has(section, "v1") ? f.get_vector(section, "v1") : zeros(d);
  Vec v0 = f.has(section, "v0") ? f.get_vector(section, "v0") : v1;
  ProblemInstance p{std::move(a),
                    std::move(b),
                    LegendreGeometry::euclidean(d),
                    std::move(v0),
                    std::move(v1),
                    std::nullopt,
                    f.get_string_or(section, "label", path)};
  if (f.has(section, "reference")) p.reference_solution = f.get_vector(section, "reference");
  if (p.v0.size() != d || p.v1.size() != d)
    fail(Errc::config_parse_error, "problem file: start point dimension mismatch");
  return p;
}

std::string serialize_problem(const ProblemInstance& p) {
  std::ostringstream os;
  os << "# problem instance\n";
  os << "label = " << p.label << "\n";
  os << "dimension = " << p.g.dimension() << "\n";
  if (p.A.is_zero()) {
    os << "A = {type=\"zero\", dimension=" << p.A.dimension() << "}\n";
  } else if (p.A.matrix()) {
    os << "A = {type=\"linear\", matrix=" << mat_text(*p.A.matrix())
       << ", offset=" << vec_text(*p.A.offset());
    if (p.A.lipschitz()) os << ", lipschitz=" << format_double(*p.A.lipschitz());
    if (p.A.strong_monotonicity()) os << ", tau=" << format_double(*p.A.strong_monotonicity());
    os << "}\n";
  } else {
    fail(Errc::invalid_spec, "cannot serialize a custom forward operator");
  }
  switch (p.B.kind()) {
    case ResolventOracle::Kind::box:
      os << "B = {type=\"box\", lower=" << vec_text(p.B.lower())
         << ", upper=" << vec_text(p.B.upper()) << "}\n";
      break;
    case ResolventOracle::Kind::simplex:
      os << "B = {type=\"simplex\", dimension=" << p.B.dimension() << "}\n";
      break;
    case ResolventOracle::Kind::scaled_identity:
      os << "B = {type=\"scaled_identity\", c=" << format_double(p.B.scale())
         << ", shift=" << vec_text(p.B.shift()) << "}\n";
      break;
    case ResolventOracle::Kind::gas_feasible: {
      const auto& gd = p.B.gas();
      os << "B = {type=\"gas\", firms=" << gd.firms << ", periods=" << gd.periods
         << ", cost=" << vec_text(gd.cost) << ", capacity=" << vec_text(gd.capacity)
         << ", coupling=" << (gd.coupling ? "true" : "false") << "}\n";
      break;
    }
    case ResolventOracle::Kind::custom:
      fail(Errc::invalid_spec, "cannot serialize a custom resolvent oracle");
  }
  os << "v0 = " << vec_text(p.v0) << "\n";
  os << "v1 = " << vec_text(p.v1) << "\n";
  if (p.reference_solution) os << "reference = " << vec_text(*p.reference_solution) << "\n";
  return os.str();
}

}  // namespace bfrb
