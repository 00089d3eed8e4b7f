#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bfrb/diagnostics.hpp"
#include "bfrb/problems.hpp"

/* Acceptance suite: one pass/fail line per criterion. */

namespace {

using namespace bfrb;

std::mt19937 rng(20240817u);

double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec random_vec(std::size_t d, double lo, double hi) {
  Vec v(d);
  for (auto& x : v) x = uniform(lo, hi);
  return v;
}

Vec random_simplex_interior(std::size_t d) {
  Vec v(d);
  double s = 0.0;
  for (auto& x : v) {
    x = uniform(0.05, 1.0);
    s += x;
  }
  for (auto& x : v) x /= s;
  return v;
}

struct Tally {
  int failures = 0;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      ++failures;
      detail << "    failed: " << what << "\n";
    }
  }
};

struct InstanceSet {
  std::vector<std::function<ProblemInstance()>> builders;
  std::vector<std::string> names;

  void add(const std::string& name, std::function<ProblemInstance()> b) {
    names.push_back(name);
    builders.push_back(std::move(b));
  }
};

InstanceSet convergence_set() {
  InstanceSet s;
  s.add("skew_box_2", [] { return make_skew_box_vi(2, 1.0); });
  s.add("skew_box_10", [] { return make_skew_box_vi(10, 1.0); });
  s.add("strong_interior_2",
        [] { return make_strongly_monotone_instance(2, 1.0, StrongVariant::interior); });
  s.add("strong_boundary_2",
        [] { return make_strongly_monotone_instance(2, 1.0, StrongVariant::boundary); });
  s.add("strong_b_2",
        [] { return make_strongly_monotone_instance(2, 1.0, StrongVariant::strong_b); });
  for (std::size_t m : {std::size_t{1}, std::size_t{2}, std::size_t{4}})
    for (std::size_t k : {std::size_t{1}, std::size_t{4}})
      s.add("cournot_m" + std::to_string(m) + "_k" + std::to_string(k), [m, k] {
        return make_gas_market(GasMarketSpec::uniform(m, k, 0.5, 10.0, 1.0, 20.0, true));
      });
  return s;
}

ConstantStepConfig constant_cfg(const ProblemInstance& p, long max_iters, double tol,
                                bool trace) {
  ConstantStepConfig cfg;
  cfg.mu = 0.4 / p.A.lipschitz().value();
  cfg.delta = 0.1;
  cfg.max_iters = max_iters;
  cfg.tol = tol;
  cfg.record_trace = trace;
  return cfg;
}

AdaptiveStepConfig adaptive_cfg(long max_iters, double tol, bool trace) {
  AdaptiveStepConfig cfg;
  cfg.alpha = 0.39;
  cfg.mu0 = 1.0;
  cfg.mu1 = 1.0;
  cfg.d_schedule = DSchedule::geometric(0.5, 0.1);  // d_n = 0.1 * 2^-n
  cfg.delta = 0.1;
  cfg.max_iters = max_iters;
  cfg.tol = tol;
  cfg.record_trace = trace;
  return cfg;
}

/* criterion 1: geometry identities over random samples */
Tally criterion_geometry() {
  Tally t;
  struct GeomCase {
    LegendreGeometry g;
    std::function<Vec()> sample;
  };
  std::vector<GeomCase> cases;
  cases.push_back({LegendreGeometry::euclidean(6), [] { return random_vec(6, -5.0, 5.0); }});
  cases.push_back({LegendreGeometry::weighted_quadratic({2.0, 5.0, 1.0, 3.0, 0.5, 4.0}),
                   [] { return random_vec(6, -5.0, 5.0); }});
  cases.push_back(
      {LegendreGeometry::shannon_entropy(4, 1.0), [] { return random_simplex_interior(4); }});

  for (const auto& c : cases) {
    std::vector<std::pair<Vec, Vec>> pairs;
    double worst_rt = 0.0, worst_3p = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const Vec x = c.sample(), y = c.sample(), z = c.sample();
      const Vec back = c.g.gradient_conjugate(c.g.gradient(x));
      worst_rt = std::max(worst_rt, dist2(back, x) / (1.0 + norm2(x)));
      const double gap = three_point_gap(c.g, x, y, z);
      worst_3p = std::max(worst_3p, gap / (1.0 + std::fabs(c.g.distance(x, z))));
      pairs.emplace_back(x, y);
    }
    t.require(worst_rt <= 1e-10, c.g.name() + ": gradient round trip, worst rel err " +
                                     std::to_string(worst_rt));
    t.require(worst_3p <= 1e-9,
              c.g.name() + ": three-point identity, worst rel gap " + std::to_string(worst_3p));
    const auto rep = strong_convexity_certificate(c.g, pairs);
    t.require(rep.pass, c.g.name() + ": strong-convexity bound, min ratio " +
                            std::to_string(rep.min_ratio));
  }
  return t;
}

/* criterion 2: resolvent membership characterization */
Tally criterion_membership() {
  Tally t;
  struct Case {
    std::string name;
    ResolventOracle b;
    LegendreGeometry g;
    std::function<Vec()> sample;
  };
  const std::size_t d4 = 4;
  GasFeasibleData gd;
  gd.firms = 2;
  gd.periods = 2;
  gd.cost = {1.0, 0.5};
  gd.capacity = {2.0, 3.0};
  gd.coupling = true;
  GasFeasibleData gd_nc = gd;
  gd_nc.coupling = false;

  std::vector<Case> cases;
  cases.push_back({"box/euclidean", ResolventOracle::normal_cone_box(Vec(d4, -1.0), Vec(d4, 2.0)),
                   LegendreGeometry::euclidean(d4), [] { return random_vec(4, -4.0, 4.0); }});
  cases.push_back({"box/weighted", ResolventOracle::normal_cone_box(Vec(d4, -1.0), Vec(d4, 2.0)),
                   LegendreGeometry::weighted_quadratic({2.0, 1.0, 0.5, 3.0}),
                   [] { return random_vec(4, -4.0, 4.0); }});
  cases.push_back({"box/entropy",
                   ResolventOracle::normal_cone_box(Vec(d4, 0.2), Vec(d4, 2.5)),
                   LegendreGeometry::shannon_entropy(d4, 1.0),
                   [] { return random_vec(4, 0.01, 6.0); }});
  cases.push_back({"simplex/euclidean", ResolventOracle::normal_cone_simplex(d4),
                   LegendreGeometry::euclidean(d4), [] { return random_vec(4, -2.0, 2.0); }});
  cases.push_back({"simplex/entropy", ResolventOracle::normal_cone_simplex(d4),
                   LegendreGeometry::shannon_entropy(d4, 1.0),
                   [] { return random_vec(4, 0.05, 3.0); }});
  cases.push_back({"scaled_identity/euclidean",
                   ResolventOracle::scaled_identity(d4, 0.7, {0.3, -0.2, 0.1, 0.0}),
                   LegendreGeometry::euclidean(d4), [] { return random_vec(4, -4.0, 4.0); }});
  cases.push_back({"scaled_identity/weighted",
                   ResolventOracle::scaled_identity(d4, 0.7, {0.3, -0.2, 0.1, 0.0}),
                   LegendreGeometry::weighted_quadratic({2.0, 1.0, 0.5, 3.0}),
                   [] { return random_vec(4, -4.0, 4.0); }});
  cases.push_back({"gas/coupled", ResolventOracle::gas_feasible(gd),
                   LegendreGeometry::euclidean(8), [] { return random_vec(8, -3.0, 3.0); }});
  cases.push_back({"gas/uncoupled", ResolventOracle::gas_feasible(gd_nc),
                   LegendreGeometry::euclidean(8), [] { return random_vec(8, -3.0, 3.0); }});

  for (const auto& c : cases) {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const double mu = std::exp(uniform(std::log(0.1), std::log(10.0)));
      const Vec x = c.sample();
      const Vec y = c.b.resolve(c.g, mu, x);
      worst = std::max(worst, resolvent_membership_gap(c.b, c.g, mu, x, y));
    }
    t.require(worst <= 1e-9, c.name + ": worst membership gap " + std::to_string(worst));
  }
  return t;
}

struct RunArtifacts {
  std::vector<SolverRun> constant_runs, adaptive_runs, tseng_runs;
  std::vector<Vec> references;
  std::vector<std::string> names;
  std::vector<double> lipschitz;
};

/* criteria 3 + 6: convergence to the oracle solution and evaluation counts */
Tally criterion_convergence(RunArtifacts& art) {
  Tally t;
  const InstanceSet set = convergence_set();
  for (std::size_t i = 0; i < set.builders.size(); ++i) {
    ProblemInstance p = set.builders[i]();
    const Vec z = p.reference_solution ? *p.reference_solution : oracle_solve(p, 1e-10);
    art.references.push_back(z);
    art.names.push_back(set.names[i]);
    art.lipschitz.push_back(p.A.lipschitz().value());

    {
      ProblemInstance pc = set.builders[i]();
      const SolverRun run = solve_frb_constant(pc, constant_cfg(pc, 1000000, 1e-9, false));
      t.require(run.termination == Termination::converged,
                set.names[i] + ": constant run converged");
      t.require(dist2(run.final_iterate, z) <= 1e-5,
                set.names[i] + ": constant distance to oracle " +
                    std::to_string(dist2(run.final_iterate, z)));
      art.constant_runs.push_back(run);
    }
    {
      ProblemInstance pa = set.builders[i]();
      const SolverRun run = solve_frb_adaptive(pa, adaptive_cfg(1000000, 1e-9, false));
      t.require(run.termination == Termination::converged,
                set.names[i] + ": adaptive run converged");
      t.require(dist2(run.final_iterate, z) <= 1e-5,
                set.names[i] + ": adaptive distance to oracle " +
                    std::to_string(dist2(run.final_iterate, z)));
      art.adaptive_runs.push_back(run);
    }
    {
      ProblemInstance pt = set.builders[i]();
      const SolverRun run = solve_tseng_baseline(pt, constant_cfg(pt, 1000000, 1e-9, false));
      art.tseng_runs.push_back(run);
    }
  }
  return t;
}

Tally criterion_evaluation_counts(const RunArtifacts& art) {
  Tally t;
  for (std::size_t i = 0; i < art.constant_runs.size(); ++i) {
    const auto c = evaluation_report(art.constant_runs[i]);
    t.require(c.pass, art.names[i] + ": constant eval accounting (" + c.message + ")");
    const auto a = evaluation_report(art.adaptive_runs[i]);
    t.require(a.pass, art.names[i] + ": adaptive eval accounting (" + a.message + ")");
    const auto ts = evaluation_report(art.tseng_runs[i]);
    t.require(ts.pass, art.names[i] + ": tseng eval accounting (" + ts.message + ")");
  }
  return t;
}

/* criteria 4 + 5 + 7: trace-based certificates */
struct TraceArtifacts {
  std::vector<SolverRun> constant_traces, adaptive_traces;
  std::vector<std::string> names;
  std::vector<double> lipschitz;
};

Tally criterion_rate(const RunArtifacts& art, TraceArtifacts& traces) {
  Tally t;
  const InstanceSet set = convergence_set();
  for (std::size_t i = 0; i < set.builders.size(); ++i) {
    ProblemInstance p = set.builders[i]();
    const SolverRun run = solve_frb_constant(p, constant_cfg(p, 10000, 1e-300, true));
    const auto rep = rate_certificate(p, run, art.references[i]);
    t.require(rep.pass, set.names[i] + ": rate certificate (" + rep.message + ")");
    traces.constant_traces.push_back(run);
    traces.names.push_back(set.names[i]);
    traces.lipschitz.push_back(p.A.lipschitz().value());
  }
  return t;
}

Tally criterion_lyapunov(const RunArtifacts& art, TraceArtifacts& traces) {
  Tally t;
  const InstanceSet set = convergence_set();
  for (std::size_t i = 0; i < set.builders.size(); ++i) {
    {
      ProblemInstance p = set.builders[i]();
      const auto rep = check_lyapunov_descent(p, traces.constant_traces[i], art.references[i]);
      t.require(rep.pass && rep.start_index == 1,
                set.names[i] + ": constant-step descent (" + rep.message + ")");
    }
    {
      // same stopping rule as the convergence runs; past exact stationarity
      // the step quotients carry only rounding noise
      ProblemInstance p = set.builders[i]();
      const SolverRun run = solve_frb_adaptive(p, adaptive_cfg(1000000, 1e-9, true));
      const auto rep = check_lyapunov_descent(p, run, art.references[i]);
      t.require(rep.pass, set.names[i] + ": adaptive descent from n0=" +
                              std::to_string(rep.start_index) + ", first violation " +
                              std::to_string(rep.first_violation) + " (" + rep.message + ")");
      traces.adaptive_traces.push_back(run);
    }
  }
  return t;
}

Tally criterion_step_law(const TraceArtifacts& traces) {
  Tally t;
  for (std::size_t i = 0; i < traces.adaptive_traces.size(); ++i) {
    // Fresh runs stopped while step differences still dominate evaluation
    // rounding: past that point the quotient in the update rule reflects
    // floating-point noise rather than the operator, and the exact-arithmetic
    // bounds below lose meaning.
    const InstanceSet set = convergence_set();
    ProblemInstance p = set.builders[i]();
    const SolverRun run = solve_frb_adaptive(p, adaptive_cfg(1000000, 1e-4, true));
    const double lip = traces.lipschitz[i];
    const double lo = std::min(run.alpha / lip, 1.0) - 1e-12;  // min(alpha/L, mu1)
    const double hi = 1.0 + run.d_sum + 1e-12;                 // mu1 + sum d_n
    bool bounds = true;
    for (std::size_t n = 1; n < run.mu_sequence.size(); ++n)
      if (!(run.mu_sequence[n] >= lo && run.mu_sequence[n] <= hi)) bounds = false;
    t.require(bounds, traces.names[i] + ": step-size bounds");

    const std::size_t len = run.mu_sequence.size();
    const std::size_t tail = len - std::max<std::size_t>(1, len / 10);
    double drift = 0.0;
    for (std::size_t n = tail; n < len; ++n)
      drift = std::max(drift, std::fabs(run.mu_sequence[n] - run.mu_sequence[len - 1]));
    t.require(drift <= 1e-10,
              traces.names[i] + ": step size eventually constant, tail drift " +
                  std::to_string(drift));
  }
  return t;
}

/* criterion 8: specialization collapses */
Tally criterion_collapse() {
  Tally t;

  auto identical = [](const std::vector<Vec>& a, const std::vector<Vec>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return false;
    return true;
  };

  {  // A = 0: the constant-step method is the proximal point method
    ProblemInstance p1{ForwardOperator::zero(2),
                       ResolventOracle::scaled_identity(2, 1.0, {3.0, -1.0}),
                       LegendreGeometry::euclidean(2),
                       {8.0, 8.0},
                       {8.0, 8.0},
                       std::nullopt,
                       "collapse_a0"};
    ProblemInstance p2 = p1;
    ConstantStepConfig cf;
    cf.mu = 1.0;
    cf.delta = 0.1;
    cf.max_iters = 60;
    cf.tol = 1e-300;
    cf.record_trace = true;
    const SolverRun frb = solve_frb_constant(p1, cf);
    ProximalPointConfig pf;
    pf.mu = 1.0;
    pf.max_iters = 60;
    pf.tol = 1e-300;
    pf.record_trace = true;
    const SolverRun ppa = solve_proximal_point(p2, pf);
    t.require(identical(frb.iterates, ppa.iterates),
              "A=0 collapse: frb and ppa iterates bit-identical (euclidean)");
  }
  {  // same collapse under the entropy geometry
    ProblemInstance p1{ForwardOperator::zero(3),
                       ResolventOracle::normal_cone_simplex(3),
                       LegendreGeometry::shannon_entropy(3, 1.0),
                       {0.5, 0.3, 0.2},
                       {0.5, 0.3, 0.2},
                       std::nullopt,
                       "collapse_entropy"};
    ProblemInstance p2 = p1;
    ConstantStepConfig cf;
    cf.mu = 0.7;
    cf.delta = 0.1;
    cf.max_iters = 40;
    cf.tol = 1e-300;
    cf.record_trace = true;
    const SolverRun frb = solve_frb_constant(p1, cf);
    ProximalPointConfig pf;
    pf.mu = 0.7;
    pf.max_iters = 40;
    pf.tol = 1e-300;
    pf.record_trace = true;
    const SolverRun ppa = solve_proximal_point(p2, pf);
    t.require(identical(frb.iterates, ppa.iterates),
              "A=0 collapse: frb and ppa iterates bit-identical (entropy)");
  }
  {  // B = N_C: the projected method is the resolvent method
    for (const std::string name : {"skew_box_2", "rps_simplex"}) {
      ProblemInstance p1 = build_shipped(name);
      ProblemInstance p2 = build_shipped(name);
      const ConstantStepConfig cf = constant_cfg(p1, 300, 1e-300, true);
      const SolverRun a = solve_frb_constant(p1, cf);
      const SolverRun b = solve_projected_constant(p2, cf);
      t.require(identical(a.iterates, b.iterates), name + ": projected collapse bit-identical");
    }
  }
  return t;
}

/* criterion 9: strong monotonicity regime */
Tally criterion_strong() {
  Tally t;
  const std::vector<StrongVariant> variants = {StrongVariant::interior, StrongVariant::boundary,
                                               StrongVariant::strong_b};
  const std::vector<std::string> names = {"strong_interior_2", "strong_boundary_2", "strong_b_2"};
  for (std::size_t i = 0; i < variants.size(); ++i) {
    ProblemInstance base = make_strongly_monotone_instance(2, 1.0, variants[i]);
    const Vec z = *base.reference_solution;
    {
      ProblemInstance p = make_strongly_monotone_instance(2, 1.0, variants[i]);
      const SolverRun run = solve_frb_constant(p, constant_cfg(p, 100000, 1e-12, false));
      t.require(dist2(run.final_iterate, z) <= 1e-8,
                names[i] + ": constant strong-convergence distance " +
                    std::to_string(dist2(run.final_iterate, z)));
    }
    {
      ProblemInstance p = make_strongly_monotone_instance(2, 1.0, variants[i]);
      const SolverRun run = solve_frb_adaptive(p, adaptive_cfg(100000, 1e-12, false));
      t.require(dist2(run.final_iterate, z) <= 1e-8,
                names[i] + ": adaptive strong-convergence distance " +
                    std::to_string(dist2(run.final_iterate, z)));
    }
  }
  return t;
}

/* criterion 10: symmetric Cournot closed form, validated through the oracle */
Tally criterion_cournot() {
  Tally t;
  for (std::size_t m : {std::size_t{1}, std::size_t{2}, std::size_t{4}})
    for (std::size_t k : {std::size_t{1}, std::size_t{4}}) {
      const GasMarketSpec spec = GasMarketSpec::uniform(m, k, 0.5, 10.0, 1.0, 20.0, true);
      ProblemInstance p = make_gas_market(spec);  // reference attached by the oracle
      const double expected = cournot_symmetric_output(spec);
      const auto& gd = p.B.gas();
      double worst = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t tt = 0; tt < k; ++tt)
          worst = std::max(
              worst, std::fabs((*p.reference_solution)[gd.out_index(i, tt)] - expected));
      t.require(worst <= 1e-6, p.label + ": oracle sales vs closed form, worst gap " +
                                   std::to_string(worst));
    }
  return t;
}

/* criterion 11: negative control */
Tally criterion_negative_control() {
  Tally t;
  const auto rep = validate_constant_step(0.2, 0.45, 10.0, 1.0);
  t.require(!rep.pass && rep.empty_interval && rep.violated == "EMPTY_INTERVAL",
            "validation flags the empty interval");
  ProblemInstance p = make_skew_box_vi(2, 1.0);
  // same control triple with the declared constant forced to L = 10
  ProblemInstance p10{
      ForwardOperator::linear_with_constants(*p.A.matrix(), *p.A.offset(), 10.0, 0.0),
      p.B, p.g, p.v0, p.v1, p.reference_solution, p.label};
  ConstantStepConfig cfg;
  cfg.mu = 0.2;
  cfg.delta = 0.45;
  cfg.max_iters = 10;
  cfg.tol = 1e-8;
  bool threw = false;
  try {
    solve_frb_constant(p10, cfg);
  } catch (const Error& e) {
    threw = e.code() == Errc::empty_interval;
  }
  t.require(threw, "solver refuses to run on an empty admissible interval");
  return t;
}

int run_criterion(int id, const std::string& name, const std::function<Tally()>& fn,
                  double* seconds_out = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  Tally t;
  try {
    t = fn();
  } catch (const std::exception& e) {
    t.failures++;
    t.detail << "    exception: " << e.what() << "\n";
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (seconds_out) *seconds_out = secs;
  std::printf("criterion %2d [%s] %s (%.2f s)\n", id, t.failures == 0 ? "PASS" : "FAIL",
              name.c_str(), secs);
  if (t.failures) std::fputs(t.detail.str().c_str(), stdout);
  return t.failures;
}

}  // namespace

int main() {
  int failures = 0;
  RunArtifacts art;
  TraceArtifacts traces;

  double geom_secs = 0.0, memb_secs = 0.0;
  failures += run_criterion(1, "geometry identities (round trip, three-point, modulus)",
                            criterion_geometry, &geom_secs);
  failures += run_criterion(2, "resolvent membership characterization", criterion_membership,
                            &memb_secs);
  if (geom_secs > 1.0 || memb_secs > 1.0) {
    std::printf("[FAIL] criterion 1/2 runtime bound exceeded: %.2f s / %.2f s\n", geom_secs,
                memb_secs);
    ++failures;
  }

  double conv_secs = 0.0;
  failures += run_criterion(
      3, "convergence to the oracle solution", [&] { return criterion_convergence(art); },
      &conv_secs);
  if (conv_secs > 60.0) {
    std::printf("criterion  3 [FAIL] runtime bound exceeded: %.2f s > 60 s\n", conv_secs);
    ++failures;
  }
  failures += run_criterion(4, "sublinear rate certificate on full traces",
                            [&] { return criterion_rate(art, traces); });
  failures += run_criterion(5, "energy descent and nonnegativity",
                            [&] { return criterion_lyapunov(art, traces); });
  failures += run_criterion(6, "one-evaluation accounting",
                            [&] { return criterion_evaluation_counts(art); });
  failures += run_criterion(7, "self-adaptive step-size law",
                            [&] { return criterion_step_law(traces); });
  failures += run_criterion(8, "specialization collapses (A=0, B=N_C)", criterion_collapse);
  failures += run_criterion(9, "strong-monotonicity regime", criterion_strong);
  failures += run_criterion(10, "symmetric Cournot closed form", criterion_cournot);
  failures += run_criterion(11, "negative control: empty parameter interval",
                            criterion_negative_control);

  if (failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
