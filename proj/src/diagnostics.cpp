#include "bfrb/diagnostics.hpp"

#include <cmath>
#include <sstream>

namespace bfrb {

namespace {

void require_trace(const SolverRun& run) {
  if (run.iterates.size() < 3 || run.mu_sequence.size() != run.iterates.size())
    fail(Errc::no_trace, "run did not record a full trace");
}

void require_reference(const ProblemInstance& p, const Vec& z) {
  if (z.empty()) fail(Errc::no_reference_solution, "no reference solution supplied");
  p.g.require_in_domain(z);
}

bool is_adaptive(Method m) {
  return m == Method::frb_adaptive || m == Method::projected_adaptive;
}

}  // namespace

long detect_adaptive_start(const SolverRun& run) {
  const auto& mu = run.mu_sequence;
  if (mu.size() < 3) return -1;
  long last = static_cast<long>(mu.size()) - 1;
  while (last >= 1 && !std::isfinite(mu[static_cast<std::size_t>(last)])) --last;
  if (last < 2) return -1;
  const double bound = 0.5 - run.delta;
  // smallest n0 with (mu_n / mu_{n+1}) * alpha / gamma < 1/2 - delta for all
  // recorded n >= n0
  long n0 = -1;
  for (long n = last - 1; n >= 1; --n) {
    const double ratio =
        mu[static_cast<std::size_t>(n)] / mu[static_cast<std::size_t>(n + 1)];
    if (ratio * run.alpha / run.gamma < bound)
      n0 = n;
    else
      break;
  }
  // The descent estimate for row n is driven by the ratio mu_{n-1}/mu_n, so
  // the first row it covers is the successor of the detected index.
  return n0 < 0 ? -1 : n0 + 1;
}

LyapunovReport check_lyapunov_descent(ProblemInstance& p, const SolverRun& run, const Vec& z,
                                      long start_index) {
  require_trace(run);
  require_reference(p, z);

  const auto& vs = run.iterates;
  const auto& mu = run.mu_sequence;
  const long top = static_cast<long>(vs.size()) - 1;  // largest iterate index

  std::vector<Vec> av(vs.size());
  for (std::size_t n = 0; n < vs.size(); ++n) av[n] = p.A.apply_unmetered(vs[n]);

  LyapunovReport rep;
  rep.energy.assign(vs.size(), 0.0);
  rep.decrement.assign(vs.size(), 0.0);
  for (long n = 1; n <= top; ++n) {
    const auto un = static_cast<std::size_t>(n);
    Vec diff_av = sub(av[un], av[un - 1]);
    Vec to_z = sub(z, vs[un]);
    rep.energy[un] = p.g.distance(z, vs[un]) + mu[un - 1] * dot(diff_av, to_z) +
                     0.5 * p.g.distance(vs[un], vs[un - 1]);
    if (n < top) rep.decrement[un] = run.delta * p.g.distance(vs[un + 1], vs[un]);
  }

  long start = start_index;
  if (start < 0) start = is_adaptive(run.method) ? detect_adaptive_start(run) : 1;
  if (start < 1) {
    rep.pass = false;
    rep.start_index = -1;
    rep.message = "no stable start index found for the adaptive step sequence";
    return rep;
  }
  rep.start_index = start;

  rep.pass = true;
  rep.min_energy = std::numeric_limits<double>::infinity();
  for (long n = start; n <= top; ++n) {
    const auto un = static_cast<std::size_t>(n);
    rep.min_energy = std::min(rep.min_energy, rep.energy[un]);
    if (rep.energy[un] < -1e-9) {
      rep.pass = false;
      if (rep.first_violation < 0) rep.first_violation = n;
    }
    if (n == top) break;
    const double slack =
        rep.energy[un + 1] - (rep.energy[un] - rep.decrement[un] + 1e-9 * (1.0 + std::fabs(rep.energy[un])));
    if (slack > 0.0) {
      rep.pass = false;
      rep.max_violation = std::max(rep.max_violation, slack);
      if (rep.first_violation < 0) rep.first_violation = n;
    }
  }
  std::ostringstream os;
  os << (rep.pass ? "descent and nonnegativity hold" : "violated")
     << " from n=" << rep.start_index << " over " << top << " iterates";
  rep.message = os.str();
  return rep;
}

RateReport rate_certificate(ProblemInstance& p, const SolverRun& run, const Vec& z) {
  if (run.method != Method::frb_constant && run.method != Method::projected_constant &&
      run.method != Method::proximal_point)
    fail(Errc::invalid_spec, "rate certificate applies to constant-step runs");
  require_trace(run);
  require_reference(p, z);

  const auto& vs = run.iterates;
  const long top = static_cast<long>(vs.size()) - 1;
  const double mu = run.mu;

  const Vec av0 = p.A.apply_unmetered(vs[0]);
  const Vec av1 = p.A.apply_unmetered(vs[1]);
  RateReport rep;
  rep.c1 = p.g.distance(z, vs[1]) + mu * dot(sub(av1, av0), sub(z, vs[1])) +
           0.5 * p.g.distance(vs[1], vs[0]);
  rep.worst_margin = -std::numeric_limits<double>::infinity();

  double running_min = std::numeric_limits<double>::infinity();
  for (long n = 1; n < top; ++n) {
    const auto un = static_cast<std::size_t>(n);
    const double sc = dist2(vs[un + 1], vs[un]);
    running_min = std::min(running_min, sc * sc);
    const double bound =
        2.0 * rep.c1 / (static_cast<double>(n) * run.delta * run.gamma) + 1e-9;
    ++rep.checked;
    const double margin = running_min - bound;
    rep.worst_margin = std::max(rep.worst_margin, margin);
    if (margin > 0.0) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  std::ostringstream os;
  os << "C1=" << rep.c1 << ", " << rep.checked << " indices checked, " << rep.violations
     << " violations";
  rep.message = os.str();
  return rep;
}

EvaluationReport evaluation_report(const SolverRun& run) {
  EvaluationReport rep;
  rep.iterations = run.iterations;
  rep.a_evaluations = run.a_evaluations;
  rep.resolvent_calls = run.resolvent_calls;
  switch (run.method) {
    case Method::frb_constant:
    case Method::frb_adaptive:
    case Method::projected_constant:
    case Method::projected_adaptive:
      rep.expected_a_evaluations = static_cast<std::size_t>(run.iterations) + 1;
      break;
    case Method::tseng:
      rep.expected_a_evaluations = 2 * static_cast<std::size_t>(run.iterations);
      break;
    case Method::proximal_point:
      rep.expected_a_evaluations = 0;
      break;
  }
  rep.pass = rep.a_evaluations == rep.expected_a_evaluations;
  std::ostringstream os;
  os << method_name(run.method) << ": " << run.iterations << " iterations, "
     << run.a_evaluations << " A evaluations (expected " << rep.expected_a_evaluations << "), "
     << run.resolvent_calls << " resolvent calls";
  rep.message = os.str();
  return rep;
}

}  // namespace bfrb
