#include "bfrb/solvers.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace bfrb {

namespace {
constexpr double kDivergenceGuard = 1e12;

std::string interval_text(double lo, double hi) {
  std::ostringstream os;
  os << "[" << lo << ", " << hi << "]";
  return os.str();
}
}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::frb_constant: return "frb";
    case Method::frb_adaptive: return "frb-adaptive";
    case Method::proximal_point: return "ppa";
    case Method::projected_constant: return "projected";
    case Method::projected_adaptive: return "projected-adaptive";
    case Method::tseng: return "tseng";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "frb") return Method::frb_constant;
  if (name == "frb-adaptive") return Method::frb_adaptive;
  if (name == "ppa") return Method::proximal_point;
  if (name == "projected") return Method::projected_constant;
  if (name == "projected-adaptive") return Method::projected_adaptive;
  if (name == "tseng") return Method::tseng;
  fail(Errc::config_parse_error, "unknown solver method '" + name + "'");
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::converged: return "CONVERGED";
    case Termination::max_iters: return "MAX_ITERS";
    case Termination::divergence_guard: return "DIVERGENCE_GUARD";
  }
  return "?";
}

/* ------------------------------------------------------------------ */
/*  Step schedules and parameter validation                            */
/* ------------------------------------------------------------------ */

double DSchedule::at(long n) const {
  switch (kind) {
    case Kind::constant_zero:
      return 0.0;
    case Kind::geometric:
      return scale * std::pow(ratio, static_cast<double>(n));
    case Kind::explicit_list: {
      const std::size_t i = static_cast<std::size_t>(n - 1);
      return i < values.size() ? values[i] : 0.0;
    }
  }
  return 0.0;
}

double DSchedule::sum() const {
  switch (kind) {
    case Kind::constant_zero:
      return 0.0;
    case Kind::geometric:
      return ratio == 0.0 ? 0.0 : scale * ratio / (1.0 - ratio);
    case Kind::explicit_list:
      return std::accumulate(values.begin(), values.end(), 0.0);
  }
  return 0.0;
}

DSchedule DSchedule::zero() { return DSchedule{}; }

DSchedule DSchedule::geometric(double ratio, double scale) {
  if (!(ratio >= 0.0 && ratio < 1.0))
    fail(Errc::inadmissible_parameters, "geometric schedule needs ratio in [0, 1)");
  if (scale < 0.0) fail(Errc::inadmissible_parameters, "geometric schedule needs scale >= 0");
  DSchedule d;
  d.kind = Kind::geometric;
  d.ratio = ratio;
  d.scale = scale;
  return d;
}

DSchedule DSchedule::explicit_list(std::vector<double> values) {
  for (double v : values)
    if (v < 0.0) fail(Errc::inadmissible_parameters, "schedule entries must be nonnegative");
  DSchedule d;
  d.kind = Kind::explicit_list;
  d.values = std::move(values);
  return d;
}

ValidationReport validate_constant_step(double mu, double delta, std::optional<double> lipschitz,
                                        double gamma) {
  ValidationReport r;
  if (!(gamma > 0.0)) {
    r.violated = "gamma > 0";
    r.message = "strong-convexity modulus gamma must be positive";
    return r;
  }
  if (!(delta > 0.0 && delta < 0.5)) {
    r.violated = "delta in (0, 1/2)";
    r.message = "delta must lie strictly between 0 and 1/2";
    return r;
  }
  if (!lipschitz)
    fail(Errc::missing_l, "constant-step validation needs a declared Lipschitz constant");
  const double lip = *lipschitz;
  r.lower = delta;
  r.upper = lip > 0.0 ? gamma * (1.0 - 2.0 * delta) / (2.0 * lip)
                      : std::numeric_limits<double>::infinity();
  if (r.lower > r.upper) {
    r.empty_interval = true;
    r.violated = "EMPTY_INTERVAL";
    r.message = "admissible mu interval " + interval_text(r.lower, r.upper) +
                " is empty: delta <= gamma*(1-2*delta)/(2*L) fails for delta=" +
                std::to_string(delta) + ", gamma=" + std::to_string(gamma) +
                ", L=" + std::to_string(lip);
    return r;
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    r.violated = "mu > 0";
    r.message = "mu must be a positive finite real";
    return r;
  }
  if (mu < r.lower) {
    r.violated = "mu >= delta";
    r.message = "mu below the admissible interval " + interval_text(r.lower, r.upper);
    return r;
  }
  if (mu > r.upper) {
    r.violated = "mu <= gamma*(1-2*delta)/(2*L)";
    r.message = "mu above the admissible interval " + interval_text(r.lower, r.upper);
    return r;
  }
  r.pass = true;
  r.message = "mu inside the admissible interval " + interval_text(r.lower, r.upper);
  return r;
}

ValidationReport validate_adaptive_step(double alpha, double delta, double gamma) {
  ValidationReport r;
  if (!(gamma > 0.0)) {
    r.violated = "gamma > 0";
    r.message = "strong-convexity modulus gamma must be positive";
    return r;
  }
  if (!(delta > 0.0 && delta < 0.5)) {
    r.violated = "delta in (0, 1/2)";
    r.message = "delta must lie strictly between 0 and 1/2";
    return r;
  }
  r.lower = delta;
  // alpha in (0,1) is intersected with the admissible range.
  r.upper = std::min(gamma * (1.0 - 2.0 * delta) / 2.0, 1.0);
  if (r.lower >= r.upper) {
    r.empty_interval = true;
    r.violated = "EMPTY_INTERVAL";
    r.message = "admissible alpha interval (" + std::to_string(r.lower) + ", " +
                std::to_string(r.upper) + ") is empty";
    return r;
  }
  if (!(alpha > r.lower)) {
    r.violated = "alpha > delta";
    r.message = "alpha must exceed delta";
    return r;
  }
  if (!(alpha < r.upper)) {
    r.violated = "alpha < min(gamma*(1-2*delta)/2, 1)";
    r.message = "alpha above the admissible interval";
    return r;
  }
  r.pass = true;
  r.message = "alpha inside the admissible interval (" + std::to_string(r.lower) + ", " +
              std::to_string(r.upper) + ")";
  return r;
}

double step_size_update(double mu_n, double d_n, double alpha, const Vec& v_n, const Vec& v_next,
                        const Vec& av_n, const Vec& av_next) {
  const double cap = mu_n + d_n;
  if (av_n == av_next) return cap;  // exact vector equality, no tolerance
  const double den = dist2(av_n, av_next);
  if (den == 0.0) return cap;  // equal values with distinct signed-zero patterns
  return std::min(alpha * dist2(v_n, v_next) / den, cap);
}

/* ------------------------------------------------------------------ */
/*  Solver cores                                                       */
/* ------------------------------------------------------------------ */

namespace {

void check_instance(const ProblemInstance& p) {
  const std::size_t d = p.g.dimension();
  if (p.A.dimension() != d || p.B.dimension() != d)
    fail(Errc::dimension_mismatch, "operator/geometry dimensions disagree");
  p.g.require_in_domain(p.v0);
  p.g.require_in_domain(p.v1);
}

double safe_residual(const ProblemInstance& p, double mu, const Vec& x) {
  try {
    return natural_residual(p.A, p.B, p.g, mu, x);
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

void push_row(SolverRun& run, const ProblemInstance& p, long n, const Vec& v, double step_change,
              double mu_n, std::size_t snapshot) {
  run.iterates.push_back(v);
  run.mu_sequence.push_back(mu_n);
  IterationRecord rec;
  rec.n = n;
  rec.step_change = step_change;
  rec.mu = mu_n;
  rec.residual = safe_residual(p, mu_n, v);
  rec.a_evals = snapshot;
  run.records.push_back(rec);
}

void throw_if_invalid(const ValidationReport& r) {
  if (r.pass) return;
  fail(r.empty_interval ? Errc::empty_interval : Errc::inadmissible_parameters, r.message);
}

SolverRun run_constant_core(ProblemInstance& p, const ConstantStepConfig& cfg, Method tag) {
  throw_if_invalid(validate_constant_step(cfg.mu, cfg.delta, p.A.lipschitz(), p.g.gamma()));
  check_instance(p);

  SolverRun run;
  run.method = tag;
  run.mu = cfg.mu;
  run.delta = cfg.delta;
  run.gamma = p.g.gamma();

  const double mu = cfg.mu;
  const std::size_t evals0 = p.A.eval_count();
  Vec v_prev = p.v0, v = p.v1;
  if (cfg.record_trace) push_row(run, p, 0, v_prev, 0.0, mu, 0);
  Vec av_prev = p.A.apply(v_prev);  // A v_0; reused across the first iteration
  if (cfg.record_trace) push_row(run, p, 1, v, dist2(v, v_prev), mu, p.A.eval_count() - evals0);

  long completed = 0;
  double last_sc = std::numeric_limits<double>::quiet_NaN();
  run.termination = Termination::max_iters;
  for (long n = 1; n <= cfg.max_iters; ++n) {
    const Vec av = p.A.apply(v);  // the single A evaluation of this iteration
    Vec w = p.g.gradient(v);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= mu * (2.0 * av[i] - av_prev[i]);
    Vec v_next = p.B.resolve_dual(p.g, mu, w);
    ++run.resolvent_calls;
    completed = n;

    const double sc = dist2(v_next, v);
    last_sc = sc;
    if (cfg.record_trace)
      push_row(run, p, n + 1, v_next, sc, mu, p.A.eval_count() - evals0);

    const double nv = norm2(v_next);
    if (!(nv <= kDivergenceGuard)) {
      run.termination = Termination::divergence_guard;
      v = std::move(v_next);
      break;
    }
    const bool stop = (cfg.stop == StopRule::step_change)
                          ? sc <= cfg.tol * (1.0 + norm2(v))
                          : safe_residual(p, mu, v_next) <= cfg.tol;
    v_prev = std::move(v);
    v = std::move(v_next);
    av_prev = av;
    if (stop) {
      run.termination = Termination::converged;
      break;
    }
  }

  run.iterations = completed;
  run.final_iterate = v;
  run.final_step_change = last_sc;
  run.a_evaluations = p.A.eval_count() - evals0;
  run.final_residual = safe_residual(p, mu, v);
  return run;
}

SolverRun run_adaptive_core(ProblemInstance& p, const AdaptiveStepConfig& cfg, Method tag) {
  throw_if_invalid(validate_adaptive_step(cfg.alpha, cfg.delta, p.g.gamma()));
  if (!(cfg.mu0 > 0.0) || !(cfg.mu1 > 0.0))
    fail(Errc::inadmissible_parameters, "mu0 and mu1 must be positive");
  check_instance(p);

  SolverRun run;
  run.method = tag;
  run.delta = cfg.delta;
  run.gamma = p.g.gamma();
  run.alpha = cfg.alpha;
  run.d_sum = cfg.d_schedule.sum();
  run.mu = cfg.mu1;

  const std::size_t evals0 = p.A.eval_count();
  Vec v_prev = p.v0, v = p.v1;
  double mu_prev = cfg.mu0, mu_cur = cfg.mu1;
  if (cfg.record_trace) push_row(run, p, 0, v_prev, 0.0, mu_prev, 0);
  Vec av_prev = p.A.apply(v_prev);  // A v_0
  if (cfg.record_trace)
    push_row(run, p, 1, v, dist2(v, v_prev), mu_cur, p.A.eval_count() - evals0);

  long completed = 0;
  double last_sc = std::numeric_limits<double>::quiet_NaN();
  // Row n is appended once mu_n is known, i.e. at the top of iteration n;
  // these carry the pending step change / counter snapshot for it.
  double pending_sc = 0.0;
  std::size_t pending_snapshot = 0;
  run.termination = Termination::max_iters;

  for (long n = 1; n <= cfg.max_iters; ++n) {
    const Vec av = p.A.apply(v);  // A v_n
    if (n >= 2) {
      const double mu_n =
          step_size_update(mu_cur, cfg.d_schedule.at(n - 1), cfg.alpha, v_prev, v, av_prev, av);
      mu_prev = mu_cur;
      mu_cur = mu_n;
      if (cfg.record_trace) push_row(run, p, n, v, pending_sc, mu_cur, pending_snapshot);
    }

    Vec w = p.g.gradient(v);
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] -= (mu_cur + mu_prev) * av[i] - mu_prev * av_prev[i];
    Vec v_next = p.B.resolve_dual(p.g, mu_cur, w);
    ++run.resolvent_calls;
    completed = n;

    const double sc = dist2(v_next, v);
    last_sc = sc;
    pending_sc = sc;
    pending_snapshot = p.A.eval_count() - evals0;

    const double nv = norm2(v_next);
    if (!(nv <= kDivergenceGuard)) {
      run.termination = Termination::divergence_guard;
      v_prev = std::move(v);
      v = std::move(v_next);
      av_prev = av;
      break;
    }
    const bool stop = (cfg.stop == StopRule::step_change)
                          ? sc <= cfg.tol * (1.0 + norm2(v))
                          : safe_residual(p, mu_cur, v_next) <= cfg.tol;
    v_prev = std::move(v);
    v = std::move(v_next);
    av_prev = av;
    if (stop) {
      run.termination = Termination::converged;
      break;
    }
  }

  // The final iterate's mu is only defined by the next update; complete the
  // trace with an unmetered evaluation so the recorded step law is total.
  if (cfg.record_trace && completed >= 1) {
    double mu_fin = std::numeric_limits<double>::quiet_NaN();
    try {
      const Vec av_fin = p.A.apply_unmetered(v);
      mu_fin = step_size_update(mu_cur, cfg.d_schedule.at(completed), cfg.alpha, v_prev, v,
                                av_prev, av_fin);
    } catch (const Error&) {
    }
    push_row(run, p, completed + 1, v, pending_sc, mu_fin, pending_snapshot);
  }

  run.iterations = completed;
  run.final_iterate = v;
  run.final_step_change = last_sc;
  run.a_evaluations = p.A.eval_count() - evals0;
  run.final_residual = safe_residual(p, mu_cur, v);
  return run;
}

}  // namespace

SolverRun solve_frb_constant(ProblemInstance& p, const ConstantStepConfig& cfg) {
  return run_constant_core(p, cfg, Method::frb_constant);
}

SolverRun solve_frb_adaptive(ProblemInstance& p, const AdaptiveStepConfig& cfg) {
  return run_adaptive_core(p, cfg, Method::frb_adaptive);
}

SolverRun solve_projected_constant(ProblemInstance& p, const ConstantStepConfig& cfg) {
  if (!p.B.is_normal_cone())
    fail(Errc::invalid_spec, "projected solver requires a normal-cone operator B");
  return run_constant_core(p, cfg, Method::projected_constant);
}

SolverRun solve_projected_adaptive(ProblemInstance& p, const AdaptiveStepConfig& cfg) {
  if (!p.B.is_normal_cone())
    fail(Errc::invalid_spec, "projected solver requires a normal-cone operator B");
  return run_adaptive_core(p, cfg, Method::projected_adaptive);
}

SolverRun solve_proximal_point(ProblemInstance& p, const ProximalPointConfig& cfg) {
  if (!p.A.is_zero())
    fail(Errc::invalid_spec, "proximal point requires the zero forward operator");
  if (!(cfg.mu > 0.0)) fail(Errc::inadmissible_parameters, "mu must be positive");
  check_instance(p);

  SolverRun run;
  run.method = Method::proximal_point;
  run.mu = cfg.mu;
  run.delta = 0.1;  // only used by trace diagnostics
  run.gamma = p.g.gamma();

  const std::size_t evals0 = p.A.eval_count();
  Vec v = p.v1;
  // v0 = v1 embedding: the run is the A = 0 collapse of the constant-step
  // method, which keeps the rate certificate applicable to the trace.
  if (cfg.record_trace) {
    push_row(run, p, 0, v, 0.0, cfg.mu, 0);
    push_row(run, p, 1, v, 0.0, cfg.mu, 0);
  }

  long completed = 0;
  double last_sc = std::numeric_limits<double>::quiet_NaN();
  run.termination = Termination::max_iters;
  for (long n = 1; n <= cfg.max_iters; ++n) {
    Vec v_next = p.B.resolve(p.g, cfg.mu, v);
    ++run.resolvent_calls;
    completed = n;
    const double sc = dist2(v_next, v);
    last_sc = sc;
    if (cfg.record_trace) push_row(run, p, n + 1, v_next, sc, cfg.mu, 0);
    const double nv = norm2(v_next);
    if (!(nv <= kDivergenceGuard)) {
      run.termination = Termination::divergence_guard;
      v = std::move(v_next);
      break;
    }
    const bool stop = (cfg.stop == StopRule::step_change)
                          ? sc <= cfg.tol * (1.0 + norm2(v))
                          : safe_residual(p, cfg.mu, v_next) <= cfg.tol;
    v = std::move(v_next);
    if (stop) {
      run.termination = Termination::converged;
      break;
    }
  }

  run.iterations = completed;
  run.final_iterate = v;
  run.final_step_change = last_sc;
  run.a_evaluations = p.A.eval_count() - evals0;
  run.final_residual = safe_residual(p, cfg.mu, v);
  return run;
}

SolverRun solve_tseng_baseline(ProblemInstance& p, const ConstantStepConfig& cfg) {
  throw_if_invalid(validate_constant_step(cfg.mu, cfg.delta, p.A.lipschitz(), p.g.gamma()));
  check_instance(p);

  SolverRun run;
  run.method = Method::tseng;
  run.mu = cfg.mu;
  run.delta = cfg.delta;
  run.gamma = p.g.gamma();

  const double mu = cfg.mu;
  const std::size_t evals0 = p.A.eval_count();
  Vec x = p.v1;
  if (cfg.record_trace) push_row(run, p, 0, x, 0.0, mu, 0);

  long completed = 0;
  double last_sc = std::numeric_limits<double>::quiet_NaN();
  run.termination = Termination::max_iters;
  for (long n = 1; n <= cfg.max_iters; ++n) {
    const Vec ax = p.A.apply(x);
    Vec wy = p.g.gradient(x);
    axpy(-mu, ax, wy);
    const Vec y = p.B.resolve_dual(p.g, mu, wy);
    ++run.resolvent_calls;
    const Vec ay = p.A.apply(y);
    Vec wx = p.g.gradient(y);
    for (std::size_t i = 0; i < wx.size(); ++i) wx[i] -= mu * (ay[i] - ax[i]);
    Vec x_next = p.g.gradient_conjugate(wx);
    completed = n;

    const double sc = dist2(x_next, x);
    last_sc = sc;
    if (cfg.record_trace) push_row(run, p, n, x_next, sc, mu, p.A.eval_count() - evals0);

    const double nv = norm2(x_next);
    if (!(nv <= kDivergenceGuard)) {
      run.termination = Termination::divergence_guard;
      x = std::move(x_next);
      break;
    }
    const bool stop = (cfg.stop == StopRule::step_change)
                          ? sc <= cfg.tol * (1.0 + norm2(x))
                          : safe_residual(p, mu, x_next) <= cfg.tol;
    x = std::move(x_next);
    if (stop) {
      run.termination = Termination::converged;
      break;
    }
  }

  run.iterations = completed;
  run.final_iterate = x;
  run.final_step_change = last_sc;
  run.a_evaluations = p.A.eval_count() - evals0;
  run.final_residual = safe_residual(p, mu, x);
  return run;
}

}  // namespace bfrb
