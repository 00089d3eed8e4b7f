#pragma once
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bfrb/bregman.hpp"
#include "bfrb/operators.hpp"

namespace bfrb {

/* Forward-reflected-backward solvers in Bregman geometry.
 *
 * Constant step:
 *   v_{n+1} = Res_{mu B}( grad g*( grad g(v_n) - mu (2 A v_n - A v_{n-1}) ) )
 * Self-adaptive step:
 *   v_{n+1} = Res_{mu_n B}( grad g*( grad g(v_n)
 *               - ((mu_n + mu_{n-1}) A v_n - mu_{n-1} A v_{n-1}) ) )
 * with
 *   mu_{n+1} = min{ alpha |v_n - v_{n+1}| / |A v_n - A v_{n+1}|, mu_n + d_n }
 * when A v_n != A v_{n+1}, else mu_n + d_n.
 *
 * Both need one A evaluation per iteration: A v_{n-1} is carried over. The
 * proximal-point and projected variants are the A = 0 and B = normal-cone
 * specializations; a two-evaluation Tseng-style forward-backward-forward run
 * is included purely as an evaluation-count comparator.
 */

enum class Method {
  frb_constant,
  frb_adaptive,
  proximal_point,
  projected_constant,
  projected_adaptive,
  tseng,
};

const char* method_name(Method m);
Method method_from_name(const std::string& name);

enum class Termination { converged, max_iters, divergence_guard };
const char* termination_name(Termination t);

enum class StopRule { step_change, residual };

struct DSchedule {
  enum class Kind { constant_zero, geometric, explicit_list };
  Kind kind = Kind::constant_zero;
  double ratio = 0.0;  // geometric: d_n = scale * ratio^n, 0 <= ratio < 1
  double scale = 0.0;
  std::vector<double> values;  // explicit list, d_1, d_2, ...; zero afterwards

  double at(long n) const;  // n >= 1
  double sum() const;       // closed form for geometric

  static DSchedule zero();
  static DSchedule geometric(double ratio, double scale);
  static DSchedule explicit_list(std::vector<double> values);
};

struct ConstantStepConfig {
  double mu = 0.0;
  double delta = 0.1;  // in (0, 1/2)
  long max_iters = 100000;
  double tol = 1e-8;
  bool record_trace = false;
  StopRule stop = StopRule::step_change;
};

struct AdaptiveStepConfig {
  double alpha = 0.0;
  double mu0 = 1.0;
  double mu1 = 1.0;
  DSchedule d_schedule;
  double delta = 0.1;
  long max_iters = 100000;
  double tol = 1e-8;
  bool record_trace = false;
  StopRule stop = StopRule::step_change;
};

struct ProximalPointConfig {
  double mu = 1.0;
  long max_iters = 100000;
  double tol = 1e-8;
  bool record_trace = false;
  StopRule stop = StopRule::step_change;
};

struct ProblemInstance {
  ForwardOperator A;
  ResolventOracle B;
  LegendreGeometry g;
  Vec v0, v1;
  std::optional<Vec> reference_solution;
  std::string label;
};

struct IterationRecord {
  long n = 0;           // iterate index
  double step_change;   // |v_n - v_{n-1}|, 0 for n = 0
  double mu;            // mu_n
  double residual;      // natural residual at v_n (with mu_n)
  std::size_t a_evals;  // metered A evaluations when v_n became available
};

struct SolverRun {
  Method method = Method::frb_constant;
  Termination termination = Termination::max_iters;
  long iterations = 0;
  Vec final_iterate;
  double final_residual = std::numeric_limits<double>::quiet_NaN();
  double final_step_change = std::numeric_limits<double>::quiet_NaN();
  std::size_t a_evaluations = 0;
  std::size_t resolvent_calls = 0;

  // Parameters echoed for diagnostics.
  double mu = std::numeric_limits<double>::quiet_NaN();  // constant-step / ppa value
  double delta = std::numeric_limits<double>::quiet_NaN();
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();  // adaptive only
  double d_sum = 0.0;

  // Full trace, present when record_trace was set: iterates[n] = v_n and
  // mu_sequence[n] = mu_n, n = 0..N.
  std::vector<Vec> iterates;
  std::vector<double> mu_sequence;
  std::vector<IterationRecord> records;

  bool has_trace() const { return iterates.size() >= 2; }
};

struct ValidationReport {
  bool pass = false;
  bool empty_interval = false;
  double lower = 0.0, upper = 0.0;  // admissible interval
  std::string violated;             // named inequality, empty if pass
  std::string message;
};

// Constant-step admissibility: delta in (0, 1/2) and
// delta <= mu <= gamma (1 - 2 delta) / (2 L). Throws MISSING_L when no L.
ValidationReport validate_constant_step(double mu, double delta, std::optional<double> lipschitz,
                                        double gamma);
// Adaptive admissibility: delta < alpha < min(gamma (1 - 2 delta) / 2, 1).
ValidationReport validate_adaptive_step(double alpha, double delta, double gamma);

double step_size_update(double mu_n, double d_n, double alpha, const Vec& v_n, const Vec& v_next,
                        const Vec& av_n, const Vec& av_next);

SolverRun solve_frb_constant(ProblemInstance& p, const ConstantStepConfig& cfg);
SolverRun solve_frb_adaptive(ProblemInstance& p, const AdaptiveStepConfig& cfg);
SolverRun solve_proximal_point(ProblemInstance& p, const ProximalPointConfig& cfg);
SolverRun solve_projected_constant(ProblemInstance& p, const ConstantStepConfig& cfg);
SolverRun solve_projected_adaptive(ProblemInstance& p, const AdaptiveStepConfig& cfg);
SolverRun solve_tseng_baseline(ProblemInstance& p, const ConstantStepConfig& cfg);

}  // namespace bfrb
