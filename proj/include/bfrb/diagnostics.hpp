#pragma once
#include <string>
#include <vector>

#include "bfrb/solvers.hpp"

namespace bfrb {

/* Runtime verification of the convergence analysis on recorded traces.
 *
 * Against a known solution z the energy pair
 *   s_n = D_g(z, v_n) + mu_{n-1} <A v_n - A v_{n-1}, z - v_n>
 *         + (1/2) D_g(v_n, v_{n-1})
 *   t_n = delta * D_g(v_{n+1}, v_n)
 * must satisfy s_{n+1} <= s_n - t_n and s_n >= 0 under admissible parameters
 * (for the adaptive method only past a burn-in index n0). The constant-step
 * method additionally carries the explicit sublinear rate bound
 *   min_{1<=j<=n} |v_{j+1} - v_j|^2 <= (2 / (n delta gamma)) * C1,
 * C1 = s_1. All checks are pure functions of the trace; A is re-evaluated
 * through the unmetered path.
 */

struct LyapunovReport {
  bool pass = false;
  long start_index = 1;       // first n the inequalities are asserted from
  long first_violation = -1;  // iterate index, -1 if none
  double max_violation = 0.0;
  double min_energy = 0.0;  // min s_n over the asserted range
  std::vector<double> energy;     // s_n, n = 1..N (index 0 unused)
  std::vector<double> decrement;  // t_n, n = 1..N-1
  std::string message;
};

// start_index < 0 selects automatically: 1 for constant-step runs, the
// detected burn-in n0 for adaptive runs.
LyapunovReport check_lyapunov_descent(ProblemInstance& p, const SolverRun& run, const Vec& z,
                                      long start_index = -1);

// First index from which (mu_n / mu_{n+1}) * alpha / gamma < 1/2 - delta holds
// for the rest of the recorded step sequence; -1 if never.
long detect_adaptive_start(const SolverRun& run);

struct RateReport {
  bool pass = false;
  double c1 = 0.0;
  long checked = 0;
  long violations = 0;
  double worst_margin = 0.0;  // max over n of lhs - bound
  std::string message;
};

RateReport rate_certificate(ProblemInstance& p, const SolverRun& run, const Vec& z);

struct EvaluationReport {
  bool pass = false;
  long iterations = 0;
  std::size_t a_evaluations = 0;
  std::size_t resolvent_calls = 0;
  std::size_t expected_a_evaluations = 0;
  std::string message;
};

// One-evaluation accounting: n+1 A evaluations after n iterations for the
// forward-reflected-backward family, 2n for the Tseng baseline, 0 for the
// proximal-point method.
EvaluationReport evaluation_report(const SolverRun& run);

}  // namespace bfrb
