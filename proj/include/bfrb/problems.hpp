#pragma once
#include <functional>
#include <string>
#include <vector>

#include "bfrb/solvers.hpp"

namespace bfrb {

/* Shipped problem instances with verifiable solutions, plus an independent
 * high-accuracy oracle. The oracle deliberately shares no iteration code with
 * the solvers: it uses active-set enumeration with direct linear solves at
 * small dimension and falls back to a plain extragradient loop.
 */

// A = block-skew rotation (L = 1, monotone, not strongly monotone),
// B = normal cone of [-r, r]^d. Unique zero at the origin.
ProblemInstance make_skew_box_vi(std::size_t d, double box_radius);

enum class StrongVariant {
  interior,   // A = tau I + skew + b, zero strictly inside the box
  boundary,   // zero pinned to a box face, reference from an active-set solve
  strong_b,   // A = skew (tau 0), B = tau-scaled identity with shifted zero
};

ProblemInstance make_strongly_monotone_instance(std::size_t d, double tau,
                                                StrongVariant variant = StrongVariant::interior);

struct GasMarketSpec {
  std::size_t firms = 1;
  std::size_t periods = 1;
  double alpha = 1.0;  // inverse-demand slope
  double beta = 10.0;  // inverse-demand intercept
  Vec cost;            // per-firm injection cost, >= 0
  Vec capacity;        // per-firm injection cap, > 0
  bool budget_coupling = true;

  static GasMarketSpec uniform(std::size_t firms, std::size_t periods, double alpha, double beta,
                               double cost, double capacity, bool budget_coupling = true);
};

// Finite-dimensional Cournot-style gas market: per period, the sales block of
// A is alpha (ones + identity) across firms (monotone, L = alpha (M + 1));
// the inverse-demand intercept enters as the affine offset -beta on sales
// coordinates. B carries the injection costs and the normal cone of the
// per-firm feasible polyhedron. Decision layout per firm: K injections then
// K withdrawals.
ProblemInstance make_gas_market(const GasMarketSpec& spec);

// Symmetric-equilibrium sales level (beta - cost) / (alpha (firms + 1)),
// valid when the budget coupling is enforced and capacities are slack.
double cournot_symmetric_output(const GasMarketSpec& spec);

// Independent ground-truth solve to the requested natural-residual precision.
// Always runs in Euclidean geometry; the result is certified by a direct
// residual check before being returned.
Vec oracle_solve(const ProblemInstance& p, double precision);

struct ShippedProblem {
  std::string name;
  std::string description;
  std::function<ProblemInstance()> build;
};

const std::vector<ShippedProblem>& shipped_problems();
ProblemInstance build_shipped(const std::string& name);

// Structured-text problem files (the format `problems export` writes and the
// solver CLI consumes).
ProblemInstance load_problem_file(const std::string& path);
std::string serialize_problem(const ProblemInstance& p);

}  // namespace bfrb
