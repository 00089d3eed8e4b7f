#pragma once
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "bfrb/bregman.hpp"
#include "bfrb/linalg.hpp"
#include "bfrb/vec.hpp"

namespace bfrb {

/* Operator oracles for the inclusion 0 in (A + B)v.
 *
 * A is a single-valued monotone map with a metered evaluation counter; the
 * counter exists to make the one-evaluation-per-iteration property of the
 * solvers auditable, so instrumentation code (residuals, diagnostics, the
 * ground-truth oracle) must go through apply_unmetered instead.
 *
 * B is set-valued maximal monotone, represented by its resolvent relative to
 * a geometry g: resolve(g, mu, x) = (grad g + mu B)^{-1}(grad g(x)). The
 * shipped instances all have closed-form resolvents; when an instance has no
 * closed form under the requested geometry the call fails with
 * NO_CLOSED_FORM rather than falling back to an inner iterative solve.
 */

class ForwardOperator {
 public:
  using Fn = std::function<Vec(const Vec&)>;

  ForwardOperator(std::size_t dimension, Fn fn, std::optional<double> lipschitz = {},
                  std::optional<double> strong_monotonicity = {});

  // A x = M x + offset. Lipschitz constant = largest singular value of M
  // (power iteration, tol 1e-10); strong monotonicity = smallest eigenvalue
  // of the symmetric part. Rejects matrices whose symmetric part is not
  // positive semidefinite.
  static ForwardOperator linear(const Mat& m, Vec offset);
  // Same operator with caller-declared constants (exact values for structured
  // matrices such as rotations, where the power iteration only approximates).
  static ForwardOperator linear_with_constants(const Mat& m, Vec offset, double lipschitz,
                                               double strong_monotonicity);
  static ForwardOperator zero(std::size_t dimension);

  Vec apply(const Vec& x);                  // counted
  Vec apply_unmetered(const Vec& x) const;  // instrumentation path

  std::size_t eval_count() const { return eval_count_; }
  void reset_eval_count() { eval_count_ = 0; }

  std::size_t dimension() const { return dim_; }
  std::optional<double> lipschitz() const { return lipschitz_; }
  std::optional<double> strong_monotonicity() const { return tau_; }
  bool is_zero() const { return is_zero_; }

  // Non-null for operators built through linear()/linear_with_constants().
  const Mat* matrix() const { return matrix_ ? matrix_.get() : nullptr; }
  const Vec* offset() const { return matrix_ ? &offset_ : nullptr; }

 private:
  std::size_t dim_;
  Fn fn_;
  std::optional<double> lipschitz_, tau_;
  std::size_t eval_count_ = 0;
  bool is_zero_ = false;
  std::shared_ptr<const Mat> matrix_;
  Vec offset_;
};

// Feasible-set data for the gas-market operator B: linear injection costs plus
// the normal cone of the per-firm polyhedron
//   { 0 <= q_in <= capacity, q_out >= 0, [sum_k (q_out - q_in) <= 0] }.
struct GasFeasibleData {
  std::size_t firms = 0;
  std::size_t periods = 0;
  Vec cost;      // per firm, applied to every q_in coordinate
  Vec capacity;  // per firm
  bool coupling = false;

  std::size_t dimension() const { return 2 * firms * periods; }
  std::size_t in_index(std::size_t firm, std::size_t period) const {
    return firm * 2 * periods + period;
  }
  std::size_t out_index(std::size_t firm, std::size_t period) const {
    return firm * 2 * periods + periods + period;
  }
};

class ResolventOracle {
 public:
  enum class Kind { box, simplex, scaled_identity, gas_feasible, custom };

  static ResolventOracle normal_cone_box(Vec lower, Vec upper);
  static ResolventOracle normal_cone_simplex(std::size_t d);
  // B x = { c (x - shift) }; shift defaults to the origin.
  static ResolventOracle scaled_identity(std::size_t d, double c, Vec shift = {});
  static ResolventOracle gas_feasible(GasFeasibleData data);
  static ResolventOracle custom(
      std::size_t d,
      std::function<Vec(const LegendreGeometry&, double, const Vec&)> resolve_dual,
      std::optional<double> strong_monotonicity = {});

  Kind kind() const { return kind_; }
  std::size_t dimension() const { return dim_; }
  std::optional<double> strong_monotonicity() const { return tau_; }
  bool is_normal_cone() const { return kind_ == Kind::box || kind_ == Kind::simplex; }

  // (grad g + mu B)^{-1}(grad g(x)).
  Vec resolve(const LegendreGeometry& g, double mu, const Vec& x) const;
  // (grad g + mu B)^{-1}(w) for a dual-space point w. The solvers call this
  // directly so the reflected forward step never round-trips through
  // grad g* o grad g.
  Vec resolve_dual(const LegendreGeometry& g, double mu, const Vec& w) const;

  // Shipped-instance data, used by membership checks and serialization.
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  double scale() const { return scale_; }
  const Vec& shift() const { return shift_; }
  const GasFeasibleData& gas() const { return gas_; }

 private:
  ResolventOracle() = default;
  Kind kind_ = Kind::custom;
  std::size_t dim_ = 0;
  std::optional<double> tau_;
  Vec lower_, upper_;   // box
  double scale_ = 0.0;  // scaled_identity
  Vec shift_;
  GasFeasibleData gas_;
  std::function<Vec(const LegendreGeometry&, double, const Vec&)> custom_;
};

struct ConstraintSet {
  enum class Kind { box, simplex };
  Kind kind = Kind::box;
  std::size_t dim = 0;
  Vec lower, upper;

  static ConstraintSet box(Vec lower, Vec upper);
  static ConstraintSet simplex(std::size_t d);
};

// argmin over y in C of D_g(y, x); equals the resolvent of the normal cone of
// C for every step size.
Vec bregman_project(const LegendreGeometry& g, const ConstraintSet& c, const Vec& x);

// |x - Res_{mu B}(grad g*(grad g(x) - mu A x))|; zero exactly at solutions of
// the inclusion. Uses the unmetered evaluation path.
double natural_residual(const ForwardOperator& a, const ResolventOracle& b,
                        const LegendreGeometry& g, double mu, const Vec& x);

// Violation magnitude of the resolvent characterization
// (grad g(x) - grad g(y))/mu  in  B y, where y = resolve(g, mu, x). Checked
// through closed-form cone/sign conditions per shipped kind.
double resolvent_membership_gap(const ResolventOracle& b, const LegendreGeometry& g, double mu,
                                const Vec& x, const Vec& y);

// Euclidean projection onto the probability simplex (sort-based, exact
// termination). Exposed for tests and the ground-truth oracle.
Vec project_simplex_euclidean(const Vec& v);

// Euclidean projection onto {lower <= y <= upper} intersected with
// {sum(sign .* y) <= 0}; sign entries are +1/-1. Exact breakpoint search.
Vec project_box_halfspace(const Vec& v, const Vec& lower, const Vec& upper, const Vec& sign);

}  // namespace bfrb
