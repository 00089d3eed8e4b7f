#include "bfrb/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace bfrb {

ForwardOperator::ForwardOperator(std::size_t dimension, Fn fn, std::optional<double> lipschitz,
                                 std::optional<double> strong_monotonicity)
    : dim_(dimension), fn_(std::move(fn)), lipschitz_(lipschitz), tau_(strong_monotonicity) {
  if (lipschitz_ && *lipschitz_ < 0.0) fail(Errc::invalid_spec, "negative Lipschitz constant");
  if (tau_ && *tau_ < 0.0) fail(Errc::invalid_spec, "negative strong-monotonicity modulus");
}

ForwardOperator ForwardOperator::linear(const Mat& m, Vec offset) {
  const double lip = spectral_norm(m, 1e-10);
  const double tau_raw = min_eigenvalue_symmetric(m.symmetric_part(), 1e-10);
  if (tau_raw < -1e-8 * (1.0 + lip))
    fail(Errc::invalid_spec, "linear operator has non-PSD symmetric part (not monotone)");
  return linear_with_constants(m, std::move(offset), lip, std::max(0.0, tau_raw));
}

ForwardOperator ForwardOperator::linear_with_constants(const Mat& m, Vec offset, double lipschitz,
                                                       double strong_monotonicity) {
  if (m.rows() != m.cols()) fail(Errc::dimension_mismatch, "linear operator matrix must be square");
  if (offset.size() != m.rows()) fail(Errc::dimension_mismatch, "linear operator offset size");
  auto mat = std::make_shared<const Mat>(m);
  Vec off = offset;
  ForwardOperator a(
      m.rows(),
      [mat, off](const Vec& x) {
        Vec y = mat->apply(x);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += off[i];
        return y;
      },
      lipschitz, strong_monotonicity);
  a.matrix_ = mat;
  a.offset_ = std::move(offset);
  return a;
}

ForwardOperator ForwardOperator::zero(std::size_t dimension) {
  ForwardOperator a(
      dimension, [dimension](const Vec&) { return Vec(dimension, 0.0); }, 0.0, 0.0);
  a.is_zero_ = true;
  return a;
}

Vec ForwardOperator::apply(const Vec& x) {
  if (x.size() != dim_) fail(Errc::dimension_mismatch, "forward operator input size");
  ++eval_count_;
  return fn_(x);
}

Vec ForwardOperator::apply_unmetered(const Vec& x) const {
  if (x.size() != dim_) fail(Errc::dimension_mismatch, "forward operator input size");
  return fn_(x);
}

/* ------------------------------------------------------------------ */
/*  Projection primitives                                              */
/* ------------------------------------------------------------------ */

Vec project_simplex_euclidean(const Vec& v) {
  const std::size_t n = v.size();
  Vec u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double running = 0.0, theta = 0.0;
  std::size_t rho = 0;
  for (std::size_t j = 0; j < n; ++j) {
    running += u[j];
    const double cand = (running - 1.0) / static_cast<double>(j + 1);
    if (u[j] - cand > 0.0) {
      rho = j + 1;
      theta = cand;
    }
  }
  (void)rho;
  Vec y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::max(v[i] - theta, 0.0);
  return y;
}

namespace {

inline double clampd(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

Vec clamp_vec(const Vec& v, const Vec& lo, const Vec& hi) {
  Vec y(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) y[i] = clampd(v[i], lo[i], hi[i]);
  return y;
}

double halfspace_value(const Vec& v, const Vec& lo, const Vec& hi, const Vec& sign, double lam) {
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j)
    s += sign[j] * clampd(v[j] - lam * sign[j], lo[j], hi[j]);
  return s;
}

}  // namespace

Vec project_box_halfspace(const Vec& v, const Vec& lower, const Vec& upper, const Vec& sign) {
  Vec y = clamp_vec(v, lower, upper);
  double slack = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) slack += sign[j] * y[j];
  if (slack <= 0.0) return y;

  // The box projection violates the halfspace, so the constraint is active:
  // y(lam) = clamp(v - lam*sign) with phi(lam) = sign . y(lam) nonincreasing
  // and piecewise linear; find its zero by exact breakpoint search.
  std::vector<double> bps;
  for (std::size_t j = 0; j < v.size(); ++j) {
    for (double bound : {lower[j], upper[j]}) {
      if (!std::isfinite(bound)) continue;
      const double lam = (v[j] - bound) / sign[j];
      if (lam > 0.0) bps.push_back(lam);
    }
  }
  std::sort(bps.begin(), bps.end());
  double lo_lam = 0.0, lo_phi = slack;
  double lam_star = bps.empty() ? 0.0 : bps.back();
  for (double bp : bps) {
    const double phi = halfspace_value(v, lower, upper, sign, bp);
    if (phi <= 0.0) {
      lam_star = (lo_phi == phi) ? bp : lo_lam + (bp - lo_lam) * lo_phi / (lo_phi - phi);
      break;
    }
    lo_lam = bp;
    lo_phi = phi;
  }
  Vec out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j)
    out[j] = clampd(v[j] - lam_star * sign[j], lower[j], upper[j]);
  return out;
}

/* ------------------------------------------------------------------ */
/*  ResolventOracle                                                    */
/* ------------------------------------------------------------------ */

ResolventOracle ResolventOracle::normal_cone_box(Vec lower, Vec upper) {
  if (lower.size() != upper.size()) fail(Errc::dimension_mismatch, "box bound sizes differ");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (lower[i] > upper[i]) fail(Errc::empty_constraint, "box has lower > upper");
  ResolventOracle b;
  b.kind_ = Kind::box;
  b.dim_ = lower.size();
  b.tau_ = 0.0;
  b.lower_ = std::move(lower);
  b.upper_ = std::move(upper);
  return b;
}

ResolventOracle ResolventOracle::normal_cone_simplex(std::size_t d) {
  if (d == 0) fail(Errc::invalid_spec, "simplex needs positive dimension");
  ResolventOracle b;
  b.kind_ = Kind::simplex;
  b.dim_ = d;
  b.tau_ = 0.0;
  return b;
}

ResolventOracle ResolventOracle::scaled_identity(std::size_t d, double c, Vec shift) {
  if (c <= 0.0) fail(Errc::invalid_spec, "scaled identity needs c > 0");
  if (shift.empty()) shift = Vec(d, 0.0);
  if (shift.size() != d) fail(Errc::dimension_mismatch, "scaled identity shift size");
  ResolventOracle b;
  b.kind_ = Kind::scaled_identity;
  b.dim_ = d;
  b.tau_ = c;
  b.scale_ = c;
  b.shift_ = std::move(shift);
  return b;
}

ResolventOracle ResolventOracle::gas_feasible(GasFeasibleData data) {
  if (data.firms == 0 || data.periods == 0) fail(Errc::invalid_spec, "gas feasible set shape");
  if (data.cost.size() != data.firms || data.capacity.size() != data.firms)
    fail(Errc::dimension_mismatch, "gas cost/capacity must be per firm");
  ResolventOracle b;
  b.kind_ = Kind::gas_feasible;
  b.dim_ = data.dimension();
  b.tau_ = 0.0;
  b.gas_ = std::move(data);
  return b;
}

ResolventOracle ResolventOracle::custom(
    std::size_t d, std::function<Vec(const LegendreGeometry&, double, const Vec&)> resolve_dual,
    std::optional<double> strong_monotonicity) {
  ResolventOracle b;
  b.kind_ = Kind::custom;
  b.dim_ = d;
  b.tau_ = strong_monotonicity;
  b.custom_ = std::move(resolve_dual);
  return b;
}

Vec ResolventOracle::resolve(const LegendreGeometry& g, double mu, const Vec& x) const {
  g.require_in_domain(x);
  return resolve_dual(g, mu, g.gradient(x));
}

Vec ResolventOracle::resolve_dual(const LegendreGeometry& g, double mu, const Vec& w) const {
  if (!(mu > 0.0)) fail(Errc::inadmissible_parameters, "resolvent step mu must be positive");
  g.require_dimension(w);
  if (g.dimension() != dim_) fail(Errc::dimension_mismatch, "resolvent/geometry dimension");
  switch (kind_) {
    case Kind::box:
      // (grad g + mu N_C)^{-1}(w) = clamp(grad g*(w)) for separable g.
      return clamp_vec(g.gradient_conjugate(w), lower_, upper_);
    case Kind::simplex: {
      if (g.structure() == GeometryStructure::euclidean) return project_simplex_euclidean(w);
      if (g.structure() == GeometryStructure::entropy) {
        // multiplicative normalization; shifting by max(w) only rescales
        const double m = *std::max_element(w.begin(), w.end());
        Vec y(w.size());
        double total = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
          y[i] = std::exp(w[i] - m);
          total += y[i];
        }
        for (auto& v : y) v /= total;
        return y;
      }
      fail(Errc::no_closed_form, "simplex resolvent under geometry '" + g.name() + "'");
    }
    case Kind::scaled_identity: {
      if (g.structure() == GeometryStructure::euclidean) {
        Vec y(w.size());
        for (std::size_t i = 0; i < w.size(); ++i)
          y[i] = (w[i] + mu * scale_ * shift_[i]) / (1.0 + mu * scale_);
        return y;
      }
      if (g.structure() == GeometryStructure::diagonal_quadratic) {
        const Vec& wt = g.weights();
        Vec y(w.size());
        for (std::size_t i = 0; i < w.size(); ++i)
          y[i] = (w[i] + mu * scale_ * shift_[i]) / (wt[i] + mu * scale_);
        return y;
      }
      fail(Errc::no_closed_form, "scaled-identity resolvent under geometry '" + g.name() + "'");
    }
    case Kind::gas_feasible: {
      if (g.structure() != GeometryStructure::euclidean)
        fail(Errc::no_closed_form, "gas feasible-set resolvent is Euclidean only");
      const auto& gd = gas_;
      const std::size_t k = gd.periods;
      Vec v = w;  // cost shift, then project per firm
      for (std::size_t i = 0; i < gd.firms; ++i)
        for (std::size_t t = 0; t < k; ++t) v[gd.in_index(i, t)] -= mu * gd.cost[i];
      Vec y(v.size());
      const double inf = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < gd.firms; ++i) {
        Vec block(2 * k), lo(2 * k, 0.0), hi(2 * k), sg(2 * k);
        for (std::size_t t = 0; t < k; ++t) {
          block[t] = v[gd.in_index(i, t)];
          block[k + t] = v[gd.out_index(i, t)];
          hi[t] = gd.capacity[i];
          hi[k + t] = inf;
          sg[t] = -1.0;  // sum_k (q_out - q_in) <= 0
          sg[k + t] = 1.0;
        }
        const Vec proj = gd.coupling ? project_box_halfspace(block, lo, hi, sg)
                                     : clamp_vec(block, lo, hi);
        for (std::size_t t = 0; t < k; ++t) {
          y[gd.in_index(i, t)] = proj[t];
          y[gd.out_index(i, t)] = proj[k + t];
        }
      }
      return y;
    }
    case Kind::custom:
      return custom_(g, mu, w);
  }
  fail(Errc::invalid_spec, "unreachable resolvent kind");
}

/* ------------------------------------------------------------------ */
/*  Constraint sets and the Bregman projection                         */
/* ------------------------------------------------------------------ */

ConstraintSet ConstraintSet::box(Vec lower, Vec upper) {
  if (lower.size() != upper.size()) fail(Errc::dimension_mismatch, "box bound sizes differ");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (lower[i] > upper[i]) fail(Errc::empty_constraint, "box has lower > upper");
  ConstraintSet c;
  c.kind = Kind::box;
  c.dim = lower.size();
  c.lower = std::move(lower);
  c.upper = std::move(upper);
  return c;
}

ConstraintSet ConstraintSet::simplex(std::size_t d) {
  if (d == 0) fail(Errc::empty_constraint, "simplex needs positive dimension");
  ConstraintSet c;
  c.kind = Kind::simplex;
  c.dim = d;
  return c;
}

Vec bregman_project(const LegendreGeometry& g, const ConstraintSet& c, const Vec& x) {
  const ResolventOracle b = (c.kind == ConstraintSet::Kind::box)
                                ? ResolventOracle::normal_cone_box(c.lower, c.upper)
                                : ResolventOracle::normal_cone_simplex(c.dim);
  return b.resolve(g, 1.0, x);
}

double natural_residual(const ForwardOperator& a, const ResolventOracle& b,
                        const LegendreGeometry& g, double mu, const Vec& x) {
  if (!(mu > 0.0)) fail(Errc::inadmissible_parameters, "natural residual needs mu > 0");
  g.require_in_domain(x);
  Vec w = g.gradient(x);
  const Vec ax = a.apply_unmetered(x);
  axpy(-mu, ax, w);
  const Vec y = b.resolve_dual(g, mu, w);
  return dist2(x, y);
}

/* ------------------------------------------------------------------ */
/*  Membership characterization                                        */
/* ------------------------------------------------------------------ */

namespace {

// Cone condition for a box coordinate: w must point outward at an active
// bound and vanish in the interior.
double box_cone_violation(double y, double lo, double hi, double w) {
  double viol = std::max(0.0, std::max(lo - y, y - hi));
  if (lo == hi) return viol;
  if (y == lo)
    viol = std::max(viol, std::max(0.0, w));
  else if (y == hi)
    viol = std::max(viol, std::max(0.0, -w));
  else
    viol = std::max(viol, std::fabs(w));
  return viol;
}

}  // namespace

double resolvent_membership_gap(const ResolventOracle& b, const LegendreGeometry& g, double mu,
                                const Vec& x, const Vec& y) {
  Vec w = g.gradient(x);
  const Vec gy = g.gradient(y);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (w[i] - gy[i]) / mu;

  switch (b.kind()) {
    case ResolventOracle::Kind::box: {
      double viol = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i)
        viol = std::max(viol, box_cone_violation(y[i], b.lower()[i], b.upper()[i], w[i]));
      return viol;
    }
    case ResolventOracle::Kind::simplex: {
      double viol = std::fabs(std::accumulate(y.begin(), y.end(), 0.0) - 1.0);
      double lambda = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < y.size(); ++i) {
        viol = std::max(viol, -y[i]);
        if (y[i] > 0.0) lambda = std::max(lambda, w[i]);
      }
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] > 0.0)
          viol = std::max(viol, std::fabs(w[i] - lambda));
        else
          viol = std::max(viol, std::max(0.0, w[i] - lambda));
      }
      return viol;
    }
    case ResolventOracle::Kind::scaled_identity: {
      double viol = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i)
        viol = std::max(viol, std::fabs(w[i] - b.scale() * (y[i] - b.shift()[i])));
      return viol;
    }
    case ResolventOracle::Kind::gas_feasible: {
      // w - cost must lie in the normal cone of the per-firm polyhedron:
      // r = nu_box + lambda * sign with lambda >= 0 and lambda complementary
      // to the coupling slack. Each coordinate confines lambda to an
      // interval; the violation is how badly the intervals fail to intersect.
      const auto& gd = b.gas();
      const std::size_t k = gd.periods;
      const double inf = std::numeric_limits<double>::infinity();
      double viol = 0.0;
      for (std::size_t i = 0; i < gd.firms; ++i) {
        double slack = 0.0;
        for (std::size_t t = 0; t < k; ++t)
          slack += y[gd.out_index(i, t)] - y[gd.in_index(i, t)];
        if (gd.coupling) viol = std::max(viol, slack);

        auto coord = [&](std::size_t idx, double lo, double hi, double sg, double& int_lo,
                         double& int_hi) {
          const double yi = y[idx];
          const double r = w[idx] - (sg < 0.0 ? gd.cost[i] : 0.0);
          viol = std::max(viol, std::max(lo - yi, yi - hi));
          if (!gd.coupling) {
            viol = std::max(viol, box_cone_violation(yi, lo, hi, r));
            return;
          }
          // interval of lambda making r - lambda*sg consistent with the bound
          if (yi == lo) {  // need r - lambda*sg <= 0
            if (sg > 0.0)
              int_lo = std::max(int_lo, r);
            else
              int_hi = std::min(int_hi, -r);
          } else if (yi == hi) {  // need r - lambda*sg >= 0
            if (sg > 0.0)
              int_hi = std::min(int_hi, r);
            else
              int_lo = std::max(int_lo, -r);
          } else {  // interior: r = lambda*sg exactly
            const double lam = r / sg;
            int_lo = std::max(int_lo, lam);
            int_hi = std::min(int_hi, lam);
          }
        };

        double int_lo = 0.0, int_hi = inf;  // lambda >= 0
        if (gd.coupling && slack < -1e-9) int_hi = 0.0;  // strict slack: lambda = 0
        for (std::size_t t = 0; t < k; ++t) {
          coord(gd.in_index(i, t), 0.0, gd.capacity[i], -1.0, int_lo, int_hi);
          coord(gd.out_index(i, t), 0.0, inf, 1.0, int_lo, int_hi);
        }
        if (gd.coupling) viol = std::max(viol, int_lo - int_hi);
      }
      return viol;
    }
    case ResolventOracle::Kind::custom:
      fail(Errc::invalid_spec, "membership characterization unavailable for custom oracles");
  }
  fail(Errc::invalid_spec, "unreachable oracle kind");
}

}  // namespace bfrb
