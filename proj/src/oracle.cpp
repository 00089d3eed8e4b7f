#include <cmath>

#include "bfrb/problems.hpp"

namespace bfrb {

/* Independent ground-truth solve. Routes:
 *   - linear A with a scaled-identity B: one direct linear solve;
 *   - linear A with a box B at small dimension: enumeration of the 3^d
 *     bound patterns with direct solves and a KKT check per pattern;
 *   - linear A over the simplex at small dimension: support enumeration;
 *   - otherwise a plain extragradient loop with step 1/(2L).
 * Every route certifies its answer with a direct natural-residual check
 * before returning it.
 */

namespace {

constexpr std::size_t kEnumLimit = 12;
constexpr double kFeasTol = 1e-9;

double certify(const ProblemInstance& p, const LegendreGeometry& geo, double mu, const Vec& x) {
  return natural_residual(p.A, p.B, geo, mu, x);
}

bool enumerate_box(const ProblemInstance& p, Vec& best, double& best_res,
                   const LegendreGeometry& geo, double mu_cert) {
  const Mat& m = *p.A.matrix();
  const Vec& b = *p.A.offset();
  const Vec& lo = p.B.lower();
  const Vec& hi = p.B.upper();
  const std::size_t d = m.rows();

  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= 3;

  std::vector<int> state(d);  // 0 free, 1 at lower, 2 at upper
  bool found = false;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    bool valid = true;
    for (std::size_t i = 0; i < d; ++i) {
      state[i] = static_cast<int>(c % 3);
      c /= 3;
      if (state[i] == 1 && !std::isfinite(lo[i])) valid = false;
      if (state[i] == 2 && !std::isfinite(hi[i])) valid = false;
    }
    if (!valid) continue;

    std::vector<std::size_t> free_idx;
    Vec x(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      if (state[i] == 0)
        free_idx.push_back(i);
      else
        x[i] = state[i] == 1 ? lo[i] : hi[i];
    }

    if (!free_idx.empty()) {
      const std::size_t nf = free_idx.size();
      Mat sys(nf, nf);
      Vec rhs(nf, 0.0);
      for (std::size_t r = 0; r < nf; ++r) {
        const std::size_t i = free_idx[r];
        double s = b[i];
        for (std::size_t j = 0; j < d; ++j) {
          if (state[j] == 0) continue;
          s += m(i, j) * x[j];
        }
        rhs[r] = -s;
        for (std::size_t cidx = 0; cidx < nf; ++cidx) sys(r, cidx) = m(i, free_idx[cidx]);
      }
      Vec xf;
      try {
        xf = lu_solve(sys, rhs);
      } catch (const Error&) {
        continue;
      }
      bool feasible = true;
      for (std::size_t r = 0; r < nf; ++r) {
        const std::size_t i = free_idx[r];
        if (xf[r] < lo[i] - kFeasTol || xf[r] > hi[i] + kFeasTol) feasible = false;
        x[i] = xf[r];
      }
      if (!feasible) continue;
    }

    // multiplier signs: -(Ax) in the normal cone
    const Vec ax = [&] {
      Vec y = m.apply(x);
      for (std::size_t i = 0; i < d; ++i) y[i] += b[i];
      return y;
    }();
    bool kkt = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (state[i] == 1 && ax[i] < -kFeasTol) kkt = false;  // lower face: Ax >= 0
      if (state[i] == 2 && ax[i] > kFeasTol) kkt = false;   // upper face: Ax <= 0
    }
    if (!kkt) continue;

    const double res = certify(p, geo, mu_cert, x);
    if (!found || res < best_res) {
      best = x;
      best_res = res;
      found = true;
    }
  }
  return found;
}

bool enumerate_simplex(const ProblemInstance& p, Vec& best, double& best_res,
                       const LegendreGeometry& geo, double mu_cert) {
  const Mat& m = *p.A.matrix();
  const Vec& b = *p.A.offset();
  const std::size_t d = m.rows();
  bool found = false;

  for (std::size_t mask = 1; mask < (std::size_t{1} << d); ++mask) {
    std::vector<std::size_t> sup;
    for (std::size_t i = 0; i < d; ++i)
      if (mask & (std::size_t{1} << i)) sup.push_back(i);
    const std::size_t ns = sup.size();

    // (Ax)_i = lambda on the support, sum x = 1
    Mat sys(ns + 1, ns + 1);
    Vec rhs(ns + 1, 0.0);
    for (std::size_t r = 0; r < ns; ++r) {
      for (std::size_t cidx = 0; cidx < ns; ++cidx) sys(r, cidx) = m(sup[r], sup[cidx]);
      sys(r, ns) = -1.0;
      rhs[r] = -b[sup[r]];
    }
    for (std::size_t cidx = 0; cidx < ns; ++cidx) sys(ns, cidx) = 1.0;
    rhs[ns] = 1.0;

    Vec sol;
    try {
      sol = lu_solve(sys, rhs);
    } catch (const Error&) {
      continue;
    }
    Vec x(d, 0.0);
    bool feasible = true;
    for (std::size_t r = 0; r < ns; ++r) {
      if (sol[r] < -kFeasTol) feasible = false;
      x[sup[r]] = std::max(sol[r], 0.0);
    }
    if (!feasible) continue;
    const double lambda = sol[ns];
    Vec ax = m.apply(x);
    for (std::size_t i = 0; i < d; ++i) ax[i] += b[i];
    bool kkt = true;
    for (std::size_t i = 0; i < d; ++i)
      if (x[i] == 0.0 && ax[i] < lambda - kFeasTol) kkt = false;
    if (!kkt) continue;

    const double res = certify(p, geo, mu_cert, x);
    if (!found || res < best_res) {
      best = x;
      best_res = res;
      found = true;
    }
  }
  return found;
}

}  // namespace

Vec oracle_solve(const ProblemInstance& p, double precision) {
  if (!(precision > 0.0)) fail(Errc::invalid_spec, "oracle precision must be positive");
  const std::size_t d = p.A.dimension();
  const LegendreGeometry geo = LegendreGeometry::euclidean(d);

  double lip = p.A.lipschitz().value_or(-1.0);
  if (lip < 0.0 && p.A.matrix()) lip = spectral_norm(*p.A.matrix());
  const double mu_cert = lip > 0.0 ? 1.0 / (2.0 * lip) : 1.0;

  if (p.A.matrix()) {
    if (p.B.kind() == ResolventOracle::Kind::scaled_identity) {
      // 0 = M z + b + c (z - shift)
      Mat sys = *p.A.matrix();
      for (std::size_t i = 0; i < d; ++i) sys(i, i) += p.B.scale();
      Vec rhs(d);
      for (std::size_t i = 0; i < d; ++i)
        rhs[i] = p.B.scale() * p.B.shift()[i] - (*p.A.offset())[i];
      const Vec z = lu_solve(sys, rhs);
      if (certify(p, geo, mu_cert, z) <= precision) return z;
    }
    if (p.B.kind() == ResolventOracle::Kind::box && d <= kEnumLimit) {
      Vec best;
      double best_res = 0.0;
      if (enumerate_box(p, best, best_res, geo, mu_cert) && best_res <= precision) return best;
    }
    if (p.B.kind() == ResolventOracle::Kind::simplex && d <= kEnumLimit) {
      Vec best;
      double best_res = 0.0;
      if (enumerate_simplex(p, best, best_res, geo, mu_cert) && best_res <= precision) return best;
    }
  }

  // extragradient fallback
  if (!(lip >= 0.0))
    fail(Errc::oracle_failure, "extragradient fallback needs a Lipschitz constant");
  const double mu = lip > 0.0 ? 1.0 / (2.0 * lip) : 1.0;
  Vec x = p.v1;
  const long budget = 5'000'000;
  for (long k = 0; k < budget; ++k) {
    Vec ax = p.A.apply_unmetered(x);
    Vec w = x;
    axpy(-mu, ax, w);
    const Vec y = p.B.resolve_dual(geo, mu, w);
    Vec ay = p.A.apply_unmetered(y);
    Vec w2 = x;
    axpy(-mu, ay, w2);
    x = p.B.resolve_dual(geo, mu, w2);
    if (!(norm2(x) <= 1e14)) fail(Errc::oracle_failure, "extragradient diverged");
    if (k % 64 == 0 || k == budget - 1) {
      if (certify(p, geo, mu, x) <= precision) return x;
    }
  }
  if (certify(p, geo, mu, x) <= precision) return x;
  fail(Errc::oracle_failure, "oracle did not reach the requested precision for '" + p.label + "'");
}

}  // namespace bfrb
