#include "bfrb/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace bfrb {

Vec lu_solve(Mat a, Vec b) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) fail(Errc::dimension_mismatch, "lu_solve shape");
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::fabs(a(perm[k], k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::fabs(a(perm[i], k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best < 1e-14) fail(Errc::invalid_spec, "singular matrix in lu_solve");
    std::swap(perm[k], perm[piv]);
    const std::size_t pk = perm[k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const std::size_t pi = perm[i];
      const double f = a(pi, k) / a(pk, k);
      a(pi, k) = 0.0;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(pi, j) -= f * a(pk, j);
      b[pi] -= f * b[pk];
    }
  }

  Vec x(n, 0.0);
  for (std::size_t ik = n; ik-- > 0;) {
    const std::size_t pi = perm[ik];
    double s = b[pi];
    for (std::size_t j = ik + 1; j < n; ++j) s -= a(pi, j) * x[j];
    x[ik] = s / a(pi, ik);
  }
  return x;
}

namespace {

// Power iteration for the largest eigenvalue of a symmetric PSD operator
// given as x -> op(x). Deterministic start vector.
template <typename Op>
double power_iterate(std::size_t n, Op&& op, double tol, std::size_t max_iters) {
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
  double nx = norm2(x);
  for (auto& v : x) v /= nx;
  double lambda = 0.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    Vec y = op(x);
    const double ny = norm2(y);
    if (ny == 0.0) return 0.0;
    const double next = dot(x, y);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
    if (std::fabs(next - lambda) <= tol * (1.0 + std::fabs(next))) return next;
    lambda = next;
  }
  return lambda;
}

}  // namespace

double spectral_norm(const Mat& m, double tol, std::size_t max_iters) {
  const Mat mt = m.transpose();
  const double top = power_iterate(
      m.cols(), [&](const Vec& x) { return mt.apply(m.apply(x)); }, tol, max_iters);
  return std::sqrt(std::max(0.0, top));
}

double min_eigenvalue_symmetric(const Mat& s, double tol) {
  // lambda_min(S) = shift - lambda_max(shift I - S) for shift >= lambda_max(S).
  const double shift = spectral_norm(s, tol) + 1.0;
  const double top = power_iterate(
      s.rows(),
      [&](const Vec& x) {
        Vec y = s.apply(x);
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = shift * x[i] - y[i];
        return y;
      },
      tol, 200000);
  return shift - top;
}

}  // namespace bfrb
