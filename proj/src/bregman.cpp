#include "bfrb/bregman.hpp"

#include <cmath>
#include <utility>

namespace bfrb {

namespace {
// Entropy inputs this close to the boundary are rejected rather than clamped;
// silent clamping would corrupt the distances.
constexpr double kPositivityFloor = 1e-300;
}  // namespace

bool DomainDescriptor::contains(const Vec& x) const {
  switch (kind) {
    case DomainKind::all_space:
      return all_finite(x);
    case DomainKind::positive_orthant:
      for (double v : x)
        if (!(v > kPositivityFloor) || !std::isfinite(v)) return false;
      return true;
    case DomainKind::open_box:
      for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] > lower[i]) || !(x[i] < upper[i])) return false;
      return true;
  }
  return false;
}

LegendreGeometry::LegendreGeometry(std::string name, std::size_t dimension, double gamma,
                                   DomainDescriptor domain, GeometryStructure structure,
                                   ValueFn value, MapFn gradient, MapFn gradient_conjugate,
                                   DistFn distance, Vec weights)
    : name_(std::move(name)),
      dim_(dimension),
      gamma_(gamma),
      domain_(std::move(domain)),
      structure_(structure),
      value_(std::move(value)),
      grad_(std::move(gradient)),
      grad_conj_(std::move(gradient_conjugate)),
      dist_(std::move(distance)),
      weights_(std::move(weights)) {
  if (gamma_ <= 0.0) fail(Errc::invalid_spec, "geometry modulus gamma must be positive");
}

void LegendreGeometry::require_dimension(const Vec& x) const {
  if (x.size() != dim_)
    fail(Errc::dimension_mismatch,
         "geometry '" + name_ + "' expects dimension " + std::to_string(dim_) + ", got " +
             std::to_string(x.size()));
}

void LegendreGeometry::require_in_domain(const Vec& x) const {
  require_dimension(x);
  if (!domain_.contains(x))
    fail(Errc::domain_violation, "point outside the domain of geometry '" + name_ + "'");
}

double LegendreGeometry::value(const Vec& x) const {
  require_in_domain(x);
  return value_(x);
}

Vec LegendreGeometry::gradient(const Vec& x) const {
  require_in_domain(x);
  return grad_(x);
}

Vec LegendreGeometry::gradient_conjugate(const Vec& y) const {
  require_dimension(y);
  return grad_conj_(y);
}

double LegendreGeometry::distance(const Vec& x, const Vec& y) const {
  require_in_domain(x);
  require_in_domain(y);
  if (dist_) return dist_(x, y);
  const Vec gy = grad_(y);
  double inner = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) inner += gy[i] * (x[i] - y[i]);
  return value_(x) - value_(y) - inner;
}

LegendreGeometry LegendreGeometry::euclidean(std::size_t d) {
  return LegendreGeometry(
      "euclidean", d, 1.0, DomainDescriptor{}, GeometryStructure::euclidean,
      [](const Vec& x) { return 0.5 * dot(x, x); }, [](const Vec& x) { return x; },
      [](const Vec& y) { return y; },
      [](const Vec& x, const Vec& y) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double d = x[i] - y[i];
          s += d * d;
        }
        return 0.5 * s;
      });
}

LegendreGeometry LegendreGeometry::weighted_quadratic(Vec weights) {
  if (weights.empty()) fail(Errc::invalid_spec, "weighted geometry needs at least one weight");
  double wmin = weights[0];
  for (double w : weights) {
    if (!(w > 0.0)) fail(Errc::invalid_spec, "weighted geometry weights must be positive");
    wmin = std::min(wmin, w);
  }
  const std::size_t d = weights.size();
  Vec w = weights;
  return LegendreGeometry(
      "weighted", d, wmin, DomainDescriptor{}, GeometryStructure::diagonal_quadratic,
      [w](const Vec& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i] * x[i];
        return 0.5 * s;
      },
      [w](const Vec& x) {
        Vec g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = w[i] * x[i];
        return g;
      },
      [w](const Vec& y) {
        Vec x(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] / w[i];
        return x;
      },
      [w](const Vec& x, const Vec& y) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double d = x[i] - y[i];
          s += w[i] * d * d;
        }
        return 0.5 * s;
      },
      std::move(weights));
}

LegendreGeometry LegendreGeometry::shannon_entropy(std::size_t d, double gamma) {
  DomainDescriptor dom;
  dom.kind = DomainKind::positive_orthant;
  return LegendreGeometry(
      "entropy", d, gamma, dom, GeometryStructure::entropy,
      [](const Vec& x) {
        double s = 0.0;
        for (double v : x) s += v * std::log(v) - v;
        return s;
      },
      [](const Vec& x) {
        Vec g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = std::log(x[i]);
        return g;
      },
      [](const Vec& y) {
        Vec x(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) x[i] = std::exp(y[i]);
        return x;
      },
      // generalized Kullback-Leibler divergence
      [](const Vec& x, const Vec& y) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
          s += x[i] * std::log(x[i] / y[i]) - x[i] + y[i];
        return s;
      });
}

double bregman_distance(const LegendreGeometry& g, const Vec& x, const Vec& y) {
  return g.distance(x, y);
}

double three_point_gap(const LegendreGeometry& g, const Vec& x, const Vec& y, const Vec& z) {
  g.require_in_domain(x);
  g.require_in_domain(y);
  g.require_in_domain(z);
  const Vec gy = g.gradient(y);
  const Vec gz = g.gradient(z);
  double inner = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) inner += (gz[i] - gy[i]) * (x[i] - y[i]);
  const double lhs = g.distance(x, y) + g.distance(y, z) - g.distance(x, z);
  return std::fabs(lhs - inner);
}

ConvexityReport strong_convexity_certificate(const LegendreGeometry& g,
                                             const std::vector<std::pair<Vec, Vec>>& samples) {
  if (samples.empty()) fail(Errc::empty_samples, "strong_convexity_certificate needs samples");
  ConvexityReport rep;
  rep.pass = true;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& [x, y] = samples[k];
    const double half_sq = 0.5 * dist2(x, y) * dist2(x, y);
    if (half_sq == 0.0) continue;  // x == y carries no modulus information
    const double ratio = g.distance(x, y) / half_sq;
    ++rep.pairs_checked;
    if (ratio < rep.min_ratio) {
      rep.min_ratio = ratio;
      rep.worst_pair = k;
    }
    if (ratio < g.gamma() * (1.0 - 1e-8)) rep.pass = false;
  }
  if (rep.pairs_checked == 0) fail(Errc::empty_samples, "all sample pairs were degenerate");
  return rep;
}

}  // namespace bfrb
