#pragma once
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bfrb/errors.hpp"
#include "bfrb/vec.hpp"

namespace bfrb {

/* Legendre-function geometries and Bregman-distance machinery.
 *
 * A geometry packages a strongly convex Legendre function g together with
 * its gradient, the conjugate gradient (the inverse map of the gradient),
 * the strong convexity modulus gamma, and a domain descriptor. Every solver
 * step is expressed through these maps, so swapping the geometry swaps the
 * whole method from classical (Euclidean) to mirror-descent style updates.
 */

enum class DomainKind { all_space, positive_orthant, open_box };

struct DomainDescriptor {
  DomainKind kind = DomainKind::all_space;
  Vec lower, upper;  // only for open_box

  bool contains(const Vec& x) const;
};

// Structural tag used by resolvent closed forms to dispatch on the gradient shape.
enum class GeometryStructure { euclidean, diagonal_quadratic, entropy, custom };

class LegendreGeometry {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using MapFn = std::function<Vec(const Vec&)>;
  using DistFn = std::function<double(const Vec&, const Vec&)>;

  LegendreGeometry(std::string name, std::size_t dimension, double gamma,
                   DomainDescriptor domain, GeometryStructure structure, ValueFn value,
                   MapFn gradient, MapFn gradient_conjugate, DistFn distance = nullptr,
                   Vec weights = {});

  const std::string& name() const { return name_; }
  std::size_t dimension() const { return dim_; }
  double gamma() const { return gamma_; }
  const DomainDescriptor& domain() const { return domain_; }
  GeometryStructure structure() const { return structure_; }
  const Vec& weights() const { return weights_; }  // diagonal_quadratic only

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  // Inverse of the gradient map; takes a dual-space point, no primal domain check.
  Vec gradient_conjugate(const Vec& y) const;

  void require_in_domain(const Vec& x) const;  // throws DOMAIN_VIOLATION / DIMENSION_MISMATCH
  void require_dimension(const Vec& x) const;

  // D_g(x, y) = g(x) - g(y) - <grad g(y), x - y>, evaluated through the fused
  // per-geometry formula when one is installed (quadratics, KL divergence).
  double distance(const Vec& x, const Vec& y) const;

  static LegendreGeometry euclidean(std::size_t d);
  static LegendreGeometry weighted_quadratic(Vec weights);
  // gamma is declared by the caller against the 2-norm on the region the caller
  // intends to work in; entropy is not globally strongly convex on the orthant.
  static LegendreGeometry shannon_entropy(std::size_t d, double gamma);

 private:
  std::string name_;
  std::size_t dim_;
  double gamma_;
  DomainDescriptor domain_;
  GeometryStructure structure_;
  ValueFn value_;
  MapFn grad_, grad_conj_;
  DistFn dist_;
  Vec weights_;
};

double bregman_distance(const LegendreGeometry& g, const Vec& x, const Vec& y);

// |D(x,y) + D(y,z) - D(x,z) - <grad g(z) - grad g(y), x - y>|; zero in exact arithmetic.
double three_point_gap(const LegendreGeometry& g, const Vec& x, const Vec& y, const Vec& z);

struct ConvexityReport {
  bool pass = false;
  double min_ratio = 0.0;       // min over pairs of D(x,y) / (0.5*|x-y|^2)
  std::size_t pairs_checked = 0;
  std::size_t worst_pair = 0;
};

// Checks D_g(x,y) >= (gamma/2)|x-y|^2 over the sample pairs; fails when any
// ratio drops below gamma*(1 - 1e-8). Pairs with x == y are skipped.
ConvexityReport strong_convexity_certificate(const LegendreGeometry& g,
                                             const std::vector<std::pair<Vec, Vec>>& samples);

}  // namespace bfrb
