#pragma once

// Objective components, feasible sets, projections and the sampled
// validators for the problem assumptions (convex sum, compact set, bounded
// and Lipschitz gradients).

#include "distopt/common.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace distopt {

/// f(x) = 1/2 x'Ax + b'x + c with A symmetric.
struct QuadraticForm {
  Matrix a;
  Point b;
  double c = 0.0;

  int dimension() const { return static_cast<int>(b.size()); }
  double value(const Point& x) const { return 0.5 * x.dot(a * x) + b.dot(x) + c; }
  Point gradient(const Point& x) const { return a * x + b; }
};

/// f(x) = sum_d sum_p coeffs[d][p] * x_d^p.
struct SeparablePolynomial {
  std::vector<std::vector<double>> coeffs;

  int dimension() const { return static_cast<int>(coeffs.size()); }
};

/// Quadratic plus sum_d amplitude_d * sin(frequency_d * x_d).
struct SinePerturbedQuadratic {
  QuadraticForm quad;
  Point amplitude;
  Point frequency;

  int dimension() const { return quad.dimension(); }
};

enum class Family { kQuadratic, kPolynomialSeparable, kSinePerturbedQuadratic };

const char* family_name(Family f);
Family parse_family(const std::string& name);

/// One agent's private objective f_i with its declared gradient bound L_i
/// and gradient Lipschitz constant N_i.
class ComponentFunction {
 public:
  using Params =
      std::variant<QuadraticForm, SeparablePolynomial, SinePerturbedQuadratic>;

  ComponentFunction(std::string id, Params params, double grad_bound,
                    double lipschitz);

  static ComponentFunction quadratic(std::string id, Matrix a, Point b,
                                     double c, double grad_bound,
                                     double lipschitz);
  static ComponentFunction polynomial(std::string id,
                                      std::vector<std::vector<double>> coeffs,
                                      double grad_bound, double lipschitz);
  static ComponentFunction sine_quadratic(std::string id, QuadraticForm quad,
                                          Point amplitude, Point frequency,
                                          double grad_bound, double lipschitz);

  const std::string& id() const { return id_; }
  Family family() const;
  int dimension() const { return dimension_; }
  const Params& params() const { return params_; }
  double grad_bound() const { return grad_bound_; }
  double lipschitz() const { return lipschitz_; }

  double value(const Point& x) const;
  Point gradient(const Point& x) const;

  /// Same function, new declared constants.
  ComponentFunction with_bounds(double grad_bound, double lipschitz) const;
  ComponentFunction with_id(std::string id) const;
  /// s * f; declared constants scale by |s|.
  ComponentFunction scaled(double s) const;
  /// f + q. Throws ConfigError when q cannot be represented in this family
  /// (a non-diagonal q added to a separable polynomial). Declared constants
  /// are left unchanged; callers recompute them.
  ComponentFunction plus(const QuadraticForm& q) const;

 private:
  std::string id_;
  Params params_;
  int dimension_;
  double grad_bound_;
  double lipschitz_;
};

double eval_component(const ComponentFunction& c, const Point& p);
Point grad_component(const ComponentFunction& c, const Point& p);

struct Box {
  Point lo;
  Point hi;
};

struct Ball {
  Point center;
  double radius = 1.0;
};

/// Non-empty compact convex set with an exact Euclidean projection.
class FeasibleSet {
 public:
  using Variant = std::variant<Box, Ball>;

  static FeasibleSet box(Point lo, Point hi);
  static FeasibleSet ball(Point center, double radius);

  int dimension() const;
  bool is_box() const { return std::holds_alternative<Box>(variant_); }
  const Variant& variant() const { return variant_; }

  Point project(const Point& p) const;
  double distance(const Point& p) const { return (project(p) - p).norm(); }
  bool contains(const Point& p, double tol = 0.0) const;
  /// True iff every point within `margin` of p (in each coordinate
  /// direction) lies in the set.
  bool contains_with_margin(const Point& p, double margin) const;
  /// max over the set of ||x||.
  double max_norm() const;
  /// Range of coordinate d over the set.
  std::pair<double, double> coordinate_range(int d) const;
  /// Axis-aligned bounding box.
  Box bounding_box() const;

 private:
  explicit FeasibleSet(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

Point project(const FeasibleSet& set, const Point& p);

class Rng;
/// Uniform sample from the set (ball: uniform direction, radius via the
/// D-th-root transform).
Point sample_uniform(const FeasibleSet& set, Rng& rng);

struct Problem {
  int dimension = 0;
  std::vector<ComponentFunction> components;
  FeasibleSet set;

  int n_agents() const { return static_cast<int>(components.size()); }
  double value(const Point& x) const;
  Point gradient(const Point& x) const;
  double sum_grad_bounds() const;
  double sum_lipschitz() const;
  /// Structural checks (S >= 1, D >= 1, matching dimensions). Throws
  /// ConfigError.
  void check_structure() const;
};

struct GradientCheckReport {
  double max_relative_error = 0.0;
  int checked = 0;
  int skipped = 0;
  std::vector<std::string> warnings;
};

/// Central-difference comparison of the analytic gradient. Relative error is
/// ||fd - g|| / max(1, ||g||). Points closer than h to the boundary of `set`
/// are skipped with a warning.
GradientCheckReport check_gradient(const ComponentFunction& c,
                                   const std::vector<Point>& pts, double h,
                                   const std::optional<FeasibleSet>& set = {});

struct BoundEstimate {
  double l_hat = 0.0;
  double n_hat = 0.0;
  bool l_violated = false;
  bool n_violated = false;
  bool ok() const { return !l_violated && !n_violated; }
};

BoundEstimate estimate_bounds(const ComponentFunction& c,
                              const FeasibleSet& set, int n_samples,
                              std::uint64_t seed);

struct AnalyticBounds {
  double grad_bound = 0.0;
  double lipschitz = 0.0;
};

/// Rigorous upper bounds on sup ||g|| and the gradient Lipschitz constant
/// over the set, from the family's closed form.
AnalyticBounds analytic_bounds(const ComponentFunction& c,
                               const FeasibleSet& set);

struct ConvexityVerdict {
  bool pass = true;
  int violations = 0;
  int checked = 0;
  double worst_excess = 0.0;
};

/// Sampled falsifier for convexity of the sum: f(lx+(1-l)y) <= l f(x) +
/// (1-l) f(y) + 1e-9 (1 + |f|) for l in {0.25, 0.5, 0.75}.
ConvexityVerdict verify_sum_convexity(const Problem& prob, int n_pairs,
                                      std::uint64_t seed);

}  // namespace distopt
