#include "distopt/problem.hpp"

#include "distopt/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace distopt {

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "validation failed (" << violations.size() << " violation"
           << (violations.size() == 1 ? "" : "s") << ")";
        for (const auto& v : violations) os << "\n  - " << v;
        return os.str();
      }()),
      violations_(std::move(violations)) {}

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dim(const Point& p, int dim, const char* what) {
  if (p.size() != dim) {
    std::ostringstream os;
    os << what << ": dimension mismatch (expected " << dim << ", got "
       << p.size() << ")";
    throw ConfigError(os.str());
  }
}

double poly_eval(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t p = 1; p < c.size(); ++p)
    d.push_back(static_cast<double>(p) * c[p]);
  return d;
}

void trim(std::vector<double>& c) {
  while (!c.empty() && c.back() == 0.0) c.pop_back();
}

// Real roots of a polynomial via companion-matrix eigenvalues.
std::vector<double> real_roots(std::vector<double> c) {
  trim(c);
  std::vector<double> roots;
  if (c.size() <= 1) return roots;
  const int n = static_cast<int>(c.size()) - 1;
  if (n == 1) {
    roots.push_back(-c[0] / c[1]);
    return roots;
  }
  Matrix companion = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[i] / c[n];
  Eigen::EigenSolver<Matrix> es(companion, false);
  for (int i = 0; i < n; ++i) {
    const auto ev = es.eigenvalues()[i];
    if (std::abs(ev.imag()) <= 1e-9 * (1.0 + std::abs(ev.real())))
      roots.push_back(ev.real());
  }
  return roots;
}

// max |p(x)| over [lo, hi]: endpoints plus interior critical points.
double max_abs_on_interval(const std::vector<double>& c, double lo,
                           double hi) {
  double best = std::max(std::abs(poly_eval(c, lo)), std::abs(poly_eval(c, hi)));
  for (double r : real_roots(poly_derivative(c))) {
    // Polish the eigenvalue root with a couple of Newton steps on p'.
    const auto d1 = poly_derivative(c);
    const auto d2 = poly_derivative(d1);
    for (int it = 0; it < 3; ++it) {
      const double den = poly_eval(d2, r);
      if (den == 0.0) break;
      r -= poly_eval(d1, r) / den;
    }
    if (r > lo && r < hi) best = std::max(best, std::abs(poly_eval(c, r)));
  }
  return best;
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// sup over the set of ||A x + b||.
double affine_norm_sup(const Matrix& a, const Point& b, const FeasibleSet& set) {
  if (const auto* box = std::get_if<Box>(&set.variant())) {
    const int d = static_cast<int>(b.size());
    if (d <= 16) {
      // Convex function: the maximum over a box is attained at a vertex.
      double best = 0.0;
      Point v(d);
      for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
        for (int i = 0; i < d; ++i)
          v[i] = (mask >> i) & 1u ? box->hi[i] : box->lo[i];
        best = std::max(best, (a * v + b).norm());
      }
      return best;
    }
    return spectral_norm(a) * set.max_norm() + b.norm();
  }
  const auto& ball = std::get<Ball>(set.variant());
  return (a * ball.center + b).norm() + spectral_norm(a) * ball.radius;
}

void check_symmetric(const Matrix& a, int dim) {
  if (a.rows() != dim || a.cols() != dim)
    throw ConfigError("quadratic: matrix A must be D x D");
  if (!a.allFinite()) throw ConfigError("quadratic: A has non-finite entries");
  const double scale = 1.0 + a.cwiseAbs().maxCoeff();
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ConfigError("quadratic: matrix A must be symmetric");
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::kQuadratic:
      return "quadratic";
    case Family::kPolynomialSeparable:
      return "polynomial-separable";
    case Family::kSinePerturbedQuadratic:
      return "sine-perturbed-quadratic";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  if (name == "quadratic") return Family::kQuadratic;
  if (name == "polynomial-separable") return Family::kPolynomialSeparable;
  if (name == "sine-perturbed-quadratic") return Family::kSinePerturbedQuadratic;
  throw ConfigError("unknown component family '" + name + "'");
}

ComponentFunction::ComponentFunction(std::string id, Params params,
                                     double grad_bound, double lipschitz)
    : id_(std::move(id)),
      params_(std::move(params)),
      dimension_(std::visit([](const auto& p) { return p.dimension(); }, params_)),
      grad_bound_(grad_bound),
      lipschitz_(lipschitz) {
  if (dimension_ < 1) throw ConfigError("component '" + id_ + "': dimension must be >= 1");
  if (!(grad_bound_ >= 0.0) || !std::isfinite(grad_bound_))
    throw ConfigError("component '" + id_ + "': grad_bound must be finite and >= 0");
  if (!(lipschitz_ > 0.0) || !std::isfinite(lipschitz_))
    throw ConfigError("component '" + id_ + "': lipschitz must be finite and > 0");
  std::visit(Overloaded{
                 [&](const QuadraticForm& q) {
                   check_symmetric(q.a, dimension_);
                   if (!q.b.allFinite() || !std::isfinite(q.c))
                     throw ConfigError("component '" + id_ + "': non-finite b or c");
                 },
                 [&](const SeparablePolynomial& p) {
                   for (const auto& row : p.coeffs)
                     for (double v : row)
                       if (!std::isfinite(v))
                         throw ConfigError("component '" + id_ + "': non-finite coefficient");
                 },
                 [&](const SinePerturbedQuadratic& s) {
                   check_symmetric(s.quad.a, dimension_);
                   if (s.amplitude.size() != dimension_ || s.frequency.size() != dimension_)
                     throw ConfigError("component '" + id_ +
                                       "': amplitude/frequency length must equal D");
                   if (!s.amplitude.allFinite() || !s.frequency.allFinite())
                     throw ConfigError("component '" + id_ + "': non-finite sine parameters");
                 },
             },
             params_);
}

ComponentFunction ComponentFunction::quadratic(std::string id, Matrix a, Point b,
                                               double c, double grad_bound,
                                               double lipschitz) {
  return {std::move(id), QuadraticForm{std::move(a), std::move(b), c}, grad_bound,
          lipschitz};
}

ComponentFunction ComponentFunction::polynomial(
    std::string id, std::vector<std::vector<double>> coeffs, double grad_bound,
    double lipschitz) {
  return {std::move(id), SeparablePolynomial{std::move(coeffs)}, grad_bound, lipschitz};
}

ComponentFunction ComponentFunction::sine_quadratic(std::string id,
                                                    QuadraticForm quad,
                                                    Point amplitude,
                                                    Point frequency,
                                                    double grad_bound,
                                                    double lipschitz) {
  return {std::move(id),
          SinePerturbedQuadratic{std::move(quad), std::move(amplitude), std::move(frequency)},
          grad_bound, lipschitz};
}

Family ComponentFunction::family() const {
  return std::visit(Overloaded{
                        [](const QuadraticForm&) { return Family::kQuadratic; },
                        [](const SeparablePolynomial&) { return Family::kPolynomialSeparable; },
                        [](const SinePerturbedQuadratic&) {
                          return Family::kSinePerturbedQuadratic;
                        },
                    },
                    params_);
}

double ComponentFunction::value(const Point& x) const {
  require_dim(x, dimension_, id_.c_str());
  return std::visit(Overloaded{
                        [&](const QuadraticForm& q) { return q.value(x); },
                        [&](const SeparablePolynomial& p) {
                          double acc = 0.0;
                          for (int d = 0; d < dimension_; ++d)
                            acc += poly_eval(p.coeffs[d], x[d]);
                          return acc;
                        },
                        [&](const SinePerturbedQuadratic& s) {
                          double acc = s.quad.value(x);
                          for (int d = 0; d < dimension_; ++d)
                            acc += s.amplitude[d] * std::sin(s.frequency[d] * x[d]);
                          return acc;
                        },
                    },
                    params_);
}

Point ComponentFunction::gradient(const Point& x) const {
  require_dim(x, dimension_, id_.c_str());
  return std::visit(Overloaded{
                        [&](const QuadraticForm& q) -> Point { return q.gradient(x); },
                        [&](const SeparablePolynomial& p) -> Point {
                          Point g(dimension_);
                          for (int d = 0; d < dimension_; ++d)
                            g[d] = poly_eval(poly_derivative(p.coeffs[d]), x[d]);
                          return g;
                        },
                        [&](const SinePerturbedQuadratic& s) -> Point {
                          Point g = s.quad.gradient(x);
                          for (int d = 0; d < dimension_; ++d)
                            g[d] += s.amplitude[d] * s.frequency[d] *
                                    std::cos(s.frequency[d] * x[d]);
                          return g;
                        },
                    },
                    params_);
}

ComponentFunction ComponentFunction::with_bounds(double grad_bound,
                                                 double lipschitz) const {
  return {id_, params_, grad_bound, lipschitz};
}

ComponentFunction ComponentFunction::with_id(std::string id) const {
  return {std::move(id), params_, grad_bound_, lipschitz_};
}

ComponentFunction ComponentFunction::scaled(double s) const {
  Params p = std::visit(Overloaded{
                            [&](const QuadraticForm& q) -> Params {
                              return QuadraticForm{s * q.a, s * q.b, s * q.c};
                            },
                            [&](const SeparablePolynomial& poly) -> Params {
                              auto c = poly.coeffs;
                              for (auto& row : c)
                                for (double& v : row) v *= s;
                              return SeparablePolynomial{std::move(c)};
                            },
                            [&](const SinePerturbedQuadratic& sq) -> Params {
                              return SinePerturbedQuadratic{
                                  QuadraticForm{s * sq.quad.a, s * sq.quad.b, s * sq.quad.c},
                                  s * sq.amplitude, sq.frequency};
                            },
                        },
                        params_);
  const double f = std::abs(s);
  return {id_, std::move(p), f * grad_bound_,
          std::max(f * lipschitz_, std::numeric_limits<double>::min())};
}

ComponentFunction ComponentFunction::plus(const QuadraticForm& q) const {
  if (q.dimension() != dimension_ || q.a.rows() != dimension_ || q.a.cols() != dimension_)
    throw ConfigError("component '" + id_ + "': perturbation dimension mismatch");
  Params p = std::visit(
      Overloaded{
          [&](const QuadraticForm& base) -> Params {
            return QuadraticForm{base.a + q.a, base.b + q.b, base.c + q.c};
          },
          [&](const SeparablePolynomial& poly) -> Params {
            Matrix off = q.a;
            off.diagonal().setZero();
            if (off.cwiseAbs().maxCoeff() != 0.0)
              throw ConfigError("component '" + id_ +
                                "': polynomial-separable family is not closed under a "
                                "non-diagonal quadratic perturbation");
            auto c = poly.coeffs;
            for (int d = 0; d < dimension_; ++d) {
              if (c[d].size() < 3) c[d].resize(3, 0.0);
              c[d][1] += q.b[d];
              c[d][2] += 0.5 * q.a(d, d);
            }
            // Constant term carried on the first coordinate.
            if (c[0].empty()) c[0].resize(1, 0.0);
            c[0][0] += q.c;
            return SeparablePolynomial{std::move(c)};
          },
          [&](const SinePerturbedQuadratic& sq) -> Params {
            return SinePerturbedQuadratic{
                QuadraticForm{sq.quad.a + q.a, sq.quad.b + q.b, sq.quad.c + q.c},
                sq.amplitude, sq.frequency};
          },
      },
      params_);
  return {id_, std::move(p), grad_bound_, lipschitz_};
}

double eval_component(const ComponentFunction& c, const Point& p) { return c.value(p); }
Point grad_component(const ComponentFunction& c, const Point& p) { return c.gradient(p); }

// ---------------------------------------------------------------------------
// Feasible sets

FeasibleSet FeasibleSet::box(Point lo, Point hi) {
  if (lo.size() < 1 || lo.size() != hi.size())
    throw ConfigError("box: lo and hi must have the same positive length");
  if (!lo.allFinite() || !hi.allFinite())
    throw ConfigError("box: bounds must be finite");
  if ((lo.array() > hi.array()).any())
    throw ConfigError("box: lo must be <= hi componentwise (empty set)");
  return FeasibleSet(Box{std::move(lo), std::move(hi)});
}

FeasibleSet FeasibleSet::ball(Point center, double radius) {
  if (center.size() < 1) throw ConfigError("ball: center must be non-empty");
  if (!center.allFinite() || !std::isfinite(radius))
    throw ConfigError("ball: parameters must be finite");
  if (!(radius > 0.0)) throw ConfigError("ball: radius must be > 0");
  return FeasibleSet(Ball{std::move(center), radius});
}

int FeasibleSet::dimension() const {
  return std::visit(Overloaded{
                        [](const Box& b) { return static_cast<int>(b.lo.size()); },
                        [](const Ball& b) { return static_cast<int>(b.center.size()); },
                    },
                    variant_);
}

Point FeasibleSet::project(const Point& p) const {
  require_dim(p, dimension(), "project");
  if (!p.allFinite()) throw ConfigError("project: point has non-finite coordinates");
  return std::visit(Overloaded{
                        [&](const Box& b) -> Point {
                          return p.cwiseMax(b.lo).cwiseMin(b.hi);
                        },
                        [&](const Ball& b) -> Point {
                          const Point d = p - b.center;
                          const double n = d.norm();
                          if (n <= b.radius) return p;
                          Point out = b.center + (b.radius / n) * d;
                          // Rounding can leave the scaled point a hair outside.
                          const double m = (out - b.center).norm();
                          if (m > b.radius) out = b.center + (b.radius / m) * (out - b.center);
                          return out;
                        },
                    },
                    variant_);
}

bool FeasibleSet::contains(const Point& p, double tol) const {
  if (p.size() != dimension() || !p.allFinite()) return false;
  return std::visit(Overloaded{
                        [&](const Box& b) {
                          return ((p.array() >= b.lo.array() - tol) &&
                                  (p.array() <= b.hi.array() + tol))
                              .all();
                        },
                        [&](const Ball& b) { return (p - b.center).norm() <= b.radius + tol; },
                    },
                    variant_);
}

bool FeasibleSet::contains_with_margin(const Point& p, double margin) const {
  if (p.size() != dimension()) return false;
  return std::visit(Overloaded{
                        [&](const Box& b) {
                          return ((p.array() - margin >= b.lo.array()) &&
                                  (p.array() + margin <= b.hi.array()))
                              .all();
                        },
                        [&](const Ball& b) {
                          return (p - b.center).norm() + margin <= b.radius;
                        },
                    },
                    variant_);
}

double FeasibleSet::max_norm() const {
  return std::visit(Overloaded{
                        [](const Box& b) {
                          return b.lo.cwiseAbs().cwiseMax(b.hi.cwiseAbs()).norm();
                        },
                        [](const Ball& b) { return b.center.norm() + b.radius; },
                    },
                    variant_);
}

std::pair<double, double> FeasibleSet::coordinate_range(int d) const {
  return std::visit(Overloaded{
                        [&](const Box& b) { return std::pair{b.lo[d], b.hi[d]}; },
                        [&](const Ball& b) {
                          return std::pair{b.center[d] - b.radius, b.center[d] + b.radius};
                        },
                    },
                    variant_);
}

Box FeasibleSet::bounding_box() const {
  const int d = dimension();
  Box out{Point(d), Point(d)};
  for (int i = 0; i < d; ++i) std::tie(out.lo[i], out.hi[i]) = coordinate_range(i);
  return out;
}

Point project(const FeasibleSet& set, const Point& p) { return set.project(p); }

Point sample_uniform(const FeasibleSet& set, Rng& rng) {
  const int dim = set.dimension();
  return std::visit(Overloaded{
                        [&](const Box& b) -> Point {
                          Point x(dim);
                          for (int i = 0; i < dim; ++i) x[i] = rng.uniform(b.lo[i], b.hi[i]);
                          return x;
                        },
                        [&](const Ball& b) -> Point {
                          Point dir(dim);
                          double n = 0.0;
                          do {
                            for (int i = 0; i < dim; ++i) dir[i] = rng.normal();
                            n = dir.norm();
                          } while (n == 0.0);
                          const double r = b.radius * std::pow(rng.uniform(), 1.0 / dim);
                          return set.project(b.center + (r / n) * dir);
                        },
                    },
                    set.variant());
}

// ---------------------------------------------------------------------------
// Problem

double Problem::value(const Point& x) const {
  double acc = 0.0;
  for (const auto& c : components) acc += c.value(x);
  return acc;
}

Point Problem::gradient(const Point& x) const {
  Point g = Point::Zero(dimension);
  for (const auto& c : components) g += c.gradient(x);
  return g;
}

double Problem::sum_grad_bounds() const {
  double s = 0.0;
  for (const auto& c : components) s += c.grad_bound();
  return s;
}

double Problem::sum_lipschitz() const {
  double s = 0.0;
  for (const auto& c : components) s += c.lipschitz();
  return s;
}

void Problem::check_structure() const {
  if (dimension < 1) throw ConfigError("problem: dimension must be >= 1");
  if (components.empty()) throw ConfigError("problem: at least one component required");
  if (set.dimension() != dimension)
    throw ConfigError("problem: feasible set dimension does not match problem dimension");
  for (const auto& c : components)
    if (c.dimension() != dimension)
      throw ConfigError("problem: component '" + c.id() + "' has dimension " +
                        std::to_string(c.dimension()) + ", expected " +
                        std::to_string(dimension));
}

// ---------------------------------------------------------------------------
// Validators

GradientCheckReport check_gradient(const ComponentFunction& c,
                                   const std::vector<Point>& pts, double h,
                                   const std::optional<FeasibleSet>& set) {
  if (!(h > 0.0 && h <= 1e-2)) throw ConfigError("check_gradient: h must be in (0, 1e-2]");
  GradientCheckReport report;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point& x = pts[i];
    if (set && !set->contains_with_margin(x, h)) {
      ++report.skipped;
      report.warnings.push_back("point " + std::to_string(i) +
                                " is within h of the set boundary; skipped");
      continue;
    }
    const Point g = c.gradient(x);
    Point fd(x.size());
    Point probe = x;
    for (int d = 0; d < x.size(); ++d) {
      probe[d] = x[d] + h;
      const double fp = c.value(probe);
      probe[d] = x[d] - h;
      const double fm = c.value(probe);
      probe[d] = x[d];
      fd[d] = (fp - fm) / (2.0 * h);
    }
    const double err = (fd - g).norm() / std::max(1.0, g.norm());
    report.max_relative_error = std::max(report.max_relative_error, err);
    ++report.checked;
  }
  return report;
}

BoundEstimate estimate_bounds(const ComponentFunction& c, const FeasibleSet& set,
                              int n_samples, std::uint64_t seed) {
  if (n_samples < 100) throw ConfigError("estimate_bounds: n_samples must be >= 100");
  Rng rng(seed, Stream::kSampling);
  BoundEstimate est;
  for (int i = 0; i < n_samples; ++i) {
    const Point x = sample_uniform(set, rng);
    const Point gx = c.gradient(x);
    est.l_hat = std::max(est.l_hat, gx.norm());
    // Pair each sample with a nearby and a far partner so that both local
    // curvature and long-range slope are probed.
    const Point far = sample_uniform(set, rng);
    Point dir(x.size());
    for (int d = 0; d < x.size(); ++d) dir[d] = rng.normal();
    const double scale = 1e-3 * (1.0 + set.max_norm());
    const Point near = set.project(x + scale * dir.normalized());
    for (const Point* y : {&far, &near}) {
      const double dist = (x - *y).norm();
      if (dist < 1e-9) continue;
      const Point gy = c.gradient(*y);
      est.l_hat = std::max(est.l_hat, gy.norm());
      est.n_hat = std::max(est.n_hat, (gx - gy).norm() / dist);
    }
  }
  const auto exceeds = [](double observed, double declared) {
    return observed > declared * (1.0 + 1e-12) + 1e-12;
  };
  est.l_violated = exceeds(est.l_hat, c.grad_bound());
  est.n_violated = exceeds(est.n_hat, c.lipschitz());
  return est;
}

AnalyticBounds analytic_bounds(const ComponentFunction& c, const FeasibleSet& set) {
  if (set.dimension() != c.dimension())
    throw ConfigError("analytic_bounds: dimension mismatch");
  AnalyticBounds out = std::visit(
      Overloaded{
          [&](const QuadraticForm& q) {
            return AnalyticBounds{affine_norm_sup(q.a, q.b, set), spectral_norm(q.a)};
          },
          [&](const SeparablePolynomial& p) {
            double g2 = 0.0;
            double n = 0.0;
            for (int d = 0; d < c.dimension(); ++d) {
              const auto [lo, hi] = set.coordinate_range(d);
              const auto d1 = poly_derivative(p.coeffs[d]);
              const double gmax = max_abs_on_interval(d1, lo, hi);
              g2 += gmax * gmax;
              n = std::max(n, max_abs_on_interval(poly_derivative(d1), lo, hi));
            }
            return AnalyticBounds{std::sqrt(g2), n};
          },
          [&](const SinePerturbedQuadratic& s) {
            const Point af = s.amplitude.cwiseProduct(s.frequency);
            const double curv =
                (s.amplitude.cwiseProduct(s.frequency).cwiseProduct(s.frequency))
                    .cwiseAbs()
                    .maxCoeff();
            return AnalyticBounds{affine_norm_sup(s.quad.a, s.quad.b, set) + af.norm(),
                                  spectral_norm(s.quad.a) + curv};
          },
      },
      c.params());
  // Guard against rounding in the closed forms, and keep N strictly positive.
  out.grad_bound = out.grad_bound * (1.0 + 1e-9) + 1e-12;
  out.lipschitz = out.lipschitz * (1.0 + 1e-9) + 1e-12;
  return out;
}

ConvexityVerdict verify_sum_convexity(const Problem& prob, int n_pairs,
                                      std::uint64_t seed) {
  if (n_pairs < 100) throw ConfigError("verify_sum_convexity: n_pairs must be >= 100");
  Rng rng(seed, Stream::kSampling, 1);
  ConvexityVerdict v;
  for (int i = 0; i < n_pairs; ++i) {
    const Point x = sample_uniform(prob.set, rng);
    const Point y = sample_uniform(prob.set, rng);
    const double fx = prob.value(x);
    const double fy = prob.value(y);
    for (double lam : {0.25, 0.5, 0.75}) {
      const double fm = prob.value(lam * x + (1.0 - lam) * y);
      const double chord = lam * fx + (1.0 - lam) * fy;
      const double tol = 1e-9 * (1.0 + std::max({std::abs(fm), std::abs(fx), std::abs(fy)}));
      const double excess = fm - chord;
      ++v.checked;
      if (excess > tol) {
        ++v.violations;
        v.pass = false;
      }
      v.worst_excess = std::max(v.worst_excess, excess);
    }
  }
  return v;
}

}  // namespace distopt
