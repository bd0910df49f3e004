#ifndef CGPS_CONSTRAINTS_HPP
#define CGPS_CONSTRAINTS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgps/grid.hpp"
#include "cgps/qp.hpp"
#include "cgps/rkhs.hpp"

namespace cgps {

enum class Monotone { kIncreasing, kDecreasing };

struct Bounds {
  double lower;
  double upper;
};

// Declarative shape constraints. At least one of bounds/monotone must be
// present; the induced function set is closed and convex in sup norm.
struct ConstraintSet {
  std::optional<Bounds> bounds;
  std::optional<Monotone> monotone;

  ConstraintSet(std::optional<Bounds> b, std::optional<Monotone> m)
      : bounds(b), monotone(m) {
    if (!bounds && !monotone)
      throw std::invalid_argument("ConstraintSet: at least one constraint required");
    if (bounds && !(bounds->lower < bounds->upper))
      throw std::invalid_argument("ConstraintSet: requires lower < upper");
  }

  static ConstraintSet bounded(double lower, double upper) {
    return ConstraintSet(Bounds{lower, upper}, std::nullopt);
  }
  static ConstraintSet monotone_only(Monotone m) { return ConstraintSet(std::nullopt, m); }
  static ConstraintSet bounded_monotone(double lower, double upper, Monotone m) {
    return ConstraintSet(Bounds{lower, upper}, m);
  }
};

// Knot-level linear inequalities A c <= b equivalent to membership of the
// extended piecewise-linear function in the constraint set. Row order:
// lower-bound block, upper-bound block, ordering block.
struct LinearInequalities {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<std::string> description;
};

// Piecewise linearity makes knot-level constraints necessary and sufficient:
// bounds become a box on the coefficients, monotonicity becomes ordering of
// consecutive knot values. Consecutive knots may straddle a hole of F; the
// affine bridge is monotone iff its endpoints are ordered, so the same rows
// cover that case.
inline LinearInequalities compile(const ConstraintSet& cs, const KnotGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::Index rows = 0;
  if (cs.bounds) rows += 2 * n;
  if (cs.monotone) rows += n - 1;

  LinearInequalities out;
  out.A = Eigen::MatrixXd::Zero(rows, n);
  out.b.resize(rows);
  out.description.reserve(static_cast<std::size_t>(rows));
  Eigen::Index r = 0;
  if (cs.bounds) {
    for (Eigen::Index j = 0; j < n; ++j, ++r) {
      out.A(r, j) = -1.0;
      out.b[r] = -cs.bounds->lower;
      out.description.push_back("lower_bound[" + std::to_string(j) + "]");
    }
    for (Eigen::Index j = 0; j < n; ++j, ++r) {
      out.A(r, j) = 1.0;
      out.b[r] = cs.bounds->upper;
      out.description.push_back("upper_bound[" + std::to_string(j) + "]");
    }
  }
  if (cs.monotone) {
    const double s = (*cs.monotone == Monotone::kIncreasing) ? 1.0 : -1.0;
    for (Eigen::Index j = 0; j + 1 < n; ++j, ++r) {
      out.A(r, j) = s;
      out.A(r, j + 1) = -s;
      out.b[r] = 0.0;
      out.description.push_back("ordering[" + std::to_string(j) + "]");
    }
  }
  return out;
}

// Detected constraint violation of a function sampled on sorted audit points:
// the worst bound excess plus the worst adverse increment between consecutive
// samples. Zero means no violation at the audit resolution.
inline double violation(const ConstraintSet& cs, const std::vector<double>& values) {
  double v = 0.0;
  if (cs.bounds) {
    for (double y : values) {
      v = std::max(v, y - cs.bounds->upper);
      v = std::max(v, cs.bounds->lower - y);
    }
  }
  if (cs.monotone) {
    const double s = (*cs.monotone == Monotone::kIncreasing) ? 1.0 : -1.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
      v = std::max(v, s * (values[i] - values[i + 1]));
  }
  return v;
}

template <typename F>
double violation(const ConstraintSet& cs, F&& f, const std::vector<double>& audit_points) {
  std::vector<double> values(audit_points.size());
  for (std::size_t i = 0; i < audit_points.size(); ++i) values[i] = f(audit_points[i]);
  return violation(cs, values);
}

// Deterministic feasible coefficient vector near c: clip into the bounds,
// then sweep once to restore the ordering (the sweep preserves the box).
inline std::vector<double> make_feasible(const ConstraintSet& cs, std::vector<double> c) {
  if (cs.bounds) {
    for (double& v : c) v = std::clamp(v, cs.bounds->lower, cs.bounds->upper);
  }
  if (cs.monotone) {
    if (*cs.monotone == Monotone::kIncreasing) {
      for (std::size_t j = 1; j < c.size(); ++j) c[j] = std::max(c[j], c[j - 1]);
    } else {
      for (std::size_t j = 1; j < c.size(); ++j) c[j] = std::min(c[j], c[j - 1]);
    }
  }
  return c;
}

struct AlphaProjection {
  double alpha;              // fine-grid estimate of the RKHS distance to C
  PiecewiseLinear projection;
  QpSolution qp;
};

// Amortizes the fine-grid projection behind alpha_N across many calls: the
// Hessian 2 Gamma^{-1} and its factor depend only on the fine context, so
// they are built once.
class AlphaProjector {
 public:
  AlphaProjector(const RkhsContext& fine_context, const ConstraintSet& cs)
      : ctx_(fine_context),
        lin_(compile(cs, fine_context.grid())),
        cs_(cs),
        h_(2.0 * fine_context.inverse_dense()) {
    llt_.compute(h_);
    if (llt_.info() != Eigen::Success)
      throw NotPositiveDefinite("AlphaProjector: 2 Gamma^{-1} not factorizable");
  }

  // Distance (in the fine ||.||_N metric) from pi_N(h) to the compiled
  // constraint polytope: solves min ||p - pi_N(h)||_N^2 s.t. A p <= b.
  AlphaProjection project(const KernelInterpolant& h,
                          const std::vector<int>& warm_active = {}) const {
    const KnotGrid& grid = ctx_.grid();
    const PiecewiseLinear target = project_pi(grid, h);
    const Eigen::VectorXd c_h = ctx_.coeff_vector(target);

    QpProblem qp;
    qp.H = h_;
    qp.g = -2.0 * ctx_.solve(c_h);
    qp.A = lin_.A;
    qp.b = lin_.b;

    QpOptions opts;
    opts.prefactored_H = &llt_;
    opts.warm_active = warm_active;
    std::vector<double> start = make_feasible(cs_, target.coeffs());
    opts.start = Eigen::Map<const Eigen::VectorXd>(start.data(),
                                                   static_cast<Eigen::Index>(start.size()));

    QpSolution sol = solve_qp(qp, opts);
    const double dist_sq = ctx_.norm_sq_coeffs(sol.x - c_h);
    std::vector<double> coeffs(sol.x.data(), sol.x.data() + sol.x.size());
    return AlphaProjection{std::sqrt(std::max(dist_sq, 0.0)),
                           PiecewiseLinear(grid, std::move(coeffs)), std::move(sol)};
  }

  const RkhsContext& context() const { return ctx_; }

 private:
  const RkhsContext& ctx_;
  LinearInequalities lin_;
  ConstraintSet cs_;
  Eigen::MatrixXd h_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

inline AlphaProjection project_alpha(const RkhsContext& fine_context,
                                     const KernelInterpolant& h, const ConstraintSet& cs) {
  return AlphaProjector(fine_context, cs).project(h);
}

}  // namespace cgps

#endif  // CGPS_CONSTRAINTS_HPP
