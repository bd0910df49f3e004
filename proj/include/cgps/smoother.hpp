#ifndef CGPS_SMOOTHER_HPP
#define CGPS_SMOOTHER_HPP

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cgps/constraints.hpp"
#include "cgps/grid.hpp"
#include "cgps/kernel.hpp"
#include "cgps/qp.hpp"
#include "cgps/rkhs.hpp"

namespace cgps {

// Noisy observations (x_i, y_i) with noise variance tau.
struct Observations {
  std::vector<double> x;
  std::vector<double> y;
  double tau;

  Observations(std::vector<double> xs, std::vector<double> ys, double tau_)
      : x(std::move(xs)), y(std::move(ys)), tau(tau_) {
    if (x.size() != y.size()) throw std::invalid_argument("Observations: size mismatch");
    if (!(tau > 0.0)) throw std::invalid_argument("Observations: tau must be > 0");
    for (double xi : x)
      if (!(xi >= 0.0 && xi <= 1.0))
        throw std::invalid_argument("Observations: inputs must lie in [0,1]");
  }

  std::size_t n() const { return x.size(); }
  double max_abs_y() const {
    double m = 0.0;
    for (double v : y) m = std::max(m, std::abs(v));
    return m;
  }
};

// Discrete constrained smoothing problem in coefficient form. The QP realizes
//   J_{N,F}(c) = c' Gamma^{-1} c + (1/tau) ||Phi c - y||^2
// through H = 2 (Gamma^{-1} + Phi'Phi / tau), g = -2 Phi'y / tau; the data
// constant ||y||^2 / tau is dropped inside the QP and restored in reported
// objectives. Phi_{ij} = P(phi_j|F)(x_i): hat weights at x_i, which equal the
// hole-bridged weights because holes of F contain no knots.
struct SmoothingProblem {
  const RkhsContext* ctx;
  Observations obs;
  std::optional<ConstraintSet> cs;
  Eigen::MatrixXd phi;  // n x N, convex-combination rows
  QpProblem qp;
};

struct MapSolution {
  PiecewiseLinear coeffs;
  double objective;  // J_{N,F} at the solution, constant restored
  QpSolution qp;

  double operator()(double t) const { return coeffs(t); }
};

inline Eigen::MatrixXd design_matrix(const RkhsContext& ctx, const Observations& obs) {
  const auto n = static_cast<Eigen::Index>(obs.n());
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n, ctx.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Neighbors nb = ctx.grid().neighbors(obs.x[static_cast<std::size_t>(i)]);
    phi(i, static_cast<Eigen::Index>(nb.i_minus)) += nb.w_minus;
    phi(i, static_cast<Eigen::Index>(nb.i_plus)) += nb.w_plus;
  }
  return phi;
}

inline SmoothingProblem assemble(const RkhsContext& ctx, Observations obs,
                                 std::optional<ConstraintSet> cs) {
  SmoothingProblem p{&ctx, std::move(obs), std::move(cs), {}, {}};
  p.phi = design_matrix(ctx, p.obs);

  const Eigen::Index n_knots = ctx.dim();
  p.qp.H = 2.0 * ctx.inverse_dense();
  p.qp.g = Eigen::VectorXd::Zero(n_knots);
  const double inv_tau = 1.0 / p.obs.tau;
  for (std::size_t i = 0; i < p.obs.n(); ++i) {
    const Neighbors nb = ctx.grid().neighbors(p.obs.x[i]);
    const auto j1 = static_cast<Eigen::Index>(nb.i_minus);
    const auto j2 = static_cast<Eigen::Index>(nb.i_plus);
    const double w1 = nb.w_minus, w2 = nb.w_plus;
    p.qp.H(j1, j1) += 2.0 * w1 * w1 * inv_tau;
    p.qp.H(j2, j2) += 2.0 * w2 * w2 * inv_tau;
    p.qp.H(j1, j2) += 2.0 * w1 * w2 * inv_tau;
    p.qp.H(j2, j1) += 2.0 * w1 * w2 * inv_tau;
    p.qp.g[j1] -= 2.0 * w1 * p.obs.y[i] * inv_tau;
    p.qp.g[j2] -= 2.0 * w2 * p.obs.y[i] * inv_tau;
  }
  if (p.cs) {
    LinearInequalities lin = compile(*p.cs, ctx.grid());
    p.qp.A = std::move(lin.A);
    p.qp.b = std::move(lin.b);
  } else {
    p.qp.A.resize(0, n_knots);
    p.qp.b.resize(0);
  }
  return p;
}

inline double smoothing_objective(const RkhsContext& ctx, const Eigen::MatrixXd& phi,
                                  const Observations& obs, const PiecewiseLinear& u) {
  const Eigen::VectorXd c = ctx.coeff_vector(u);
  const Eigen::VectorXd resid =
      phi * c - Eigen::Map<const Eigen::VectorXd>(obs.y.data(), static_cast<Eigen::Index>(obs.n()));
  return ctx.norm_sq_coeffs(c) + resid.squaredNorm() / obs.tau;
}

// MAP fit: solves the assembled QP. Unique by strict convexity; bit-for-bit
// reproducible given identical inputs. Infeasible compiled constraints are
// reported as a constraint/kernel incompatibility (Condition 2).
inline MapSolution fit_map(const SmoothingProblem& p, const std::vector<int>& warm_active = {},
                           double tol = 1e-8) {
  QpOptions opts;
  opts.tol = tol;
  opts.warm_active = warm_active;
  Eigen::LLT<Eigen::MatrixXd> llt(p.qp.H);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("fit_map: QP Hessian not positive definite");
  opts.prefactored_H = &llt;
  if (p.cs) {
    Eigen::VectorXd xu = llt.solve(-p.qp.g);
    std::vector<double> start(xu.data(), xu.data() + xu.size());
    start = make_feasible(*p.cs, std::move(start));
    opts.start = Eigen::Map<const Eigen::VectorXd>(start.data(),
                                                   static_cast<Eigen::Index>(start.size()));
  }
  QpSolution sol;
  try {
    sol = solve_qp(p.qp, opts);
  } catch (const QpInfeasible& e) {
    throw std::runtime_error(
        std::string("fit_map: constraint/kernel incompatibility (Condition 2): ") + e.what());
  }
  std::vector<double> c(sol.x.data(), sol.x.data() + sol.x.size());
  PiecewiseLinear u(p.ctx->grid(), std::move(c));
  const double obj = smoothing_objective(*p.ctx, p.phi, p.obs, u);
  return MapSolution{std::move(u), obj, std::move(sol)};
}

// Same minimizer computed in whitened coordinates z = L^{-1} c (Gamma = LL'),
// where the norm term is just ||z||^2 and no explicit Gamma^{-1} is needed.
// Used by the refinement scorer, which runs many small trial fits; row
// indexing of the constraints matches the canonical assembly, so active sets
// carry over.
inline MapSolution fit_map_whitened(const RkhsContext& ctx, const Observations& obs,
                                    const std::optional<ConstraintSet>& cs,
                                    const std::vector<double>* start_coeffs = nullptr,
                                    const std::vector<int>& warm_active = {}) {
  const Eigen::Index n_knots = ctx.dim();
  const Eigen::MatrixXd l = ctx.llt().matrixL();
  const Eigen::MatrixXd phi = design_matrix(ctx, obs);
  const Eigen::MatrixXd b_mat = phi * l;  // n x N
  const Eigen::Map<const Eigen::VectorXd> y(obs.y.data(), static_cast<Eigen::Index>(obs.n()));

  QpProblem qp;
  qp.H = (2.0 / obs.tau) * (b_mat.transpose() * b_mat);
  qp.H.diagonal().array() += 2.0;
  qp.g = (-2.0 / obs.tau) * (b_mat.transpose() * y);
  if (cs) {
    LinearInequalities lin = compile(*cs, ctx.grid());
    qp.A = lin.A * l;
    qp.b = std::move(lin.b);
  } else {
    qp.A.resize(0, n_knots);
    qp.b.resize(0);
  }

  QpOptions opts;
  opts.warm_active = warm_active;
  Eigen::VectorXd z0;
  if (cs) {
    std::vector<double> c0;
    if (start_coeffs != nullptr) {
      c0 = make_feasible(*cs, *start_coeffs);
    } else {
      Eigen::LLT<Eigen::MatrixXd> llt_h(qp.H);
      const Eigen::VectorXd zu = llt_h.solve(-qp.g);
      const Eigen::VectorXd cu = l * zu;
      c0 = make_feasible(*cs, std::vector<double>(cu.data(), cu.data() + cu.size()));
    }
    z0 = ctx.llt().matrixL().solve(
        Eigen::Map<const Eigen::VectorXd>(c0.data(), static_cast<Eigen::Index>(c0.size())));
    opts.start = z0;
  }

  QpSolution sol = solve_qp(qp, opts);
  const Eigen::VectorXd c = l * sol.x;
  std::vector<double> cv(c.data(), c.data() + c.size());
  PiecewiseLinear u(ctx.grid(), std::move(cv));
  const double obj = smoothing_objective(ctx, phi, obs, u);
  return MapSolution{std::move(u), obj, std::move(sol)};
}

// Exact unconstrained smoother u(t) = k_n(t)' (K_n + tau I)^{-1} y on the
// full domain; the oracle for dense-grid convergence checks.
class UnconstrainedReference {
 public:
  UnconstrainedReference(const Kernel& kernel, const Observations& obs)
      : kernel_(kernel), x_(obs.x) {
    const auto n = static_cast<Eigen::Index>(obs.n());
    if (n == 0) throw std::invalid_argument("UnconstrainedReference: needs n >= 1");
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        k(i, j) = kernel_.eval_r(x_[static_cast<std::size_t>(i)] - x_[static_cast<std::size_t>(j)]);
    k.diagonal().array() += obs.tau;
    weights_ = Eigen::LLT<Eigen::MatrixXd>(k).solve(
        Eigen::Map<const Eigen::VectorXd>(obs.y.data(), n));
  }

  double operator()(double t) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < weights_.size(); ++i)
      acc += weights_[i] * kernel_.eval_r(t - x_[static_cast<std::size_t>(i)]);
    return acc;
  }

 private:
  Kernel kernel_;
  std::vector<double> x_;
  Eigen::VectorXd weights_;
};

}  // namespace cgps

#endif  // CGPS_SMOOTHER_HPP
