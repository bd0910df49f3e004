#ifndef CGPS_RKHS_HPP
#define CGPS_RKHS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cgps/grid.hpp"
#include "cgps/kernel.hpp"

namespace cgps {

// Kernel interpolant rho_N(v) = sum_i lambda_i K(., t_i) with
// Gamma_N lambda = c_v. Maps the finite-dimensional space isometrically into
// the ambient RKHS; evaluable anywhere on [0,1].
struct KernelInterpolant {
  Kernel kernel;
  std::vector<double> knots;
  Eigen::VectorXd lambda;

  double operator()(double t) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
      acc += lambda[i] * kernel.eval_r(t - knots[static_cast<std::size_t>(i)]);
    return acc;
  }
};

// Finite-dimensional RKHS context: kernel, grid and the factorized Gram
// matrix Gamma_N = (K(t_i, t_j)). The inner product is
// <u,v>_N = c_u' Gamma_N^{-1} c_v, evaluated through the stored Cholesky
// factor (two triangular solves, no explicit inverse). If the factorization
// needed jitter, the jittered matrix is authoritative for every quantity in
// this context, so the reproducing identities hold exactly for it.
class RkhsContext {
 public:
  RkhsContext(Kernel kernel, KnotGrid grid, JitterPolicy policy = JitterPolicy::kNone)
      : kernel_(std::move(kernel)),
        grid_(std::move(grid)),
        gram_(gram(kernel_, grid_.knots(), policy)) {}

  const Kernel& kernel() const { return kernel_; }
  const KnotGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& gamma() const { return gram_.gamma; }
  const Eigen::LLT<Eigen::MatrixXd>& llt() const { return gram_.llt; }
  bool jitter_applied() const { return gram_.jitter_applied; }
  double jitter_value() const { return gram_.jitter_value; }
  Eigen::Index dim() const { return gram_.gamma.rows(); }

  Eigen::VectorXd coeff_vector(const PiecewiseLinear& v) const {
    if (!v.grid().same_knots(grid_))
      throw std::invalid_argument("RkhsContext: function lives on a different grid");
    return Eigen::Map<const Eigen::VectorXd>(v.coeffs().data(),
                                             static_cast<Eigen::Index>(v.coeffs().size()));
  }

  // Gamma_N^{-1} rhs through the factorization.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return gram_.llt.solve(rhs); }

  // L^{-1} c, the half-solve whose squared norm is c' Gamma^{-1} c.
  Eigen::VectorXd half_solve(const Eigen::VectorXd& c) const {
    return gram_.llt.matrixL().solve(c);
  }

  double inner(const PiecewiseLinear& u, const PiecewiseLinear& v) const {
    return half_solve(coeff_vector(u)).dot(half_solve(coeff_vector(v)));
  }

  double norm_sq(const PiecewiseLinear& v) const { return half_solve(coeff_vector(v)).squaredNorm(); }

  double norm_sq_coeffs(const Eigen::VectorXd& c) const { return half_solve(c).squaredNorm(); }

  // K_N(x, x') = sum_{ij} K(t_i,t_j) phi_i(x) phi_j(x'): a contraction over
  // the at most two active hats per argument, read off the Gram entries.
  double kernel_KN(double x, double xp) const {
    const Neighbors a = grid_.neighbors(x);
    const Neighbors b = grid_.neighbors(xp);
    const auto g = [&](std::size_t i, std::size_t j) {
      return gram_.gamma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    };
    return a.w_minus * (b.w_minus * g(a.i_minus, b.i_minus) + b.w_plus * g(a.i_minus, b.i_plus)) +
           a.w_plus * (b.w_minus * g(a.i_plus, b.i_minus) + b.w_plus * g(a.i_plus, b.i_plus));
  }

  // rho_N(v): solve Gamma_N lambda = c_v.
  KernelInterpolant interpolant(const PiecewiseLinear& v) const {
    return KernelInterpolant{kernel_, grid_.knots(), solve(coeff_vector(v))};
  }

  // ||rho_N(v)||^2_{H_F} = lambda' Gamma lambda, evaluated as ||L' lambda||^2
  // through the stored factor for numerical consistency with <.,.>_N.
  double interpolant_norm_sq(const KernelInterpolant& rho) const {
    return (gram_.llt.matrixU() * rho.lambda).squaredNorm();
  }

  // Explicit dense Gamma_N^{-1} (used by the smoother assembly).
  Eigen::MatrixXd inverse_dense() const {
    const Eigen::Index n = dim();
    return gram_.llt.solve(Eigen::MatrixXd::Identity(n, n));
  }

  // Witness for the sup-norm embedding constant: c with ||h||_inf <= c ||h||
  // in both H_{N,F} and H_F, via |h(t)| = |<h, K(t,.)>| <= ||h|| sqrt(K(t,t)).
  double embedding_witness() const {
    double kn_diag = 0.0;
    for (double t : grid_.audit_points())
      kn_diag = std::max(kn_diag, kernel_KN(t, t));
    return std::sqrt(std::max(kernel_.sigma2(), kn_diag));
  }

 private:
  Kernel kernel_;
  KnotGrid grid_;
  GramFactor gram_;
};

// Working estimate of ||f||_{H_F} as ||pi_N(f)||_N on a fine reference grid;
// a lower bound that is monotone nondecreasing under refinement.
template <typename F>
double norm_HF_estimate(const RkhsContext& fine_context, F&& f) {
  return std::sqrt(fine_context.norm_sq(project_pi(fine_context.grid(), f)));
}

template <typename F>
double norm_HF_estimate(const Kernel& kernel, F&& f, const KnotGrid& ref_grid,
                        JitterPolicy policy = JitterPolicy::kNone) {
  RkhsContext ctx(kernel, ref_grid, policy);
  return norm_HF_estimate(ctx, std::forward<F>(f));
}

}  // namespace cgps

#endif  // CGPS_RKHS_HPP
