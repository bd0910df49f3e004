// Test-only oracles, independent of the implementation paths they check.
#ifndef CGPS_TESTS_ORACLES_HPP
#define CGPS_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace oracles {

// Adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-14) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 60);
}

// K_nu(x) from its integral representation, the quadrature oracle for the
// series/continued-fraction implementation:
//   K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt.
inline double bessel_K_quadrature(double nu, double x) {
  // exp(-x cosh t) is negligible once x cosh t > 750.
  const double t_max = std::acosh(std::max(750.0 / x, 2.0));
  const auto integrand = [&](double t) { return std::exp(-x * std::cosh(t)) * std::cosh(nu * t); };
  return integrate(integrand, 0.0, t_max, 1e-15);
}

// Brute-force strictly convex QP oracle: enumerate all active subsets of the
// constraints, solve each equality-constrained KKT system, and keep the
// feasible, dual-feasible candidate (unique by strict convexity).
struct EnumQpResult {
  Eigen::VectorXd x;
  Eigen::VectorXd duals;
  double objective = std::numeric_limits<double>::infinity();
  bool found = false;
};

inline EnumQpResult enumerate_qp(const Eigen::MatrixXd& h, const Eigen::VectorXd& g,
                                 const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index n = h.rows();
  const Eigen::Index m = a.rows();
  if (m > 20) throw std::invalid_argument("enumerate_qp: too many constraints");
  EnumQpResult best;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    std::vector<Eigen::Index> act;
    for (Eigen::Index i = 0; i < m; ++i)
      if (mask & (1u << i)) act.push_back(i);
    const auto k = static_cast<Eigen::Index>(act.size());
    if (k > n) continue;
    Eigen::MatrixXd kkt(n + k, n + k);
    kkt.setZero();
    kkt.topLeftCorner(n, n) = h;
    for (Eigen::Index j = 0; j < k; ++j) {
      kkt.block(n + j, 0, 1, n) = a.row(act[static_cast<std::size_t>(j)]);
      kkt.block(0, n + j, n, 1) = a.row(act[static_cast<std::size_t>(j)]).transpose();
    }
    Eigen::VectorXd rhs(n + k);
    rhs.head(n) = -g;
    for (Eigen::Index j = 0; j < k; ++j) rhs[n + j] = b[act[static_cast<std::size_t>(j)]];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd x = sol.head(n);
    const Eigen::VectorXd mu = sol.tail(k);
    if (k > 0 && mu.minCoeff() < -1e-9) continue;
    if (m > 0 && (a * x - b).maxCoeff() > 1e-9) continue;
    const double obj = 0.5 * x.dot(h * x) + g.dot(x);
    if (obj < best.objective) {
      best.objective = obj;
      best.x = x;
      best.duals = Eigen::VectorXd::Zero(m);
      for (Eigen::Index j = 0; j < k; ++j) best.duals[act[static_cast<std::size_t>(j)]] = mu[j];
      best.found = true;
    }
  }
  return best;
}

}  // namespace oracles

#endif  // CGPS_TESTS_ORACLES_HPP
