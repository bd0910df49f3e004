#ifndef CGPS_KERNEL_HPP
#define CGPS_KERNEL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cgps/bessel.hpp"

namespace cgps {

enum class KernelFamily { kMatern, kSquaredExponential };

// Holder regularity of the kernel: |K(u,s) - K(u,t)| <= c_K |s-t|^beta.
// beta is analytic (min(1, 2 nu) for Matern, 1 for SE); c_K is a numerical
// estimate over a fine grid, inflated by a 5% safety factor, never a proven
// constant.
struct HolderParams {
  double beta;
  double c_K;
};

// Stationary covariance kernel on [0,1]: Matern family (fractional orders
// included) and squared exponential.
//
//   Matern: sigma2 * 2^(1-nu)/Gamma(nu) * (sqrt(2 nu) r / l)^nu
//           * K_nu(sqrt(2 nu) r / l)
//   SE:     sigma2 * exp(-r^2 / (2 l^2))
//
// Half-integer Matern orders 1/2, 3/2, 5/2 dispatch to their closed forms.
class Kernel {
 public:
  static Kernel matern(double sigma2, double lengthscale, double nu) {
    return Kernel(KernelFamily::kMatern, sigma2, lengthscale, nu);
  }

  static Kernel squared_exponential(double sigma2, double lengthscale) {
    return Kernel(KernelFamily::kSquaredExponential, sigma2, lengthscale, 0.0);
  }

  KernelFamily family() const { return family_; }
  double sigma2() const { return sigma2_; }
  double lengthscale() const { return lengthscale_; }
  double nu() const { return nu_; }

  // beta = min(1, 2 nu) for Matern, 1 for squared exponential.
  double beta() const {
    if (family_ == KernelFamily::kMatern) return std::min(1.0, 2.0 * nu_);
    return 1.0;
  }

  // Stationary profile k(r) with k(0) = sigma2 exactly.
  double eval_r(double r) const {
    r = std::abs(r);
    if (r == 0.0) return sigma2_;
    if (family_ == KernelFamily::kSquaredExponential) {
      const double z = r / lengthscale_;
      return sigma2_ * std::exp(-0.5 * z * z);
    }
    const double z = r / lengthscale_;
    if (near(nu_, 0.5)) return sigma2_ * std::exp(-z);
    if (near(nu_, 1.5)) {
      const double a = std::sqrt(3.0) * z;
      return sigma2_ * (1.0 + a) * std::exp(-a);
    }
    if (near(nu_, 2.5)) {
      const double a = std::sqrt(5.0) * z;
      return sigma2_ * (1.0 + a + a * a / 3.0) * std::exp(-a);
    }
    return matern_general(r);
  }

  double operator()(double x, double xp) const { return eval_r(x - xp); }

  // General-Bessel Matern evaluation, also exposed for half-integer orders so
  // the two routes can be cross-checked.
  double matern_general(double r) const {
    if (family_ != KernelFamily::kMatern)
      throw std::logic_error("matern_general: not a Matern kernel");
    r = std::abs(r);
    if (r == 0.0) return sigma2_;
    const double a = std::sqrt(2.0 * nu_) * r / lengthscale_;
    return sigma2_ * std::pow(2.0, 1.0 - nu_) / std::tgamma(nu_) *
           std::pow(a, nu_) * bessel_K(nu_, a);
  }

  // Empirical Holder constant: max of |k(a)-k(b)| / (b-a)^beta over a
  // step-1e-4 grid of separations (all short lags plus a geometric ladder),
  // inflated by 1.05. By stationarity the triple sup over (u,s,t) reduces to
  // this pair sup on lags.
  HolderParams holder_params() const {
    const double b = beta();
    const int n = 10000;
    const double h = 1e-4;
    std::vector<double> profile(n + 1);
    for (int i = 0; i <= n; ++i) profile[i] = eval_r(i * h);

    std::vector<int> lags;
    for (int l = 1; l <= 16; ++l) lags.push_back(l);
    for (double l = 20.0; l <= n; l *= 1.2) lags.push_back(static_cast<int>(l));
    lags.push_back(n);

    double best = 0.0;
    for (int lag : lags) {
      const double denom = std::pow(lag * h, b);
      for (int i = 0; i + lag <= n; ++i) {
        const double q = std::abs(profile[i] - profile[i + lag]) / denom;
        if (q > best) best = q;
      }
    }
    return HolderParams{b, 1.05 * best};
  }

  std::string family_name() const {
    return family_ == KernelFamily::kMatern ? "matern" : "squared_exponential";
  }

 private:
  Kernel(KernelFamily family, double sigma2, double lengthscale, double nu)
      : family_(family), sigma2_(sigma2), lengthscale_(lengthscale), nu_(nu) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("Kernel: sigma2 must be > 0");
    if (!(lengthscale > 0.0)) throw std::invalid_argument("Kernel: lengthscale must be > 0");
    if (family == KernelFamily::kMatern && !(nu > 0.0))
      throw std::invalid_argument("Kernel: Matern nu must be > 0");
  }

  static bool near(double x, double y) { return std::abs(x - y) < 1e-12; }

  KernelFamily family_;
  double sigma2_;
  double lengthscale_;
  double nu_;
};

class NotPositiveDefinite : public std::runtime_error {
 public:
  explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

enum class JitterPolicy { kNone, kOnFailure };

// Gram matrix of the kernel at the knots together with its Cholesky factor.
// gamma holds the matrix that was actually factorized: if the clean
// factorization fails and the policy allows it, 1e-10 * sigma2 is added to
// the diagonal and recorded here, so every downstream quantity stays
// consistent with one (possibly jittered) matrix.
struct GramFactor {
  Eigen::MatrixXd gamma;
  Eigen::LLT<Eigen::MatrixXd> llt;
  bool jitter_applied = false;
  double jitter_value = 0.0;
};

inline GramFactor gram(const Kernel& kernel, const std::vector<double>& knots,
                       JitterPolicy policy = JitterPolicy::kNone) {
  const auto n = static_cast<Eigen::Index>(knots.size());
  if (n == 0) throw std::invalid_argument("gram: empty knot set");
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    if (!(knots[i] < knots[i + 1]))
      throw std::invalid_argument("gram: knots must be strictly increasing");

  GramFactor out;
  out.gamma.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.gamma(i, i) = kernel.sigma2();
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = kernel.eval_r(knots[i] - knots[j]);
      out.gamma(i, j) = v;
      out.gamma(j, i) = v;
    }
  }

  out.llt.compute(out.gamma);
  if (out.llt.info() == Eigen::Success) return out;

  if (policy == JitterPolicy::kOnFailure) {
    const double jitter = 1e-10 * kernel.sigma2();
    out.gamma.diagonal().array() += jitter;
    out.llt.compute(out.gamma);
    if (out.llt.info() == Eigen::Success) {
      out.jitter_applied = true;
      out.jitter_value = jitter;
      return out;
    }
  }
  throw NotPositiveDefinite(
      "gram: Cholesky factorization failed (Condition 3 violated) for N = " +
      std::to_string(knots.size()));
}

}  // namespace cgps

#endif  // CGPS_KERNEL_HPP
