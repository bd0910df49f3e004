#ifndef CGPS_SAMPLER_HPP
#define CGPS_SAMPLER_HPP

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cgps/constraints.hpp"
#include "cgps/grid.hpp"
#include "cgps/qp.hpp"
#include "cgps/rkhs.hpp"
#include "cgps/rng.hpp"
#include "cgps/smoother.hpp"

namespace cgps {

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }
inline double normal_sf(double z) { return 0.5 * std::erfc(z * M_SQRT1_2); }

// Upper-tail truncated standard normal on [a, b] with 0 <= a < b, by
// inverting the survival function; erfc keeps the tail accurate and the
// Rayleigh-style inversion covers the deep tail where it underflows.
inline double upper_tail_truncated(Rng& rng, double a, double b) {
  const double sa = normal_sf(a);
  const double u = rng.uniform();
  if (sa > 1e-300) {
    const double sb = std::isinf(b) ? 0.0 : normal_sf(b);
    const double s = sb + (sa - sb) * (1.0 - u);
    return -normal_quantile(s);
  }
  // a beyond ~38: invert exp(-(x^2 - a^2)/2) on [a, b].
  const double cap = std::isinf(b) ? 1.0 : -std::expm1(-0.5 * (b * b - a * a));
  return std::sqrt(a * a - 2.0 * std::log1p(-u * cap));
}

}  // namespace detail

// One draw from N(mean, sd^2) truncated to [lo, hi] by inverse CDF, with the
// computation routed to whichever tail keeps the CDF differences well
// conditioned.
inline double sample_truncated_normal(Rng& rng, double mean, double sd, double lo, double hi) {
  if (!(sd > 0.0)) throw std::invalid_argument("sample_truncated_normal: sd must be > 0");
  if (!(lo < hi)) throw std::invalid_argument("sample_truncated_normal: requires lo < hi");
  const double a = (lo - mean) / sd;
  const double b = (hi - mean) / sd;
  double z;
  if (a >= 0.0) {
    z = detail::upper_tail_truncated(rng, a, b);
  } else if (b <= 0.0) {
    z = -detail::upper_tail_truncated(rng, -b, -a);
  } else {
    const double pa = detail::normal_cdf(a);
    const double pb = detail::normal_cdf(b);
    z = normal_quantile(pa + (pb - pa) * rng.uniform());
  }
  return mean + sd * std::clamp(z, a, b);
}

struct GibbsOptions {
  int burn_in = 500;   // sweeps discarded before emitting
  int thinning = 10;   // sweeps between emitted draws
};

// Constrained GP replicates: the knot coefficient vector of the
// finite-dimensional approximation is N(0, Gamma_N) truncated to the compiled
// constraint polytope. Systematic-scan Gibbs with 1-D truncated-normal
// conditionals; the chain starts from the Gamma^{-1}-metric projection of an
// exact unconstrained draw, so distinct seeds give genuinely distinct paths.
// Every emitted draw is feasible at the coefficient level, and (seed, spec)
// fixes the output bit-for-bit.
class ConstrainedPathSampler {
 public:
  ConstrainedPathSampler(const RkhsContext& ctx, const ConstraintSet& cs,
                         GibbsOptions opts = {})
      : ctx_(ctx), cs_(cs), opts_(opts), precision_(ctx.inverse_dense()) {
    llt_h_.compute(2.0 * precision_);
    if (llt_h_.info() != Eigen::Success)
      throw NotPositiveDefinite("ConstrainedPathSampler: precision factorization failed");
  }

  PiecewiseLinear draw(std::uint64_t seed) const {
    Rng rng(seed);
    const Eigen::Index n = ctx_.dim();

    // Exact unconstrained draw c = L xi, then project into the polytope.
    Eigen::VectorXd xi(n);
    for (Eigen::Index i = 0; i < n; ++i) xi[i] = rng.gaussian();
    const Eigen::VectorXd z = ctx_.llt().matrixL() * xi;
    Eigen::VectorXd c = project_start(z);

    Eigen::VectorXd r = precision_ * c;  // running Q c for the conditionals
    for (int sweep = 0; sweep < opts_.burn_in + opts_.thinning; ++sweep) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double qjj = precision_(j, j);
        const double cond_mean = c[j] - r[j] / qjj;
        const double cond_sd = 1.0 / std::sqrt(qjj);
        const auto [lo, hi] = truncation_interval(c, j);
        const double next = sample_truncated_normal(rng, cond_mean, cond_sd, lo, hi);
        const double delta = next - c[j];
        if (delta != 0.0) {
          c[j] = next;
          r += precision_.col(j) * delta;
        }
      }
    }
    return PiecewiseLinear(ctx_.grid(), std::vector<double>(c.data(), c.data() + n));
  }

 private:
  Eigen::VectorXd project_start(const Eigen::VectorXd& z) const {
    std::vector<double> zv(z.data(), z.data() + z.size());
    if (violation(cs_, zv) == 0.0) return z;
    QpProblem qp;
    qp.H = 2.0 * precision_;
    qp.g = -2.0 * (precision_ * z);
    LinearInequalities lin = compile(cs_, ctx_.grid());
    qp.A = std::move(lin.A);
    qp.b = std::move(lin.b);
    QpOptions opts;
    opts.prefactored_H = &llt_h_;
    std::vector<double> start = make_feasible(cs_, zv);
    opts.start = Eigen::Map<const Eigen::VectorXd>(start.data(),
                                                   static_cast<Eigen::Index>(start.size()));
    return solve_qp(qp, opts).x;
  }

  // Box bounds intersected with the ordering interval located by the current
  // neighbor values.
  std::pair<double, double> truncation_interval(const Eigen::VectorXd& c, Eigen::Index j) const {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    if (cs_.bounds) {
      lo = cs_.bounds->lower;
      hi = cs_.bounds->upper;
    }
    if (cs_.monotone) {
      const bool inc = (*cs_.monotone == Monotone::kIncreasing);
      if (j > 0) (inc ? lo : hi) = inc ? std::max(lo, c[j - 1]) : std::min(hi, c[j - 1]);
      if (j + 1 < c.size()) (inc ? hi : lo) = inc ? std::min(hi, c[j + 1]) : std::max(lo, c[j + 1]);
    }
    if (!(lo < hi)) {  // degenerate interval from ties; keep the coordinate put
      lo = std::nexttoward(lo, -std::numeric_limits<double>::infinity());
      hi = std::nexttoward(hi, std::numeric_limits<double>::infinity());
    }
    return {lo, hi};
  }

  const RkhsContext& ctx_;
  ConstraintSet cs_;
  GibbsOptions opts_;
  Eigen::MatrixXd precision_;
  Eigen::LLT<Eigen::MatrixXd> llt_h_;
};

// Uniform i.i.d. observation inputs (the paper does not fix a design; n and
// the uniform law are recorded configuration defaults).
inline std::vector<double> uniform_inputs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> xs(n);
  for (auto& x : xs) x = rng.uniform();
  return xs;
}

// y_i = P(path)(x_i) + eps_i with eps ~ N(0, tau I), seeded.
inline Observations corrupt(const PiecewiseLinear& path, const std::vector<double>& xs,
                            double tau, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> ys(xs.size());
  const double sd = std::sqrt(tau);
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = path(xs[i]) + sd * rng.gaussian();
  return Observations(xs, std::move(ys), tau);
}

}  // namespace cgps

#endif  // CGPS_SAMPLER_HPP
