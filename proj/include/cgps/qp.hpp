#ifndef CGPS_QP_HPP
#define CGPS_QP_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace cgps {

// Dense strictly convex QP:  minimize 1/2 x'Hx + g'x  subject to  A x <= b.
struct QpProblem {
  Eigen::MatrixXd H;  // symmetric positive definite, n x n
  Eigen::VectorXd g;  // n
  Eigen::MatrixXd A;  // m x n, m may be zero
  Eigen::VectorXd b;  // m
};

class QpInfeasible : public std::runtime_error {
 public:
  QpInfeasible(double max_violation, int witness_row)
      : std::runtime_error("QP infeasible: least achievable violation " +
                           std::to_string(max_violation) + " at row " +
                           std::to_string(witness_row)),
        max_violation(max_violation),
        witness_row(witness_row) {}
  double max_violation;
  int witness_row;
};

class QpMaxIterations : public std::runtime_error {
 public:
  QpMaxIterations(Eigen::VectorXd best, double kkt)
      : std::runtime_error("QP active-set: iteration limit reached, kkt residual " +
                           std::to_string(kkt)),
        best_iterate(std::move(best)),
        kkt_residual(kkt) {}
  Eigen::VectorXd best_iterate;
  double kkt_residual;
};

struct QpOptions {
  double tol = 1e-8;
  int max_iterations = 0;             // 0: derived from problem size
  Eigen::VectorXd start;              // optional feasible start (empty: none)
  std::vector<int> warm_active;       // optional initial working set
  const Eigen::LLT<Eigen::MatrixXd>* prefactored_H = nullptr;  // reuse across solves
};

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd duals;              // m, >= 0
  double kkt_residual = 0.0;          // see solver notes below
  std::vector<int> active_set;        // sorted row indices
  int iterations = 0;
  std::vector<double> objective_trace;
  double objective = 0.0;
};

namespace detail {

// Primal active-set method. The working set W holds independent rows of A
// treated as equalities; each iteration solves the equality-constrained
// subproblem through the Schur complement S = A_W H^{-1} A_W' and either
// moves to a blocking constraint (ties broken by lowest row index) or drops
// the most negative multiplier (same tie rule). Everything is deterministic:
// fixed pivoting, no randomization.
class ActiveSetSolver {
 public:
  ActiveSetSolver(const QpProblem& p, const QpOptions& opts) : p_(p), opts_(opts) {
    n_ = p.H.rows();
    m_ = p.A.rows();
    if (p.H.cols() != n_ || p.g.size() != n_)
      throw std::invalid_argument("QP: inconsistent H/g dimensions");
    if (m_ > 0 && (p.A.cols() != n_ || p.b.size() != m_))
      throw std::invalid_argument("QP: inconsistent A/b dimensions");
    if (opts.prefactored_H != nullptr) {
      llt_ = opts.prefactored_H;
    } else {
      own_llt_.compute(p.H);
      if (own_llt_.info() != Eigen::Success)
        throw std::invalid_argument("QP: H is not positive definite");
      llt_ = &own_llt_;
    }
    max_iter_ = opts.max_iterations > 0
                    ? opts.max_iterations
                    : 50 + 3 * static_cast<int>(m_ + n_);
  }

  QpSolution run() {
    Eigen::VectorXd x = initial_point();
    setup_working_set(x);

    QpSolution sol;
    Eigen::VectorXd mu_w;
    for (int iter = 0; iter < max_iter_; ++iter) {
      sol.iterations = iter + 1;
      sol.objective_trace.push_back(objective(x));

      const Eigen::VectorXd r = -(p_.g + p_.H * x);
      const Eigen::VectorXd h = llt_->solve(r);
      Eigen::VectorXd p;
      if (w_.empty()) {
        p = h;
        mu_w.resize(0);
      } else {
        Eigen::VectorXd aw_h(w_.size());
        for (std::size_t k = 0; k < w_.size(); ++k) aw_h[static_cast<Eigen::Index>(k)] = p_.A.row(w_[k]).dot(h);
        mu_w = s_ldlt_.solve(aw_h);
        p = h - v_ * mu_w;
      }

      const double p_norm = p.lpNorm<Eigen::Infinity>();
      if (p_norm <= 1e-10 * (1.0 + x.lpNorm<Eigen::Infinity>())) {
        // Stationary on the working set: optimal unless a multiplier is
        // negative. Ties go to the lowest row index.
        const double mu_scale = mu_w.size() ? 1.0 + mu_w.lpNorm<Eigen::Infinity>() : 1.0;
        int drop = -1;
        double worst = -opts_.tol * mu_scale;
        for (std::size_t k = 0; k < w_.size(); ++k) {
          const double m = mu_w[static_cast<Eigen::Index>(k)];
          if (m < worst || (drop >= 0 && m == worst && w_[k] < w_[static_cast<std::size_t>(drop)])) {
            worst = m;
            drop = static_cast<int>(k);
          }
        }
        if (drop < 0) return finish(std::move(sol), x, mu_w);
        remove_from_working_set(static_cast<std::size_t>(drop));
        continue;
      }

      // Ratio test against rows outside the working set. Scanning in
      // increasing row order with a strict comparison implements the
      // lowest-row-index tie rule.
      double alpha = 1.0;
      int blocking = -1;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (in_working_set(static_cast<int>(i))) continue;
        const double api = p_.A.row(i).dot(p);
        if (api <= 1e-14 * (1.0 + p_norm)) continue;
        const double slack = std::max(p_.b[i] - p_.A.row(i).dot(x), 0.0);
        const double ai = slack / api;
        if (ai < alpha) {
          alpha = ai;
          blocking = static_cast<int>(i);
        }
      }
      x += alpha * p;
      if (blocking >= 0) add_to_working_set(blocking, x);
    }

    // Iteration budget exhausted; report the best iterate honestly.
    Eigen::VectorXd duals = Eigen::VectorXd::Zero(m_);
    for (std::size_t k = 0; k < w_.size(); ++k)
      if (mu_w.size() == static_cast<Eigen::Index>(w_.size()))
        duals[w_[k]] = std::max(mu_w[static_cast<Eigen::Index>(k)], 0.0);
    throw QpMaxIterations(x, kkt_residual(x, duals));
  }

 private:
  double objective(const Eigen::VectorXd& x) const {
    return 0.5 * x.dot(p_.H * x) + p_.g.dot(x);
  }

  Eigen::VectorXd initial_point() {
    if (opts_.start.size() == n_) {
      if (m_ == 0 || (p_.A * opts_.start - p_.b).maxCoeff() <= 1e-9) return opts_.start;
    }
    // Unconstrained minimizer with one step of iterative refinement.
    Eigen::VectorXd x = llt_->solve(-p_.g);
    x += llt_->solve(-p_.g - p_.H * x);
    if (m_ == 0 || (p_.A * x - p_.b).maxCoeff() <= 1e-10) return x;
    return phase_one(x);
  }

  // Phase 1: min 1/2 eps ||x||^2 + 1/2 t^2 + M t  s.t.  a_i'x - t <= b_i.
  // Always has the trivial interior start (x0, viol(x0) + 1); the optimal t
  // is (up to the small regularization) the least achievable violation.
  Eigen::VectorXd phase_one(const Eigen::VectorXd& x0) {
    const double scale = std::max(1.0, p_.b.size() ? p_.b.lpNorm<Eigen::Infinity>() : 1.0);
    QpProblem ph;
    ph.H = Eigen::MatrixXd::Identity(n_ + 1, n_ + 1);
    ph.H.topLeftCorner(n_, n_) *= 1e-6;
    ph.g = Eigen::VectorXd::Zero(n_ + 1);
    ph.g[n_] = scale;
    ph.A.resize(m_, n_ + 1);
    ph.A.leftCols(n_) = p_.A;
    ph.A.col(n_).setConstant(-1.0);
    ph.b = p_.b;

    QpOptions popts;
    popts.tol = opts_.tol;
    popts.start.resize(n_ + 1);
    popts.start.head(n_) = x0;
    popts.start[n_] = std::max(0.0, (p_.A * x0 - p_.b).maxCoeff()) + 1.0;

    ActiveSetSolver inner(ph, popts);
    const QpSolution ps = inner.run();
    const double t_star = ps.x[n_];
    if (t_star > 1e-8 * scale) {
      const Eigen::VectorXd viol = p_.A * ps.x.head(n_) - p_.b;
      Eigen::Index row;
      viol.maxCoeff(&row);
      throw QpInfeasible(t_star, static_cast<int>(row));
    }
    return ps.x.head(n_);
  }

  bool in_working_set(int row) const {
    return std::find(w_.begin(), w_.end(), row) != w_.end();
  }

  void setup_working_set(const Eigen::VectorXd& x) {
    w_.clear();
    v_.resize(n_, 0);
    for (int row : opts_.warm_active) {
      if (row < 0 || row >= m_ || in_working_set(row)) continue;
      if (std::abs(p_.A.row(row).dot(x) - p_.b[row]) > 1e-8 * (1.0 + std::abs(p_.b[row])))
        continue;
      add_to_working_set(row, x, /*allow_exchange=*/false);
    }
  }

  // Add a row; if it is (numerically) dependent on the current working set,
  // exchange it against the member with the largest representation
  // coefficient so the set stays independent.
  void add_to_working_set(int row, const Eigen::VectorXd& x, bool allow_exchange = true) {
    const Eigen::VectorXd a = p_.A.row(row).transpose();
    const Eigen::VectorXd v = llt_->solve(a);
    if (!w_.empty()) {
      Eigen::VectorXd s_vec(w_.size());
      for (std::size_t k = 0; k < w_.size(); ++k) s_vec[static_cast<Eigen::Index>(k)] = p_.A.row(w_[k]).dot(v);
      const Eigen::VectorXd coef = s_ldlt_.solve(s_vec);
      const double pivot = a.dot(v) - s_vec.dot(coef);
      if (pivot <= 1e-12 * std::max(1.0, a.dot(v))) {
        if (!allow_exchange) return;
        Eigen::Index k_drop;
        coef.cwiseAbs().maxCoeff(&k_drop);
        remove_from_working_set(static_cast<std::size_t>(k_drop));
        add_to_working_set(row, x, /*allow_exchange=*/false);
        return;
      }
    }
    w_.push_back(row);
    v_.conservativeResize(n_, static_cast<Eigen::Index>(w_.size()));
    v_.col(static_cast<Eigen::Index>(w_.size()) - 1) = v;
    refactor_schur();
  }

  void remove_from_working_set(std::size_t k) {
    const auto last = w_.size() - 1;
    std::swap(w_[k], w_[last]);
    v_.col(static_cast<Eigen::Index>(k)).swap(v_.col(static_cast<Eigen::Index>(last)));
    w_.pop_back();
    v_.conservativeResize(n_, static_cast<Eigen::Index>(w_.size()));
    refactor_schur();
  }

  void refactor_schur() {
    const auto k = static_cast<Eigen::Index>(w_.size());
    if (k == 0) return;
    Eigen::MatrixXd s(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        s(i, j) = p_.A.row(w_[static_cast<std::size_t>(i)]).dot(v_.col(j));
    s_ldlt_.compute(0.5 * (s + s.transpose()));
  }

  // Reported residual: max of relative stationarity, positive feasibility
  // excess, and scaled complementarity. Stationarity is measured against the
  // magnitudes of its own terms so that an ill-conditioned H cannot make an
  // exact KKT point look unconverged.
  double kkt_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& duals) const {
    const Eigen::VectorXd hx = p_.H * x;
    Eigen::VectorXd stat = hx + p_.g;
    if (m_ > 0) stat += p_.A.transpose() * duals;
    const double denom = 1.0 + p_.g.lpNorm<Eigen::Infinity>() + hx.lpNorm<Eigen::Infinity>();
    double res = stat.lpNorm<Eigen::Infinity>() / denom;
    if (m_ > 0) {
      const Eigen::VectorXd slack = p_.b - p_.A * x;
      res = std::max(res, std::max(0.0, -slack.minCoeff()));
      const double mu_scale = 1.0 + duals.lpNorm<Eigen::Infinity>();
      for (Eigen::Index i = 0; i < m_; ++i)
        res = std::max(res, std::abs(duals[i] * slack[i]) / mu_scale);
    }
    return res;
  }

  QpSolution finish(QpSolution sol, const Eigen::VectorXd& x, const Eigen::VectorXd& mu_w) {
    sol.x = x;
    sol.duals = Eigen::VectorXd::Zero(m_);
    for (std::size_t k = 0; k < w_.size(); ++k)
      sol.duals[w_[k]] = std::max(mu_w[static_cast<Eigen::Index>(k)], 0.0);
    sol.active_set.assign(w_.begin(), w_.end());
    std::sort(sol.active_set.begin(), sol.active_set.end());
    sol.kkt_residual = kkt_residual(x, sol.duals);
    sol.objective = objective(x);
    return sol;
  }

  const QpProblem& p_;
  const QpOptions& opts_;
  Eigen::Index n_ = 0, m_ = 0;
  int max_iter_ = 0;
  const Eigen::LLT<Eigen::MatrixXd>* llt_ = nullptr;
  Eigen::LLT<Eigen::MatrixXd> own_llt_;
  std::vector<int> w_;    // working set rows
  Eigen::MatrixXd v_;     // H^{-1} A_W', one column per working row
  Eigen::LDLT<Eigen::MatrixXd> s_ldlt_;  // factor of A_W H^{-1} A_W'
};

}  // namespace detail

inline QpSolution solve_qp(const QpProblem& problem, const QpOptions& options = {}) {
  detail::ActiveSetSolver solver(problem, options);
  return solver.run();
}

}  // namespace cgps

#endif  // CGPS_QP_HPP
