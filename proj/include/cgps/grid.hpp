#ifndef CGPS_GRID_HPP
#define CGPS_GRID_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

namespace cgps {

struct Interval {
  double a;
  double b;
};

// Compact domain F: a finite union of disjoint closed intervals inside [0,1],
// with 0 in the first and 1 in the last. F is where functions live; the
// complement holes are bridged affinely by the extension operator.
class DomainF {
 public:
  explicit DomainF(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
    if (intervals_.empty()) throw std::invalid_argument("DomainF: empty interval list");
    for (const auto& iv : intervals_)
      if (!(iv.a <= iv.b)) throw std::invalid_argument("DomainF: interval with a > b");
    for (std::size_t i = 0; i + 1 < intervals_.size(); ++i)
      if (!(intervals_[i].b < intervals_[i + 1].a))
        throw std::invalid_argument("DomainF: intervals must be sorted and disjoint");
    if (intervals_.front().a != 0.0 || intervals_.back().b != 1.0)
      throw std::invalid_argument("DomainF: must contain 0 and 1");
  }

  static DomainF unit() { return DomainF({{0.0, 1.0}}); }

  const std::vector<Interval>& intervals() const { return intervals_; }

  bool is_unit() const { return intervals_.size() == 1; }

  bool contains(double t) const {
    for (const auto& iv : intervals_)
      if (t >= iv.a && t <= iv.b) return true;
    return false;
  }

  // Flanking boundary points of the hole containing t (t must lie in a hole).
  Interval hole_around(double t) const {
    for (std::size_t i = 0; i + 1 < intervals_.size(); ++i)
      if (t > intervals_[i].b && t < intervals_[i + 1].a)
        return {intervals_[i].b, intervals_[i + 1].a};
    throw std::invalid_argument("DomainF::hole_around: t is not in a hole");
  }

  // Dense audit sample of F: an equispaced closed grid per interval. All
  // sup-type quantities in the library are maxima over such a sample.
  std::vector<double> audit_points(int per_interval = 2001) const {
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(per_interval) * intervals_.size());
    for (const auto& iv : intervals_) {
      if (iv.a == iv.b) {
        pts.push_back(iv.a);
        continue;
      }
      for (int i = 0; i < per_interval; ++i) {
        const double s = static_cast<double>(i) / (per_interval - 1);
        pts.push_back(iv.a + s * (iv.b - iv.a));
      }
    }
    return pts;
  }

  bool operator==(const DomainF& other) const {
    if (intervals_.size() != other.intervals_.size()) return false;
    for (std::size_t i = 0; i < intervals_.size(); ++i)
      if (intervals_[i].a != other.intervals_[i].a || intervals_[i].b != other.intervals_[i].b)
        return false;
    return true;
  }

 private:
  std::vector<Interval> intervals_;
};

// Left/right flanking knots of t and the affine weights between them.
// At a knot both sides coincide and the weights are 1/2 each.
struct Neighbors {
  double t_minus;
  double t_plus;
  double w_minus;
  double w_plus;
  std::size_t i_minus;  // knot indices (equal when t is a knot)
  std::size_t i_plus;
};

// Sorted knot set t_1 = 0 < ... < t_N = 1 inside the domain F, with an
// optional link to the grid it refines (nesting history).
class KnotGrid {
 public:
  KnotGrid(std::vector<double> knots, DomainF domain,
           std::shared_ptr<const KnotGrid> parent = nullptr)
      : knots_(std::move(knots)), domain_(std::move(domain)), parent_(std::move(parent)) {
    if (knots_.size() < 2) throw std::invalid_argument("KnotGrid: need at least knots {0, 1}");
    if (knots_.front() != 0.0 || knots_.back() != 1.0)
      throw std::invalid_argument("KnotGrid: knots must start at 0 and end at 1");
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
      if (!(knots_[i] < knots_[i + 1]))
        throw std::invalid_argument("KnotGrid: knots must be strictly increasing");
    for (double t : knots_)
      if (!domain_.contains(t))
        throw std::invalid_argument("KnotGrid: knot outside the domain F");
    if (parent_) {
      for (double t : parent_->knots_)
        if (!std::binary_search(knots_.begin(), knots_.end(), t))
          throw std::invalid_argument("KnotGrid: parent knots must be nested in child");
    }
  }

  static KnotGrid equispaced(std::size_t n, DomainF domain = DomainF::unit()) {
    if (!domain.is_unit())
      throw std::invalid_argument("KnotGrid::equispaced: only defined on F = [0,1]");
    if (n < 2) throw std::invalid_argument("KnotGrid::equispaced: n >= 2 required");
    std::vector<double> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = static_cast<double>(i) / (n - 1);
    k.front() = 0.0;
    k.back() = 1.0;
    return KnotGrid(std::move(k), std::move(domain));
  }

  std::size_t size() const { return knots_.size(); }
  const std::vector<double>& knots() const { return knots_; }
  double knot(std::size_t i) const { return knots_[i]; }
  const DomainF& domain() const { return domain_; }
  const std::shared_ptr<const KnotGrid>& parent() const { return parent_; }

  // New nested grid with one inserted knot; this grid becomes the parent.
  KnotGrid refined_with(double t) const {
    if (std::binary_search(knots_.begin(), knots_.end(), t))
      throw std::invalid_argument("KnotGrid::refined_with: duplicate knot");
    std::vector<double> k = knots_;
    k.insert(std::upper_bound(k.begin(), k.end(), t), t);
    return KnotGrid(std::move(k), domain_, std::make_shared<KnotGrid>(*this));
  }

  Neighbors neighbors(double t) const {
    if (!(t >= 0.0 && t <= 1.0))
      throw std::invalid_argument("KnotGrid::neighbors: t outside [0,1]");
    const auto it = std::lower_bound(knots_.begin(), knots_.end(), t);
    const auto idx = static_cast<std::size_t>(it - knots_.begin());
    if (it != knots_.end() && *it == t) return {t, t, 0.5, 0.5, idx, idx};
    const std::size_t hi = idx;  // first knot > t; t1 = 0 guarantees hi >= 1
    const std::size_t lo = hi - 1;
    const double tm = knots_[lo], tp = knots_[hi];
    const double wm = (tp - t) / (tp - tm);
    return {tm, tp, wm, 1.0 - wm, lo, hi};
  }

  // Hat function phi_i, with the conventions t_0 = -1 and t_{N+1} = 2.
  double hat(std::size_t i, double t) const {
    if (i >= knots_.size()) throw std::invalid_argument("KnotGrid::hat: index out of range");
    const double ti = knots_[i];
    const double tl = (i == 0) ? -1.0 : knots_[i - 1];
    const double tr = (i + 1 == knots_.size()) ? 2.0 : knots_[i + 1];
    if (t >= tl && t <= ti) return (t - tl) / (ti - tl);
    if (t > ti && t <= tr) return (tr - t) / (tr - ti);
    return 0.0;
  }

  // Grid size delta_N = sup_{t in F} min(|t - t^-|, |t - t^+|), computed
  // exactly per F-interval. Knots outside an interval do not shrink the
  // distance for t inside it; a missing side counts as +infinity, so the sup
  // over an interior gap is half its width and a bare end contributes its
  // full distance to the nearest interior knot.
  double delta() const {
    double worst = 0.0;
    for (const auto& iv : domain_.intervals()) {
      auto lo = std::lower_bound(knots_.begin(), knots_.end(), iv.a);
      auto hi = std::upper_bound(knots_.begin(), knots_.end(), iv.b);
      if (lo == hi) return std::numeric_limits<double>::infinity();  // no knot in this interval
      double local = std::max(*lo - iv.a, iv.b - *(hi - 1));
      for (auto it = lo; it + 1 < hi; ++it) local = std::max(local, 0.5 * (*(it + 1) - *it));
      worst = std::max(worst, local);
    }
    return worst;
  }

  // Audit sample of F refined with the knots themselves.
  std::vector<double> audit_points(int per_interval = 2001) const {
    std::vector<double> pts = domain_.audit_points(per_interval);
    pts.insert(pts.end(), knots_.begin(), knots_.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  }

  bool same_knots(const KnotGrid& other) const {
    return knots_ == other.knots_ && domain_ == other.domain_;
  }

 private:
  std::vector<double> knots_;
  DomainF domain_;
  std::shared_ptr<const KnotGrid> parent_;
};

// Piecewise-linear function sum_j c_j phi_j; c_j is the value at knot t_j.
// For knot-based functions the hat expansion and the multi-affine extension
// agree everywhere on [0,1], since holes of F contain no knots.
class PiecewiseLinear {
 public:
  PiecewiseLinear(KnotGrid grid, std::vector<double> coeffs)
      : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.size())
      throw std::invalid_argument("PiecewiseLinear: coefficient count != knot count");
  }

  const KnotGrid& grid() const { return grid_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  std::vector<double>& coeffs() { return coeffs_; }

  double operator()(double t) const {
    const Neighbors nb = grid_.neighbors(t);
    if (nb.i_minus == nb.i_plus) return coeffs_[nb.i_minus];
    return coeffs_[nb.i_minus] * nb.w_minus + coeffs_[nb.i_plus] * nb.w_plus;
  }

 private:
  KnotGrid grid_;
  std::vector<double> coeffs_;
};

// pi_N: piecewise affine interpolation of f at the knots.
template <typename F>
PiecewiseLinear project_pi(const KnotGrid& grid, F&& f) {
  std::vector<double> c(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) c[j] = f(grid.knot(j));
  return PiecewiseLinear(grid, std::move(c));
}

// Multi-affine extension P(u)(t) for an arbitrary function u on F: the value
// of u on F, and the affine bridge between the hole's boundary values off F.
// Linear in u and 1-Lipschitz for the sup norm.
template <typename F>
double extend_multi_affine(const DomainF& domain, F&& u, double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("extend_multi_affine: t outside [0,1]");
  if (domain.contains(t)) return u(t);
  const Interval hole = domain.hole_around(t);
  const double wm = (hole.b - t) / (hole.b - hole.a);
  return u(hole.a) * wm + u(hole.b) * (1.0 - wm);
}

}  // namespace cgps

#endif  // CGPS_GRID_HPP
