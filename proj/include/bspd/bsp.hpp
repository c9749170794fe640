// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "bspd/channel.hpp"

namespace bspd {

// Per-subcarrier row traced by a path sitting on grid direction `center`.
struct BeamSplitPattern {
  GridIndex center = 0;
  std::vector<GridIndex> rows;  // one row per subcarrier

  std::size_t size() const { return rows.size(); }
};

// Row m of the pattern is the grid sample nearest (f_m / f_c) * theta_center.
inline BeamSplitPattern beam_split_pattern(GridIndex center, const AngleGrid& grid,
                                           const std::vector<double>& freqs, double f_c,
                                           GridEdge edge = GridEdge::periodic) {
  if (center >= grid.size()) throw InvalidParameter("beam_split_pattern: index out of range");
  BeamSplitPattern p;
  p.center = center;
  p.rows.reserve(freqs.size());
  for (double f : freqs) p.rows.push_back(grid.nearest(spatial_direction(grid[center], f, f_c), edge));
  return p;
}

// All N patterns for one (N, M, f_c, B); read-only after construction.
class PatternBank {
 public:
  explicit PatternBank(const SystemModel& model, GridEdge edge = GridEdge::periodic) : edge_(edge) {
    patterns_.reserve(model.n());
    for (GridIndex n = 0; n < model.n(); ++n)
      patterns_.push_back(beam_split_pattern(n, model.grid, model.freqs, model.cfg.carrier_hz, edge));
  }

  std::size_t size() const { return patterns_.size(); }
  const BeamSplitPattern& operator[](GridIndex n) const { return patterns_[n]; }
  GridEdge edge() const { return edge_; }

 private:
  std::vector<BeamSplitPattern> patterns_;
  GridEdge edge_;
};

struct SupportWindow {
  GridIndex center = 0;
  std::size_t halfwidth = 0;
  std::vector<IndexSet> per_subcarrier;  // each of size 2*halfwidth + 1

  std::vector<std::pair<GridIndex, std::size_t>> flattened() const {
    std::vector<std::pair<GridIndex, std::size_t>> out;
    for (std::size_t m = 0; m < per_subcarrier.size(); ++m)
      for (GridIndex r : per_subcarrier[m]) out.emplace_back(r, m);
    return out;
  }
};

// Rows row-halfwidth..row+halfwidth around `row`, wrapped modulo N.
inline IndexSet window_rows(GridIndex row, std::size_t halfwidth, std::size_t n) {
  if (2 * halfwidth + 1 > n) throw InvalidParameter("window: 2*Delta+1 exceeds N");
  IndexSet out;
  out.reserve(2 * halfwidth + 1);
  const auto nn = static_cast<std::ptrdiff_t>(n);
  const auto d = static_cast<std::ptrdiff_t>(halfwidth);
  for (std::ptrdiff_t b = -d; b <= d; ++b)
    out.push_back(static_cast<GridIndex>(((static_cast<std::ptrdiff_t>(row) + b) % nn + nn) % nn));
  return out;
}

inline SupportWindow expand_window(const BeamSplitPattern& pattern, std::size_t halfwidth, std::size_t n) {
  if (2 * halfwidth + 1 > n) throw InvalidParameter("expand_window: 2*Delta+1 exceeds N");
  SupportWindow w;
  w.center = pattern.center;
  w.halfwidth = halfwidth;
  w.per_subcarrier.reserve(pattern.size());
  for (GridIndex r : pattern.rows) w.per_subcarrier.push_back(window_rows(r, halfwidth, n));
  return w;
}

// sum over (i, m) in W of |Q(i, m)|^2, divided by ||Q||_F^2.
inline double captured_power_fraction(const CMatrix& q, const SupportWindow& w) {
  if (static_cast<std::size_t>(q.cols()) != w.per_subcarrier.size())
    throw DimensionMismatch("captured_power_fraction: window/matrix subcarrier count differ");
  double captured = 0.0;
  for (std::size_t m = 0; m < w.per_subcarrier.size(); ++m)
    for (GridIndex r : w.per_subcarrier[m]) {
      if (r >= static_cast<std::size_t>(q.rows()))
        throw DimensionMismatch("captured_power_fraction: row out of range");
      captured += std::norm(q(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m)));
    }
  return captured / q.squaredNorm();
}

// ||Q(Xi)||^2 for a pattern (one entry per subcarrier).
inline double pattern_power(const CMatrix& q, const BeamSplitPattern& p) {
  double s = 0.0;
  for (std::size_t m = 0; m < p.rows.size(); ++m)
    s += std::norm(q(static_cast<Eigen::Index>(p.rows[m]), static_cast<Eigen::Index>(m)));
  return s;
}

namespace detail {

template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

// Composite adaptive Simpson: `panels` equal panels, each refined to tol / panels.
template <class F>
double integrate(const F& f, double a, double b, double tol, std::size_t panels = 2048) {
  const double h = (b - a) / static_cast<double>(panels);
  const double panel_tol = tol / static_cast<double>(panels);
  double sum = 0.0;
  double x0 = a;
  double f0 = f(x0);
  for (std::size_t i = 0; i < panels; ++i) {
    const double x1 = (i + 1 == panels) ? b : a + h * static_cast<double>(i + 1);
    const double xm = 0.5 * (x0 + x1);
    const double fm = f(xm);
    const double f1 = f(x1);
    const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
    sum += adaptive_simpson(f, x0, x1, f0, fm, f1, whole, panel_tol, 40);
    x0 = x1;
    f0 = f1;
  }
  return sum;
}

}  // namespace detail

// gamma = (1 / 2N) sum_{b=-Delta}^{Delta} int_{-1/N}^{1/N} Gamma^2(x - 2b/N) dx,
// the expected share of a path's angle-domain power inside a (2 Delta + 1)-wide
// window when the split offset is uniform over one grid cell.
inline double capture_ratio_analytic(std::size_t halfwidth, std::size_t n, double tol = 1e-6) {
  if (2 * halfwidth + 1 > n) throw InvalidParameter("capture_ratio_analytic: 2*Delta+1 exceeds N");
  const double nn = static_cast<double>(n);
  // The tolerance applies to gamma; scale it to the raw integral.
  const double raw_tol = tol * 2.0 * nn / static_cast<double>(2 * halfwidth + 1);
  const auto d = static_cast<long long>(halfwidth);
  double total = 0.0;
  for (long long b = -d; b <= d; ++b) {
    const double shift = 2.0 * static_cast<double>(b) / nn;
    auto g2 = [&](double x) {
      const double g = dirichlet_kernel(x - shift, n);
      return g * g;
    };
    total += detail::integrate(g2, -1.0 / nn, 1.0 / nn, raw_tol);
  }
  return total / (2.0 * nn);
}

// Discrete form: (1 / M N^2) sum_b sum_m Gamma^2(dtheta_m - 2b/N) with
// dtheta_m = -1/N + (m - 1) * 2 / (N M).
inline double capture_ratio_discrete(std::size_t halfwidth, std::size_t n, std::size_t m_count) {
  if (2 * halfwidth + 1 > n) throw InvalidParameter("capture_ratio_discrete: 2*Delta+1 exceeds N");
  if (m_count == 0) throw InvalidParameter("capture_ratio_discrete: M must be >= 1");
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m_count);
  const auto d = static_cast<long long>(halfwidth);
  double total = 0.0;
  for (long long b = -d; b <= d; ++b)
    for (std::size_t m = 0; m < m_count; ++m) {
      const double dtheta = -1.0 / nn + static_cast<double>(m) * 2.0 / (nn * mm);
      const double g = dirichlet_kernel(dtheta - 2.0 * static_cast<double>(b) / nn, n);
      total += g * g;
    }
  return total / (mm * nn * nn);
}

// mu = max_{i != j} |A(:, i)^H A(:, j)|.
inline double subcoherence(const CMatrix& a) {
  if (a.cols() < 2) throw InvalidParameter("subcoherence: need at least two columns");
  const CMatrix gram = a.adjoint() * a;
  double mu = 0.0;
  for (Eigen::Index j = 0; j < gram.cols(); ++j)
    for (Eigen::Index i = 0; i < j; ++i) mu = std::max(mu, std::abs(gram(i, j)));
  return mu;
}

}  // namespace bspd
