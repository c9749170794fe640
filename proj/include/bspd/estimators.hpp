// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bspd/bsp.hpp"
#include "bspd/least_squares.hpp"
#include "bspd/sensing.hpp"

namespace bspd {

enum class Scheme { bspd, somp, omp_block, oracle };

inline constexpr Scheme kAllSchemes[] = {Scheme::bspd, Scheme::somp, Scheme::omp_block, Scheme::oracle};

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::bspd: return "bspd";
    case Scheme::somp: return "somp";
    case Scheme::omp_block: return "omp-block";
    case Scheme::oracle: return "oracle";
  }
  return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view s) {
  for (Scheme k : kAllSchemes)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

struct EstimateReport {
  Scheme scheme = Scheme::bspd;
  CMatrix h_hat;                        // N x M angle-domain estimate
  std::vector<GridIndex> directions;    // BSPD only: n*_1..n*_L
  std::vector<IndexSet> supports;       // Omega_m, sorted
  std::vector<RVector> residual_norms;  // BSPD only: ||u_m|| before path 1 and after each path
};

namespace detail {

inline IndexSet sorted_unique(IndexSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

// h_m(Omega_m) = pinv(A(:, Omega_m)) y_m from the original pilots.
inline CMatrix reestimate(const CMatrix& y, const CMatrix& a, const std::vector<IndexSet>& supports) {
  CMatrix h = CMatrix::Zero(a.cols(), y.cols());
  for (Eigen::Index m = 0; m < y.cols(); ++m) {
    const auto& omega = supports[static_cast<std::size_t>(m)];
    if (omega.empty()) continue;
    const SupportSolver solver(a, omega);
    const CVector s = solver.solve(y.col(m));
    for (std::size_t j = 0; j < omega.size(); ++j)
      h(static_cast<Eigen::Index>(omega[j]), m) = s(static_cast<Eigen::Index>(j));
  }
  return h;
}

inline void check_shapes(const CMatrix& y, const CMatrix& a, const char* who) {
  if (y.rows() != a.rows())
    throw DimensionMismatch(std::string(who) + ": observation rows do not match sensing matrix");
}

}  // namespace detail

// Index n maximizing ||C(Xi_n)||_F; ties go to the smaller n.
inline GridIndex detect_direction(const CMatrix& correlation, const PatternBank& bank,
                                  RVector* scores = nullptr) {
  GridIndex best = 0;
  double best_score = -1.0;
  if (scores) scores->resize(static_cast<Eigen::Index>(bank.size()));
  for (GridIndex n = 0; n < bank.size(); ++n) {
    const double s = pattern_power(correlation, bank[n]);
    if (scores) (*scores)(static_cast<Eigen::Index>(n)) = s;
    if (s > best_score) {
      best_score = s;
      best = n;
    }
  }
  return best;
}

// Beam split pattern detection: per path, find the direction whose pattern
// captures the most correlation power, expand it into a window, strip the
// window's LS fit from the residual; finally re-fit on the union of windows.
inline EstimateReport bspd_estimate(const CMatrix& y, const CMatrix& a, std::size_t n_paths,
                                    std::size_t halfwidth, const PatternBank& bank) {
  detail::check_shapes(y, a, "bspd_estimate");
  const auto n = static_cast<std::size_t>(a.cols());
  if (bank.size() != n) throw DimensionMismatch("bspd_estimate: pattern bank does not cover the grid");
  if (n_paths * (2 * halfwidth + 1) > static_cast<std::size_t>(a.rows()))
    throw UnderdeterminedSupport("bspd_estimate: L*(2*Delta+1) = " +
                                 std::to_string(n_paths * (2 * halfwidth + 1)) +
                                 " exceeds the " + std::to_string(a.rows()) + " pilot observations");
  const auto m_count = static_cast<std::size_t>(y.cols());
  if (bank[0].size() != m_count) throw DimensionMismatch("bspd_estimate: pattern length != subcarriers");

  EstimateReport rep;
  rep.scheme = Scheme::bspd;
  rep.supports.assign(m_count, {});
  CMatrix u = y;
  rep.residual_norms.push_back(u.colwise().norm().transpose());

  for (std::size_t l = 0; l < n_paths; ++l) {
    const CMatrix c = a.adjoint() * u;
    const GridIndex best = detect_direction(c, bank);
    rep.directions.push_back(best);
    const SupportWindow w = expand_window(bank[best], halfwidth, n);
    for (std::size_t m = 0; m < m_count; ++m) {
      const auto& rows = w.per_subcarrier[m];
      const SupportSolver solver(a, rows);
      const auto mi = static_cast<Eigen::Index>(m);
      const CVector s = solver.solve(u.col(mi));
      u.col(mi) -= solver.columns() * s;
      auto& omega = rep.supports[m];
      omega.insert(omega.end(), rows.begin(), rows.end());
    }
    rep.residual_norms.push_back(u.colwise().norm().transpose());
  }
  for (auto& omega : rep.supports) omega = detail::sorted_unique(std::move(omega));
  rep.h_hat = detail::reestimate(y, a, rep.supports);
  return rep;
}

// Simultaneous OMP: one shared index per iteration, picked by total
// correlation energy across subcarriers; joint LS on the common support.
inline EstimateReport somp_estimate(const CMatrix& y, const CMatrix& a, std::size_t sparsity) {
  detail::check_shapes(y, a, "somp_estimate");
  if (sparsity > static_cast<std::size_t>(std::min(a.rows(), a.cols())))
    throw InvalidParameter("somp_estimate: sparsity exceeds min(N, observations)");
  EstimateReport rep;
  rep.scheme = Scheme::somp;
  rep.h_hat = CMatrix::Zero(a.cols(), y.cols());
  IndexSet support;
  std::vector<bool> taken(static_cast<std::size_t>(a.cols()), false);
  CMatrix u = y;
  CMatrix x;
  for (std::size_t it = 0; it < sparsity; ++it) {
    const RVector energy = (a.adjoint() * u).rowwise().squaredNorm();
    GridIndex best = 0;
    double best_e = -1.0;
    for (Eigen::Index i = 0; i < energy.size(); ++i)
      if (!taken[static_cast<std::size_t>(i)] && energy(i) > best_e) {
        best_e = energy(i);
        best = static_cast<GridIndex>(i);
      }
    taken[best] = true;
    support.push_back(best);
    const SupportSolver solver(a, support);
    x = solver.solve(y);
    u = y - solver.columns() * x;
  }
  for (std::size_t j = 0; j < support.size(); ++j)
    rep.h_hat.row(static_cast<Eigen::Index>(support[j])) = x.row(static_cast<Eigen::Index>(j));
  rep.supports.assign(static_cast<std::size_t>(y.cols()), detail::sorted_unique(support));
  return rep;
}

// Classical OMP on a single observation vector; returns the selected indices.
inline IndexSet omp_support(const CVector& y, const CMatrix& a, std::size_t sparsity) {
  IndexSet support;
  std::vector<bool> taken(static_cast<std::size_t>(a.cols()), false);
  CVector u = y;
  for (std::size_t it = 0; it < sparsity; ++it) {
    const RVector corr = (a.adjoint() * u).cwiseAbs();
    GridIndex best = 0;
    double best_c = -1.0;
    for (Eigen::Index i = 0; i < corr.size(); ++i)
      if (!taken[static_cast<std::size_t>(i)] && corr(i) > best_c) {
        best_c = corr(i);
        best = static_cast<GridIndex>(i);
      }
    taken[best] = true;
    support.push_back(best);
    const SupportSolver solver(a, support);
    u = y - solver.columns() * solver.solve(y);
  }
  return support;
}

enum class BlockRepresentative { first, center };

// OMP once per block of subcarriers; the block shares that support.
inline EstimateReport omp_block_estimate(const CMatrix& y, const CMatrix& a, std::size_t sparsity,
                                         std::size_t block = 16,
                                         BlockRepresentative rep_choice = BlockRepresentative::first) {
  detail::check_shapes(y, a, "omp_block_estimate");
  if (block < 1) throw InvalidParameter("omp_block_estimate: block must be >= 1");
  if (sparsity > static_cast<std::size_t>(std::min(a.rows(), a.cols())))
    throw InvalidParameter("omp_block_estimate: sparsity exceeds min(N, observations)");
  const auto m_count = static_cast<std::size_t>(y.cols());
  EstimateReport rep;
  rep.scheme = Scheme::omp_block;
  rep.h_hat = CMatrix::Zero(a.cols(), y.cols());
  rep.supports.assign(m_count, {});
  if (sparsity == 0) return rep;
  for (std::size_t start = 0; start < m_count; start += block) {
    const std::size_t len = std::min(block, m_count - start);
    const std::size_t pick = rep_choice == BlockRepresentative::first ? start : start + len / 2;
    const IndexSet support = omp_support(y.col(static_cast<Eigen::Index>(pick)), a, sparsity);
    const SupportSolver solver(a, support);
    const CMatrix x = solver.solve(y.middleCols(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(len)));
    for (std::size_t j = 0; j < support.size(); ++j)
      rep.h_hat.block(static_cast<Eigen::Index>(support[j]), static_cast<Eigen::Index>(start), 1,
                      static_cast<Eigen::Index>(len)) = x.row(static_cast<Eigen::Index>(j));
    const IndexSet sorted = detail::sorted_unique(support);
    for (std::size_t m = start; m < start + len; ++m) rep.supports[m] = sorted;
  }
  return rep;
}

// LS with the true per-subcarrier supports: windows of halfwidth Delta around
// each path's split direction, nearest grid sample taken on the periodic grid.
inline EstimateReport oracle_ls_estimate(const CMatrix& y, const CMatrix& a,
                                         const std::vector<PathComponent>& paths,
                                         const SystemModel& model, std::size_t halfwidth,
                                         GridEdge edge = GridEdge::periodic) {
  detail::check_shapes(y, a, "oracle_ls_estimate");
  if (paths.empty()) throw InvalidParameter("oracle_ls_estimate: no path directions");
  const auto m_count = static_cast<std::size_t>(y.cols());
  if (m_count != model.m()) throw DimensionMismatch("oracle_ls_estimate: subcarrier count mismatch");
  EstimateReport rep;
  rep.scheme = Scheme::oracle;
  rep.supports.assign(m_count, {});
  for (std::size_t m = 0; m < m_count; ++m) {
    auto& omega = rep.supports[m];
    for (const auto& p : paths) {
      const GridIndex c = model.grid.nearest(p.direction * model.split_ratio(m), edge);
      const IndexSet rows = window_rows(c, halfwidth, model.n());
      omega.insert(omega.end(), rows.begin(), rows.end());
    }
    omega = detail::sorted_unique(std::move(omega));
    if (omega.size() > static_cast<std::size_t>(a.rows()))
      throw UnderdeterminedSupport("oracle_ls_estimate: support exceeds the pilot observations");
  }
  rep.h_hat = detail::reestimate(y, a, rep.supports);
  return rep;
}

}  // namespace bspd
