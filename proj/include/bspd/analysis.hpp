// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "bspd/estimators.hpp"
#include "bspd/parallel.hpp"

namespace bspd {

inline constexpr double kNmseFloorDb = -300.0;

inline double ratio_to_db(double ratio) {
  if (!(ratio > 0.0)) return kNmseFloorDb;
  return std::max(kNmseFloorDb, 10.0 * std::log10(ratio));
}

// ||H_hat - H||_F^2 / ||H||_F^2 (linear).
inline double nmse_ratio(const CMatrix& h_hat, const CMatrix& h_true) {
  if (h_hat.rows() != h_true.rows() || h_hat.cols() != h_true.cols())
    throw DimensionMismatch("nmse: shape mismatch");
  const double ref = h_true.squaredNorm();
  if (!(ref > 0.0)) throw InvalidParameter("nmse: true channel is zero");
  return (h_hat - h_true).squaredNorm() / ref;
}

inline double nmse_db(const CMatrix& h_hat, const CMatrix& h_true) {
  return ratio_to_db(nmse_ratio(h_hat, h_true));
}

// Trial aggregation: mean of linear ratios, reported in dB.
inline double mean_nmse_db(const std::vector<double>& ratios) {
  if (ratios.empty()) throw InvalidParameter("mean_nmse_db: no trials");
  double s = 0.0;
  for (double r : ratios) s += r;
  return ratio_to_db(s / static_cast<double>(ratios.size()));
}

// P{|d|^2 >= r^2} <= 0.8 r^{-1} exp(-r^2 / 2) for a unit complex Gaussian d.
inline double gaussian_tail_bound(double r) {
  if (!(r > 0.0)) throw InvalidParameter("gaussian_tail_bound: r must be positive");
  return std::min(1.0, 0.8 / r * std::exp(-r * r / 2.0));
}

// (1 - 0.8 alpha^{-1/2} exp(-alpha/2))^M, clamped to [0, 1].
inline double lemma3_probability(double alpha, std::size_t m_count) {
  if (!(alpha > 0.0)) throw InvalidParameter("lemma3_probability: alpha must be positive");
  if (std::isinf(alpha)) return 1.0;
  const double miss = 0.8 / std::sqrt(alpha) * std::exp(-alpha / 2.0);
  if (miss >= 1.0) return 0.0;
  return std::clamp(std::exp(static_cast<double>(m_count) * std::log1p(-miss)), 0.0, 1.0);
}

// H = V B: for every pattern n, Upsilon_n collects the rows the pattern visits;
// B_n = H(Upsilon_n, :) for the directions hosting a path and zero otherwise.
struct BlockDecomposition {
  std::vector<IndexSet> row_sets;   // Upsilon_n for n = 0..N-1, sorted
  std::vector<GridIndex> hosts;     // n_1..n_L
  std::vector<CMatrix> blocks;      // B_{n_l}, aligned with hosts
  Eigen::Index n_rows = 0;
  Eigen::Index n_cols = 0;

  // V B. Rows claimed by several hosts are summed, as the placement matrix does.
  CMatrix reconstruct() const {
    CMatrix h = CMatrix::Zero(n_rows, n_cols);
    for (std::size_t l = 0; l < hosts.size(); ++l) {
      const auto& rows = row_sets[hosts[l]];
      for (std::size_t i = 0; i < rows.size(); ++i)
        h.row(static_cast<Eigen::Index>(rows[i])) += blocks[l].row(static_cast<Eigen::Index>(i));
    }
    return h;
  }
};

inline BlockDecomposition block_decomposition(const CMatrix& h_angle, const PatternBank& bank,
                                              const std::vector<GridIndex>& hosts) {
  if (static_cast<std::size_t>(h_angle.rows()) != bank.size())
    throw DimensionMismatch("block_decomposition: pattern bank does not match channel rows");
  BlockDecomposition bd;
  bd.n_rows = h_angle.rows();
  bd.n_cols = h_angle.cols();
  bd.row_sets.reserve(bank.size());
  for (GridIndex n = 0; n < bank.size(); ++n) bd.row_sets.push_back(detail::sorted_unique(bank[n].rows));
  bd.hosts = hosts;
  for (GridIndex n : hosts) {
    if (n >= bank.size()) throw InvalidParameter("block_decomposition: host index out of range");
    const auto& rows = bd.row_sets[n];
    CMatrix b(static_cast<Eigen::Index>(rows.size()), h_angle.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) b.row(static_cast<Eigen::Index>(i)) = h_angle.row(static_cast<Eigen::Index>(rows[i]));
    bd.blocks.push_back(std::move(b));
  }
  return bd;
}

// Left side of the direction-detection condition for host l:
//   sum_m |B_l(chi(Xi_l(m)), m)| - mu sqrt|Ups_l| ||B_l||_F
//     - 2 mu sum_{i != l} sqrt|Ups_i| ||B_i||_F
inline double lemma3_lhs(const BlockDecomposition& bd, const PatternBank& bank, double mu, std::size_t l) {
  if (l >= bd.hosts.size()) throw InvalidParameter("lemma3: path index out of range");
  const GridIndex host = bd.hosts[l];
  const auto& rows = bd.row_sets[host];
  const auto& block = bd.blocks[l];
  double lead = 0.0;
  const auto& pattern = bank[host];
  for (std::size_t m = 0; m < pattern.size(); ++m) {
    const auto pos = std::lower_bound(rows.begin(), rows.end(), pattern.rows[m]) - rows.begin();
    lead += std::abs(block(static_cast<Eigen::Index>(pos), static_cast<Eigen::Index>(m)));
  }
  double lhs = lead - mu * std::sqrt(static_cast<double>(rows.size())) * block.norm();
  for (std::size_t i = 0; i < bd.hosts.size(); ++i) {
    if (i == l) continue;
    lhs -= 2.0 * mu * std::sqrt(static_cast<double>(bd.row_sets[bd.hosts[i]].size())) * bd.blocks[i].norm();
  }
  return lhs;
}

inline double lemma3_threshold(std::size_t m_count, double sigma2, double alpha) {
  return std::sqrt(2.0 * static_cast<double>(m_count) * sigma2 * alpha);
}

inline bool lemma3_condition(const BlockDecomposition& bd, const PatternBank& bank, double mu,
                             double sigma2, double alpha, std::size_t l) {
  return lemma3_lhs(bd, bank, mu, l) >= lemma3_threshold(static_cast<std::size_t>(bd.n_cols), sigma2, alpha);
}

// Largest alpha with lhs >= sqrt(2 M sigma2 alpha); 0 when no alpha > 0 qualifies.
inline double max_feasible_alpha(double lhs, std::size_t m_count, double sigma2) {
  if (!(lhs > 0.0)) return 0.0;
  if (sigma2 == 0.0) return std::numeric_limits<double>::infinity();
  return lhs * lhs / (2.0 * static_cast<double>(m_count) * sigma2);
}

struct BoundEvaluation {
  double alpha = 0.0;
  bool condition_met = false;
  double probability_bound = 0.0;
  double mu = 0.0;
  double sigma2 = 0.0;
};

// Bound at the largest feasible alpha; probability 0 when the condition cannot hold.
inline BoundEvaluation evaluate_lemma3(const BlockDecomposition& bd, const PatternBank& bank, double mu,
                                       double sigma2, std::size_t l) {
  BoundEvaluation ev;
  ev.mu = mu;
  ev.sigma2 = sigma2;
  const auto m_count = static_cast<std::size_t>(bd.n_cols);
  ev.alpha = max_feasible_alpha(lemma3_lhs(bd, bank, mu, l), m_count, sigma2);
  ev.condition_met = ev.alpha > 0.0;
  ev.probability_bound = ev.condition_met ? lemma3_probability(ev.alpha, m_count) : 0.0;
  return ev;
}

struct DirectionProbability {
  double success_fraction = 0.0;
  double mean_bound = 0.0;           // mean over trials of the per-combiner bound
  std::size_t trials = 0;
  std::size_t condition_trials = 0;  // trials where the condition held
  double mean_mu = 0.0;
};

// Index of the strongest path and the grid sample it sits on. Every path
// must be on the grid.
inline std::vector<GridIndex> on_grid_hosts(const ChannelRealization& ch, const AngleGrid& grid) {
  std::vector<GridIndex> hosts;
  for (const auto& p : ch.paths) {
    const GridIndex n = grid.nearest(p.direction);
    if (std::abs(grid[n] - p.direction) > 1e-12)
      throw InvalidParameter("direction analysis: path direction is not on the angle grid");
    hosts.push_back(n);
  }
  return hosts;
}

inline std::size_t strongest_path(const ChannelRealization& ch) {
  std::size_t best = 0;
  for (std::size_t l = 1; l < ch.paths.size(); ++l)
    if (std::abs(ch.paths[l].gain) > std::abs(ch.paths[best].gain)) best = l;
  return best;
}

// Fraction of trials in which BSPD's first detected direction is the strongest
// path's grid index. The channel is fixed; combiners and noise are redrawn per
// trial from seed.split(trial).
inline DirectionProbability direction_success_probability(const SystemModel& model, const PatternBank& bank,
                                                          const ChannelRealization& ch, double snr_db,
                                                          std::size_t trials, Seed seed, unsigned threads = 1) {
  if (trials == 0) throw InvalidParameter("direction_success_probability: trials must be >= 1");
  const auto hosts = on_grid_hosts(ch, model.grid);
  const std::size_t target_path = strongest_path(ch);
  const GridIndex target = hosts[target_path];
  const BlockDecomposition bd = block_decomposition(ch.angle, bank, hosts);
  const double sigma2 = snr_to_sigma2(snr_db);

  struct Outcome {
    bool hit = false;
    BoundEvaluation bound;
  };
  const auto outcomes = parallel_map(trials, threads, [&](std::size_t t) {
    const Seed ts = seed.split(t);
    const CombinerSet comb = make_combiners(ts.split(stream::kCombiners), model);
    const PilotObservation obs = observe(ch, comb, sigma2, ts.split(stream::kNoise));
    const CMatrix c = comb.effective.adjoint() * obs.y;
    Outcome o;
    o.hit = detect_direction(c, bank) == target;
    o.bound = evaluate_lemma3(bd, bank, subcoherence(comb.effective), sigma2, target_path);
    return o;
  });

  DirectionProbability out;
  out.trials = trials;
  for (const auto& o : outcomes) {
    out.success_fraction += o.hit ? 1.0 : 0.0;
    out.mean_bound += o.bound.probability_bound;
    out.mean_mu += o.bound.mu;
    out.condition_trials += o.bound.condition_met ? 1 : 0;
  }
  const double t = static_cast<double>(trials);
  out.success_fraction /= t;
  out.mean_bound /= t;
  out.mean_mu /= t;
  return out;
}

}  // namespace bspd
