// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "bspd/model.hpp"
#include "bspd/random.hpp"

namespace bspd {

inline constexpr double kDefaultMaxDelay = 20e-9;  // s

struct PathComponent {
  Complex gain;            // g_l ~ CN(0, 1)
  double delay = 0.0;      // tau_l in [0, tau_max]
  double direction = 0.0;  // psi_l = sin(physical angle), in (-1, 1)
};

struct ChannelRealization {
  std::vector<PathComponent> paths;
  CMatrix spatial;  // N x M, column m = h_m
  CMatrix angle;    // N x M, column m = F h_m
};

// theta_{l,m} = (2 f_m / c) d psi with d = c / (2 f_c).
inline double spatial_direction(double psi, double f_m, double f_c) {
  if (!(f_c > 0.0)) throw InvalidParameter("spatial_direction: f_c must be positive");
  return (f_m / f_c) * psi;
}

inline std::vector<PathComponent> sample_paths(Seed seed, const SystemConfig& cfg,
                                               double tau_max = kDefaultMaxDelay) {
  if (cfg.n_paths < 1) throw InvalidParameter("sample_paths: n_paths must be >= 1");
  if (!(tau_max > 0.0)) throw InvalidParameter("sample_paths: tau_max must be positive");
  auto eng = seed.engine();
  std::uniform_real_distribution<double> angle(-kPi / 2.0, kPi / 2.0);
  std::uniform_real_distribution<double> delay(0.0, tau_max);
  std::vector<PathComponent> paths(cfg.n_paths);
  for (auto& p : paths) {
    p.gain = complex_normal(eng);
    p.direction = std::sin(angle(eng));
    p.delay = delay(eng);
  }
  return paths;
}

// Moves every direction onto its nearest grid sample.
inline void snap_to_grid(std::vector<PathComponent>& paths, const AngleGrid& grid) {
  for (auto& p : paths) p.direction = grid[grid.nearest(p.direction)];
}

// h_m = sqrt(N/L) sum_l g_l exp(-j 2 pi tau_l f_m) a(theta_{l,m}); angle part is F h_m.
inline ChannelRealization assemble_channel(std::span<const PathComponent> paths,
                                           const SystemModel& model) {
  if (paths.empty()) throw InvalidParameter("assemble_channel: no paths");
  const auto n = static_cast<Eigen::Index>(model.n());
  const auto m_count = static_cast<Eigen::Index>(model.m());
  // sqrt(N/L) * (1/sqrt(N)) from the steering vector normalization.
  const double amp = 1.0 / std::sqrt(static_cast<double>(paths.size()));

  ChannelRealization ch;
  ch.paths.assign(paths.begin(), paths.end());
  ch.spatial = CMatrix::Zero(n, m_count);
  for (const auto& p : paths) {
    for (Eigen::Index m = 0; m < m_count; ++m) {
      const double f_m = model.freqs[static_cast<std::size_t>(m)];
      const double theta = spatial_direction(p.direction, f_m, model.cfg.carrier_hz);
      const Complex coeff = amp * p.gain * std::polar(1.0, -2.0 * kPi * p.delay * f_m);
      for (Eigen::Index k = 0; k < n; ++k)
        ch.spatial(k, m) += coeff * std::polar(1.0, -kPi * static_cast<double>(k) * theta);
    }
  }
  ch.angle.noalias() = model.transform * ch.spatial;
  return ch;
}

// Gamma(x) = sin(N pi x / 2) / sin(pi x / 2), with the limit value at the
// removable singularities x = 2k (N for k = 0; sign (-1)^{k(N-1)} elsewhere).
inline double dirichlet_kernel(double x, std::size_t n) {
  const double nn = static_cast<double>(n);
  const double k = std::round(x / 2.0);
  const double eps = x - 2.0 * k;
  if (std::abs(eps) < 1e-12) {
    const bool odd = (static_cast<long long>(k) % 2 != 0) && (n % 2 == 0);
    return odd ? -nn : nn;
  }
  return std::sin(nn * kPi * x / 2.0) / std::sin(kPi * x / 2.0);
}

// Q = [F a(theta_1), ..., F a(theta_M)] for a unit-gain, zero-delay path at psi.
inline CMatrix angle_domain_response(double psi, const SystemModel& model) {
  const auto n = static_cast<Eigen::Index>(model.n());
  const auto m_count = static_cast<Eigen::Index>(model.m());
  CMatrix spatial(n, m_count);
  for (Eigen::Index m = 0; m < m_count; ++m)
    spatial.col(m) = steering_vector(psi * model.split_ratio(static_cast<std::size_t>(m)), model.n());
  return model.transform * spatial;
}

}  // namespace bspd
