// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bspd/error.hpp"
#include "bspd/types.hpp"

namespace bspd {

inline constexpr double kLightSpeed = 2.99792458e8;  // m/s

// Scalar parameters of the uplink hybrid-combining THz system.
struct SystemConfig {
  std::size_t n_antennas = 256;      // N, half-wavelength ULA at f_c
  std::size_t n_rf = 8;              // N_RF
  std::size_t n_subcarriers = 512;   // M
  std::size_t n_users = 8;           // K; one user is simulated (orthogonal pilots)
  std::size_t pilot_slots = 10;      // P
  double carrier_hz = 100e9;         // f_c
  double bandwidth_hz = 15e9;        // B
  std::size_t n_paths = 3;           // L
  std::size_t window_halfwidth = 4;  // Delta

  // d = c / (2 f_c); derived, never stored.
  double antenna_spacing() const { return kLightSpeed / (2.0 * carrier_hz); }

  std::size_t pilot_rows() const { return n_rf * pilot_slots; }
  std::size_t window_size() const { return 2 * window_halfwidth + 1; }

  // Throws InvalidParameter naming the first violated field.
  void validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
      throw InvalidParameter("SystemConfig." + field + ": " + why);
    };
    if (n_antennas < 1) fail("n_antennas", "must be >= 1");
    if (n_rf < 1 || n_rf > n_antennas) fail("n_rf", "must satisfy 1 <= n_rf <= n_antennas");
    if (n_subcarriers < 1) fail("n_subcarriers", "must be >= 1");
    if (pilot_slots < 1) fail("pilot_slots", "must be >= 1");
    if (n_paths < 1) fail("n_paths", "must be >= 1");
    if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz)) fail("carrier_hz", "must be positive");
    if (!(bandwidth_hz >= 0.0) || !(bandwidth_hz < carrier_hz))
      fail("bandwidth_hz", "must satisfy 0 <= B < f_c");
    if (2 * window_halfwidth + 1 > n_antennas)
      fail("window_halfwidth", "must satisfy 2*Delta+1 <= n_antennas");
  }
};

// How a direction sine outside the grid's span is matched to a grid sample.
enum class GridEdge {
  periodic,  // steering vectors are 2-periodic in theta; match on the circle
  clamp,     // plain |theta - grid_n| over n, no wrap
};

// Angle-domain samples theta_n = (2n - N - 1) / N, stored zero-based.
class AngleGrid {
 public:
  explicit AngleGrid(std::size_t n) : samples_(n) {
    if (n == 0) throw InvalidParameter("angle_grid: N must be >= 1");
    const double nn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      samples_[i] = (2.0 * static_cast<double>(i + 1) - nn - 1.0) / nn;
  }

  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](GridIndex i) const { return samples_[i]; }
  double spacing() const noexcept { return 2.0 / static_cast<double>(size()); }
  const std::vector<double>& samples() const noexcept { return samples_; }

  // Nearest sample to theta. Ties go to the smaller index.
  GridIndex nearest(double theta, GridEdge edge = GridEdge::periodic) const {
    const auto n = static_cast<std::ptrdiff_t>(size());
    const double pos = (static_cast<double>(n) * theta + static_cast<double>(n) - 1.0) / 2.0;
    const auto base = static_cast<std::ptrdiff_t>(std::floor(pos));
    GridIndex best = 0;
    double best_dist = INFINITY;
    for (std::ptrdiff_t cand = base - 1; cand <= base + 2; ++cand) {
      std::ptrdiff_t idx = cand;
      if (edge == GridEdge::periodic) {
        idx = ((cand % n) + n) % n;
      } else if (idx < 0 || idx >= n) {
        idx = idx < 0 ? 0 : n - 1;
      }
      const double d = distance(theta, static_cast<GridIndex>(idx), edge);
      const auto gi = static_cast<GridIndex>(idx);
      if (d < best_dist || (d == best_dist && gi < best)) {
        best_dist = d;
        best = gi;
      }
    }
    return best;
  }

  double distance(double theta, GridIndex i, GridEdge edge = GridEdge::periodic) const {
    double d = theta - samples_[i];
    if (edge == GridEdge::periodic) d = d - 2.0 * std::floor((d + 1.0) / 2.0);
    return std::abs(d);
  }

 private:
  std::vector<double> samples_;
};

inline AngleGrid angle_grid(std::size_t n) { return AngleGrid(n); }

// f_m = f_c + (B/M)(m - 1 - (M-1)/2), m = 1..M.
inline std::vector<double> subcarrier_frequencies(const SystemConfig& cfg) {
  cfg.validate();
  const auto m_count = cfg.n_subcarriers;
  const double step = cfg.bandwidth_hz / static_cast<double>(m_count);
  const double mid = (static_cast<double>(m_count) - 1.0) / 2.0;
  std::vector<double> f(m_count);
  for (std::size_t m = 0; m < m_count; ++m)
    f[m] = cfg.carrier_hz + step * (static_cast<double>(m) - mid);
  return f;
}

// a(theta)_k = exp(-j pi k theta) / sqrt(N), k = 0..N-1.
inline CVector steering_vector(double theta, std::size_t n) {
  if (n == 0) throw InvalidParameter("steering_vector: N must be >= 1");
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  CVector a(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k)
    a(static_cast<Eigen::Index>(k)) = std::polar(amp, -kPi * static_cast<double>(k) * theta);
  return a;
}

// Unitary spatial DFT: row n is a(theta_n)^H.
inline CMatrix angle_transform(std::size_t n) {
  const AngleGrid grid(n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  const auto ni = static_cast<Eigen::Index>(n);
  CMatrix f(ni, ni);
  for (Eigen::Index r = 0; r < ni; ++r)
    for (Eigen::Index k = 0; k < ni; ++k)
      f(r, k) = std::polar(amp, kPi * static_cast<double>(k) * grid[static_cast<GridIndex>(r)]);
  return f;
}

}  // namespace bspd
