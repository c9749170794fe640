// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include "bspd/sysmodel.hpp"

namespace bspd {

// Immutable per-configuration context: the grid, subcarrier frequencies and
// the angle transform. Built once and shared read-only across trials.
struct SystemModel {
  SystemConfig cfg;
  AngleGrid grid;
  std::vector<double> freqs;
  CMatrix transform;  // F

  explicit SystemModel(const SystemConfig& c)
      : cfg(validated(c)),
        grid(c.n_antennas),
        freqs(subcarrier_frequencies(c)),
        transform(angle_transform(c.n_antennas)) {}

  std::size_t n() const { return cfg.n_antennas; }
  std::size_t m() const { return cfg.n_subcarriers; }

  // f_m / f_c
  double split_ratio(std::size_t m) const { return freqs[m] / cfg.carrier_hz; }

 private:
  static const SystemConfig& validated(const SystemConfig& c) {
    c.validate();
    return c;
  }
};

}  // namespace bspd
