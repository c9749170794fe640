// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "bspd/channel.hpp"

namespace bspd {

struct CombinerSet {
  std::vector<CMatrix> slots;  // A_p, each N_RF x N, |entry| = 1/sqrt(N)
  CMatrix stacked;             // row-stack of A_1..A_P
  CMatrix effective;           // stacked * F^H; acts on angle-domain channels

  std::size_t rows() const { return static_cast<std::size_t>(stacked.rows()); }
};

struct PilotObservation {
  CMatrix y;  // N_RF P x M
  double sigma2 = 0.0;
};

// Constant-modulus analog combiners with i.i.d. uniform phases. Slot p is drawn
// from seed.split(p), so the first P slots are the same for any total P.
inline CombinerSet make_combiners(Seed seed, const SystemModel& model) {
  const auto& cfg = model.cfg;
  const auto n = static_cast<Eigen::Index>(cfg.n_antennas);
  const auto n_rf = static_cast<Eigen::Index>(cfg.n_rf);
  const double amp = 1.0 / std::sqrt(static_cast<double>(cfg.n_antennas));
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);

  CombinerSet comb;
  comb.stacked.resize(n_rf * static_cast<Eigen::Index>(cfg.pilot_slots), n);
  for (std::size_t p = 0; p < cfg.pilot_slots; ++p) {
    auto eng = seed.split(p).engine();
    CMatrix a(n_rf, n);
    for (Eigen::Index i = 0; i < n_rf; ++i)
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = std::polar(amp, phase(eng));
    comb.stacked.middleRows(static_cast<Eigen::Index>(p) * n_rf, n_rf) = a;
    comb.slots.push_back(std::move(a));
  }
  comb.effective.noalias() = comb.stacked * model.transform.adjoint();
  return comb;
}

// SNR = 1 / sigma^2.
inline double snr_to_sigma2(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

// y_{m,p} = A_p h_m + A_p n_{m,p} with unit pilots and n ~ CN(0, sigma2 I_N).
// Slot p's antenna noise is drawn from seed.split(p); the unit-variance draws
// do not depend on sigma2, so SNR sweeps see common random numbers.
inline PilotObservation observe(const ChannelRealization& ch, const CombinerSet& comb,
                                double sigma2, Seed seed) {
  if (comb.slots.empty() || comb.stacked.cols() != ch.spatial.rows())
    throw DimensionMismatch("observe: combiner width does not match antenna count");
  if (!(sigma2 >= 0.0)) throw InvalidParameter("observe: sigma2 must be >= 0");

  const auto n = ch.spatial.rows();
  const auto m_count = ch.spatial.cols();
  const auto n_rf = comb.slots.front().rows();

  PilotObservation obs;
  obs.sigma2 = sigma2;
  obs.y.resize(comb.stacked.rows(), m_count);
  CMatrix received(n, m_count);
  const double s = std::sqrt(sigma2 / 2.0);
  for (std::size_t p = 0; p < comb.slots.size(); ++p) {
    const auto& a = comb.slots[p];
    if (a.rows() != n_rf || a.cols() != n)
      throw DimensionMismatch("observe: inconsistent combiner slot shape");
    if (sigma2 > 0.0) {
      auto eng = seed.split(p).engine();
      std::normal_distribution<double> unit(0.0, 1.0);
      for (Eigen::Index m = 0; m < m_count; ++m)
        for (Eigen::Index k = 0; k < n; ++k) {
          const double re = unit(eng);
          const double im = unit(eng);
          received(k, m) = ch.spatial(k, m) + Complex(s * re, s * im);
        }
      obs.y.middleRows(static_cast<Eigen::Index>(p) * n_rf, n_rf).noalias() = a * received;
    } else {
      obs.y.middleRows(static_cast<Eigen::Index>(p) * n_rf, n_rf).noalias() = a * ch.spatial;
    }
  }
  return obs;
}

}  // namespace bspd
