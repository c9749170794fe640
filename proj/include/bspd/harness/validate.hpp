// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bspd/harness/output.hpp"

namespace bspd::harness {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

// Narrowband single on-grid path; every scheme should reconstruct it exactly.
inline ChannelRealization narrowband_path(const SystemModel& model, GridIndex n) {
  const PathComponent p{Complex(0.8, -0.6), 3e-9, model.grid[n]};
  return assemble_channel(std::span(&p, 1), model);
}

}  // namespace detail

inline CheckResult check_unitarity(std::size_t n = 256) {
  const CMatrix f = angle_transform(n);
  const double err = (f * f.adjoint() - CMatrix::Identity(f.rows(), f.cols())).cwiseAbs().maxCoeff();
  return {"F unitarity", err <= 1e-10, "max |F F^H - I| = " + detail::fmt(err), 0};
}

inline CheckResult check_parseval(Seed seed, std::size_t n = 256, int vectors = 20) {
  const CMatrix f = angle_transform(n);
  auto eng = seed.engine();
  double worst = 0.0;
  for (int v = 0; v < vectors; ++v) {
    CVector x(static_cast<Eigen::Index>(n));
    for (auto& e : x) e = complex_normal(eng);
    const CVector fx = f * x;
    worst = std::max(worst, std::abs(fx.norm() - x.norm()) / x.norm());
    worst = std::max(worst, (f.adjoint() * fx - x).norm() / x.norm());
  }
  return {"Parseval round-trip", worst <= 1e-10, "worst relative error " + detail::fmt(worst), 0};
}

inline CheckResult check_window_cardinality(const SystemModel& model, const PatternBank& bank) {
  const std::size_t want = model.cfg.window_size();
  for (GridIndex n = 0; n < bank.size(); ++n) {
    const auto w = expand_window(bank[n], model.cfg.window_halfwidth, model.n());
    for (const auto& rows : w.per_subcarrier)
      if (bspd::detail::sorted_unique(rows).size() != want)
        return {"window cardinality", false, "pattern " + std::to_string(n + 1) + " has a window of the wrong size", 0};
  }
  return {"window cardinality", true, "all " + std::to_string(bank.size()) + " windows have " + std::to_string(want) +
                                          " distinct rows per subcarrier", 0};
}

inline CheckResult check_residual_monotonicity(const SystemModel& model, const PatternBank& bank, Seed seed,
                                               std::size_t seeds = 20, double snr_db = 20.0) {
  for (std::size_t t = 0; t < seeds; ++t) {
    const Seed ts = seed.split(t);
    const auto paths = sample_paths(ts.split(stream::kPaths), model.cfg);
    const auto ch = assemble_channel(paths, model);
    const auto comb = make_combiners(ts.split(stream::kCombiners), model);
    const auto obs = observe(ch, comb, snr_to_sigma2(snr_db), ts.split(stream::kNoise));
    const auto rep = bspd_estimate(obs.y, comb.effective, model.cfg.n_paths, model.cfg.window_halfwidth, bank);
    for (std::size_t l = 1; l < rep.residual_norms.size(); ++l) {
      const RVector& prev = rep.residual_norms[l - 1];
      const RVector& cur = rep.residual_norms[l];
      for (Eigen::Index m = 0; m < cur.size(); ++m)
        if (cur(m) > prev(m) * (1.0 + 1e-12) + 1e-12)
          return {"residual monotonicity", false,
                  "seed " + std::to_string(t) + ", path " + std::to_string(l) + ", subcarrier " +
                      std::to_string(m + 1) + " grew",
                  0};
    }
  }
  return {"residual monotonicity", true, std::to_string(seeds) + " seeds, every subcarrier non-increasing", 0};
}

inline CheckResult check_zero_off_support(const ExperimentSpec& spec, const SystemModel& model,
                                          const PatternBank& bank, Seed seed) {
  const auto paths = sample_paths(seed.split(stream::kPaths), model.cfg);
  const auto ch = assemble_channel(paths, model);
  const auto comb = make_combiners(seed.split(stream::kCombiners), model);
  const auto obs = observe(ch, comb, snr_to_sigma2(10.0), seed.split(stream::kNoise));
  for (Scheme s : kAllSchemes) {
    const auto rep = run_scheme(s, spec, model, bank, ch, comb, obs);
    for (Eigen::Index m = 0; m < rep.h_hat.cols(); ++m) {
      const auto& omega = rep.supports[static_cast<std::size_t>(m)];
      for (Eigen::Index i = 0; i < rep.h_hat.rows(); ++i)
        if (!std::binary_search(omega.begin(), omega.end(), static_cast<GridIndex>(i)) &&
            rep.h_hat(i, m) != Complex(0.0, 0.0))
          return {"zero off support", false, std::string(to_string(s)) + " has a nonzero outside its support", 0};
    }
  }
  return {"zero off support", true, "all four schemes vanish exactly off their supports", 0};
}

inline CheckResult check_noiseless_narrowband(const ExperimentSpec& spec, Seed seed) {
  SystemConfig cfg = spec.config;
  cfg.bandwidth_hz = 0.0;
  cfg.n_paths = 1;
  const SystemModel model(cfg);
  const PatternBank bank(model, spec.grid_edge);
  const auto ch = detail::narrowband_path(model, std::min<GridIndex>(39, model.n() - 1));
  const auto comb = make_combiners(seed.split(stream::kCombiners), model);
  const auto obs = observe(ch, comb, 0.0, seed.split(stream::kNoise));
  double worst = -INFINITY;
  std::string who;
  for (Scheme s : kAllSchemes) {
    const double db = nmse_db(run_scheme(s, spec, model, bank, ch, comb, obs).h_hat, ch.angle);
    if (db > worst) {
      worst = db;
      who = std::string(to_string(s));
    }
  }
  return {"noiseless narrowband NMSE", worst <= -100.0, "worst scheme " + who + " at " + detail::fmt(worst) + " dB", 0};
}

inline CheckResult check_tail_bound(Seed seed, std::size_t samples = 100000) {
  auto eng = seed.engine();
  std::vector<double> mag2(samples);
  for (auto& v : mag2) v = std::norm(complex_normal(eng));
  std::ostringstream d;
  bool ok = true;
  for (double alpha : {1.0, 2.0, 4.0}) {
    const double hits = static_cast<double>(std::count_if(mag2.begin(), mag2.end(), [&](double v) { return v >= alpha; }));
    const double emp = hits / static_cast<double>(samples);
    const double bound = gaussian_tail_bound(std::sqrt(alpha));
    ok = ok && emp <= bound;
    d << "alpha=" << alpha << ": " << detail::fmt(emp) << " <= " << detail::fmt(bound) << "; ";
  }
  return {"Gaussian tail bound", ok, d.str(), 0};
}

// A 4-point SNR sweep run with 1 and 4 workers must produce identical CSV bytes.
inline CheckResult check_thread_determinism(const ExperimentSpec& spec, std::size_t trials = 3) {
  ExperimentSpec s = spec;
  s.kind = ExperimentKind::snr_sweep;
  s.sweep_values = {0, 10, 20, 30};
  s.trials = trials;
  s.threads = 1;
  const std::string one = to_csv(run_snr_sweep(s));
  s.threads = 4;
  const std::string four = to_csv(run_snr_sweep(s));
  return {"thread-count determinism", one == four,
          one == four ? "1 and 4 workers give identical CSV" : "CSV differs between 1 and 4 workers", 0};
}

inline std::vector<CheckResult> run_validation(const ExperimentSpec& spec) {
  const Seed seed(spec.base_seed);
  const SystemModel model(spec.config);
  const PatternBank bank(model, spec.grid_edge);
  std::vector<std::function<CheckResult()>> checks = {
      [&] { return check_unitarity(model.n()); },
      [&] { return check_parseval(seed.split(11), model.n()); },
      [&] { return check_window_cardinality(model, bank); },
      [&] { return check_residual_monotonicity(model, bank, seed.split(12)); },
      [&] { return check_zero_off_support(spec, model, bank, seed.split(13)); },
      [&] { return check_noiseless_narrowband(spec, seed.split(14)); },
      [&] { return check_tail_bound(seed.split(15)); },
      [&] { return check_thread_determinism(spec); },
  };
  std::vector<CheckResult> out;
  for (auto& c : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = c();
    } catch (const std::exception& e) {
      r.name = "check " + std::to_string(out.size() + 1);
      r.passed = false;
      r.detail = std::string("threw: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace bspd::harness
