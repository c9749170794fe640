// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <random>

#include "bspd/analysis.hpp"

using namespace bspd;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Scene {
  SystemModel model;
  PatternBank bank;
  ChannelRealization ch;
  CombinerSet comb;
  PilotObservation obs;
};

Scene single_path(SystemConfig cfg, double psi, double sigma2 = 0.0, std::uint64_t seed = 1) {
  cfg.n_paths = 1;
  SystemModel model(cfg);
  PatternBank bank(model);
  const PathComponent p{Complex(0.9, 0.4), 5e-9, psi};
  auto ch = assemble_channel(std::span(&p, 1), model);
  auto comb = make_combiners(Seed(seed).split(stream::kCombiners), model);
  auto obs = observe(ch, comb, sigma2, Seed(seed).split(stream::kNoise));
  return {std::move(model), std::move(bank), std::move(ch), std::move(comb), std::move(obs)};
}

Scene random_scene(const SystemConfig& cfg, std::uint64_t seed, double snr_db) {
  SystemModel model(cfg);
  PatternBank bank(model);
  const Seed s(seed);
  auto ch = assemble_channel(sample_paths(s.split(stream::kPaths), cfg), model);
  auto comb = make_combiners(s.split(stream::kCombiners), model);
  auto obs = observe(ch, comb, snr_to_sigma2(snr_db), s.split(stream::kNoise));
  return {std::move(model), std::move(bank), std::move(ch), std::move(comb), std::move(obs)};
}

void check_zero_off_support(const EstimateReport& r) {
  for (Eigen::Index m = 0; m < r.h_hat.cols(); ++m) {
    const auto& omega = r.supports[static_cast<std::size_t>(m)];
    for (Eigen::Index i = 0; i < r.h_hat.rows(); ++i)
      if (!std::binary_search(omega.begin(), omega.end(), static_cast<GridIndex>(i)))
        REQUIRE(r.h_hat(i, m) == Complex(0.0, 0.0));
  }
}

CMatrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  CMatrix a(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) a(i, j) = complex_normal(eng);
  return a;
}

}  // namespace

TEST_CASE("least squares on a column subset", "[estimators]") {
  const CMatrix f = angle_transform(8);
  const CVector y = random_matrix(8, 1, 1);
  IndexSet all(8);
  std::iota(all.begin(), all.end(), 0);
  const CVector x = ls_on_columns(y, f, all);
  CHECK((f * x - y).norm() < 1e-12);

  const CMatrix a = random_matrix(20, 40, 2);
  const GridIndex five[] = {5};
  const CVector s = ls_on_columns(a.col(5) * 3.0, a, five);
  CHECK_THAT(std::abs(s(5) - Complex(3.0, 0.0)), WithinAbs(0.0, 1e-9));
  CHECK(s.cwiseAbs().sum() - std::abs(s(5)) == 0.0);

  // dense normal-equations oracle
  const IndexSet idx{0, 3, 7, 11, 12, 19, 25, 33, 39};
  const CVector yy = random_matrix(20, 1, 3);
  const CVector got = ls_on_columns(yy, a, idx);
  CMatrix sub(20, 9);
  for (int j = 0; j < 9; ++j) sub.col(j) = a.col(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
  const CVector want = (sub.adjoint() * sub).inverse() * (sub.adjoint() * yy);
  for (int j = 0; j < 9; ++j) CHECK(std::abs(got(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)])) - want(j)) < 1e-9);
  const CVector resid = yy - a * got;
  CHECK(resid.norm() <= yy.norm());
  CHECK((sub.adjoint() * resid).norm() <= 1e-8 * yy.norm() * sub.norm());

  const IndexSet too_many(21, 0);
  CHECK_THROWS_AS(ls_on_columns(yy, a, too_many), InvalidParameter);
  CHECK_THROWS_AS(ls_on_columns(yy, a, IndexSet{}), InvalidParameter);
  CHECK_THROWS_AS(ls_on_columns(yy, a, IndexSet{40}), InvalidParameter);
}

TEST_CASE("least squares on collinear columns returns the minimum-norm solution", "[estimators]") {
  CMatrix a = random_matrix(10, 4, 4);
  a.col(3) = a.col(2);
  const CVector y = a.col(2) * 2.0;
  const CVector x = ls_on_columns(y, a, IndexSet{2, 3});
  CHECK(std::abs(x(2) - Complex(1.0, 0.0)) < 1e-9);
  CHECK(std::abs(x(3) - Complex(1.0, 0.0)) < 1e-9);
}

TEST_CASE("BSPD finds an on-grid direction without noise", "[estimators]") {
  auto s = single_path(SystemConfig{}, AngleGrid(256)[39]);
  const auto r = bspd_estimate(s.obs.y, s.comb.effective, 1, 4, s.bank);
  REQUIRE(r.directions.size() == 1);
  CHECK(r.directions[0] == 39);
  for (const auto& omega : r.supports) CHECK(omega.size() == 9);
  check_zero_off_support(r);
}

TEST_CASE("noiseless single direction is detected on every seed", "[estimators]") {
  const SystemModel model{SystemConfig{}};
  const PatternBank bank(model);
  std::mt19937_64 eng(11);
  std::uniform_int_distribution<GridIndex> pick(0, 255);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const GridIndex n = pick(eng);
    const PathComponent p{complex_normal(eng), 1e-8, model.grid[n]};
    const auto ch = assemble_channel(std::span(&p, 1), model);
    const auto comb = make_combiners(Seed(seed), model);
    const CMatrix c = comb.effective.adjoint() * observe(ch, comb, 0.0, Seed(seed)).y;
    CHECK(detect_direction(c, bank) == n);
  }
}

TEST_CASE("narrowband noiseless recovery is exact for every scheme", "[estimators]") {
  SystemConfig cfg;
  cfg.bandwidth_hz = 1.0;
  auto s = single_path(cfg, AngleGrid(256)[101]);
  const auto& a = s.comb.effective;
  const auto& y = s.obs.y;
  CHECK(nmse_db(bspd_estimate(y, a, 1, 4, s.bank).h_hat, s.ch.angle) <= -100.0);
  CHECK(nmse_db(somp_estimate(y, a, 27).h_hat, s.ch.angle) <= -100.0);
  CHECK(nmse_db(somp_estimate(y, a, 1).h_hat, s.ch.angle) <= -100.0);
  for (std::size_t block : {1u, 16u, 512u})
    CHECK(nmse_db(omp_block_estimate(y, a, 27, block).h_hat, s.ch.angle) <= -100.0);
  CHECK(nmse_db(oracle_ls_estimate(y, a, s.ch.paths, s.model, 4).h_hat, s.ch.angle) <= -100.0);

  const auto one = somp_estimate(y, a, 1);
  CHECK(one.supports[0] == IndexSet{101});
}

TEST_CASE("zero observation gives a zero estimate", "[estimators]") {
  const SystemModel model{SystemConfig{}};
  const PatternBank bank(model);
  const auto comb = make_combiners(Seed(1), model);
  const CMatrix y = CMatrix::Zero(80, 512);
  const auto r = bspd_estimate(y, comb.effective, 3, 4, bank);
  CHECK(r.h_hat.isZero(0.0));
  CHECK(r.directions == std::vector<GridIndex>{0, 0, 0});
  CHECK(somp_estimate(y, comb.effective, 27).h_hat.isZero(0.0));
}

TEST_CASE("BSPD residuals shrink and supports keep their shape", "[estimators]") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto s = random_scene(SystemConfig{}, seed, 10.0);
    const auto r = bspd_estimate(s.obs.y, s.comb.effective, 3, 4, s.bank);
    REQUIRE(r.residual_norms.size() == 4);
    for (std::size_t l = 1; l < 4; ++l)
      for (Eigen::Index m = 0; m < 512; ++m) CHECK(r.residual_norms[l](m) <= r.residual_norms[l - 1](m) * (1 + 1e-12));
    for (std::size_t m = 0; m < 512; ++m) {
      // Omega_m is the deduplicated union of the three windows
      IndexSet want;
      for (GridIndex n : r.directions) {
        const auto rows = window_rows(s.bank[n].rows[m], 4, 256);
        want.insert(want.end(), rows.begin(), rows.end());
      }
      std::sort(want.begin(), want.end());
      want.erase(std::unique(want.begin(), want.end()), want.end());
      CHECK(r.supports[m] == want);
      CHECK(r.supports[m].size() <= 27);
    }
    check_zero_off_support(r);
  }
}

TEST_CASE("BSPD rejects supports larger than the pilot budget", "[estimators]") {
  SystemConfig cfg;
  cfg.pilot_slots = 3;  // 24 rows < 27
  auto s = random_scene(cfg, 1, 20.0);
  CHECK_THROWS_AS(bspd_estimate(s.obs.y, s.comb.effective, 3, 4, s.bank), UnderdeterminedSupport);
  CHECK_THROWS_AS(bspd_estimate(s.obs.y.topRows(10), s.comb.effective, 1, 0, s.bank), DimensionMismatch);
}

TEST_CASE("SOMP shares one support across subcarriers", "[estimators]") {
  auto s = random_scene(SystemConfig{}, 3, 20.0);
  const auto r = somp_estimate(s.obs.y, s.comb.effective, 27);
  for (const auto& omega : r.supports) {
    CHECK(omega == r.supports.front());
    CHECK(omega.size() == 27);
  }
  check_zero_off_support(r);
  const auto none = somp_estimate(s.obs.y, s.comb.effective, 0);
  CHECK(none.h_hat.isZero(0.0));
  CHECK_THROWS_AS(somp_estimate(s.obs.y, s.comb.effective, 81), InvalidParameter);
}

TEST_CASE("common support loses to split-aware detection on a wideband path", "[estimators]") {
  for (double psi : {AngleGrid(256)[39], 0.8125, -0.45}) {
    auto s = single_path(SystemConfig{}, psi);
    const double bspd = nmse_db(bspd_estimate(s.obs.y, s.comb.effective, 1, 4, s.bank).h_hat, s.ch.angle);
    const double somp = nmse_db(somp_estimate(s.obs.y, s.comb.effective, 9).h_hat, s.ch.angle);
    CHECK(somp > bspd);
  }
}

TEST_CASE("block OMP grouping", "[estimators]") {
  auto s = random_scene(SystemConfig{}, 4, 15.0);
  const auto& a = s.comb.effective;
  const auto per_sub = omp_block_estimate(s.obs.y, a, 12, 1);
  for (Eigen::Index m = 0; m < 512; m += 37) {
    auto want = omp_support(s.obs.y.col(m), a, 12);
    std::sort(want.begin(), want.end());
    CHECK(per_sub.supports[static_cast<std::size_t>(m)] == want);
  }
  const auto one = omp_block_estimate(s.obs.y, a, 12, 512);
  for (const auto& omega : one.supports) CHECK(omega == one.supports.front());

  const auto grouped = omp_block_estimate(s.obs.y, a, 12, 16);
  for (std::size_t g = 0; g < 32; ++g) {
    auto want = omp_support(s.obs.y.col(static_cast<Eigen::Index>(16 * g)), a, 12);
    std::sort(want.begin(), want.end());
    for (std::size_t m = 16 * g; m < 16 * g + 16; ++m) CHECK(grouped.supports[m] == want);
  }
  const auto centered = omp_block_estimate(s.obs.y, a, 12, 16, BlockRepresentative::center);
  auto want = omp_support(s.obs.y.col(8), a, 12);
  std::sort(want.begin(), want.end());
  CHECK(centered.supports[0] == want);

  // a ragged last group
  const auto ragged = omp_block_estimate(s.obs.y, a, 5, 100);
  auto last = omp_support(s.obs.y.col(500), a, 5);
  std::sort(last.begin(), last.end());
  CHECK(ragged.supports[511] == last);

  for (const auto* r : {&per_sub, &one, &grouped, &ragged}) check_zero_off_support(*r);
  CHECK_THROWS_AS(omp_block_estimate(s.obs.y, a, 12, 0), InvalidParameter);
}

TEST_CASE("oracle LS supports follow the split directions", "[estimators]") {
  auto s = random_scene(SystemConfig{}, 6, 20.0);
  const auto r = oracle_ls_estimate(s.obs.y, s.comb.effective, s.ch.paths, s.model, 4);
  for (std::size_t m = 0; m < 512; m += 51)
    for (const auto& p : s.ch.paths) {
      const GridIndex c = s.model.grid.nearest(p.direction * s.model.split_ratio(m));
      CHECK(std::binary_search(r.supports[m].begin(), r.supports[m].end(), c));
    }
  check_zero_off_support(r);
  CHECK_THROWS_AS(oracle_ls_estimate(s.obs.y, s.comb.effective, {}, s.model, 4), InvalidParameter);
}

TEST_CASE("oracle with unit windows loses exactly the energy outside them", "[estimators]") {
  const double psi = AngleGrid(256)[70];
  auto s = single_path(SystemConfig{}, psi);
  const auto r = oracle_ls_estimate(s.obs.y, s.comb.effective, s.ch.paths, s.model, 0);
  const double got = nmse_db(r.h_hat, s.ch.angle);
  const CMatrix q = angle_domain_response(psi, s.model);
  const double captured = captured_power_fraction(q, expand_window(s.bank[70], 0, 256));
  CHECK_THAT(got, WithinAbs(10.0 * std::log10(1.0 - captured), 3.0));
}

TEST_CASE("estimates pass back through the noiseless map unchanged", "[estimators]") {
  auto s = random_scene(SystemConfig{}, 8, 10.0);
  for (Scheme k : kAllSchemes) {
    EstimateReport r;
    switch (k) {
      case Scheme::bspd: r = bspd_estimate(s.obs.y, s.comb.effective, 3, 4, s.bank); break;
      case Scheme::somp: r = somp_estimate(s.obs.y, s.comb.effective, 27); break;
      case Scheme::omp_block: r = omp_block_estimate(s.obs.y, s.comb.effective, 27); break;
      case Scheme::oracle: r = oracle_ls_estimate(s.obs.y, s.comb.effective, s.ch.paths, s.model, 4); break;
    }
    ChannelRealization back;
    back.angle = r.h_hat;
    back.spatial = s.model.transform.adjoint() * r.h_hat;
    const auto y = observe(back, s.comb, 0.0, Seed(0)).y;
    const CMatrix want = s.comb.effective * r.h_hat;
    CHECK((y - want).norm() <= 1e-9 * want.norm());
  }
}

TEST_CASE("scheme names round-trip", "[estimators]") {
  for (Scheme k : kAllSchemes) CHECK(parse_scheme(to_string(k)) == k);
  CHECK_FALSE(parse_scheme("lasso").has_value());
}
