// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>

#include <random>

#include "bspd/sysmodel.hpp"

using namespace bspd;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("angle grid samples", "[sysmodel]") {
  const AngleGrid g(256);
  CHECK(g[192] == 0.50390625);  // 129/256, sample 193
  CHECK_THAT(g[39], WithinAbs(-0.691406, 1e-6));
  CHECK(g[39] == -177.0 / 256.0);

  const AngleGrid two(2);
  CHECK(two[0] == -0.5);
  CHECK(two[1] == 0.5);

  CHECK_THROWS_AS(AngleGrid(0), InvalidParameter);
}

TEST_CASE("angle grid is strictly increasing with spacing 2/N", "[sysmodel]") {
  for (std::size_t n : {1u, 2u, 7u, 64u, 256u}) {
    const AngleGrid g(n);
    const double nn = static_cast<double>(n);
    CHECK(g[0] >= -1.0 + 1.0 / nn - 1e-15);
    CHECK(g[n - 1] <= 1.0 - 1.0 / nn + 1e-15);
    for (std::size_t i = 1; i < n; ++i) {
      CHECK(g[i] > g[i - 1]);
      CHECK_THAT(g[i] - g[i - 1], WithinAbs(2.0 / nn, 1e-14));
    }
  }
}

TEST_CASE("nearest grid sample", "[sysmodel]") {
  const AngleGrid g(8);  // -7/8, -5/8, ..., 7/8
  CHECK(g.nearest(0.0) == 3);  // tie between -1/8 and 1/8 goes to the smaller index
  CHECK(g.nearest(0.13) == 4);
  CHECK(g.nearest(-0.62) == 1);
  // beyond the last sample: the circle wraps 1.0 onto -1.0, the clamp keeps the edge
  CHECK(g.nearest(0.98, GridEdge::clamp) == 7);
  CHECK(g.nearest(1.05, GridEdge::periodic) == 0);
  CHECK(g.nearest(1.05, GridEdge::clamp) == 7);
  CHECK(g.nearest(-1.2, GridEdge::periodic) == 7);  // -1.2 wraps to 0.8

  // brute-force oracle for the periodic rule on a dense sweep
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> u(-1.3, 1.3);
  const AngleGrid big(64);
  for (int i = 0; i < 2000; ++i) {
    const double t = u(eng);
    std::size_t best = 0;
    double bd = 1e9;
    for (std::size_t n = 0; n < 64; ++n) {
      double d = std::fmod(std::abs(t - big[n]), 2.0);
      d = std::min(d, 2.0 - d);
      if (d < bd - 1e-15) {
        bd = d;
        best = n;
      }
    }
    CHECK(big.nearest(t) == best);
  }
}

TEST_CASE("subcarrier frequencies", "[sysmodel]") {
  SystemConfig cfg;
  const auto f = subcarrier_frequencies(cfg);
  REQUIRE(f.size() == 512);
  CHECK_THAT(f.back(), WithinAbs(107.4853515625e9, 1.0));
  CHECK_THAT(f.back() - f.front(), WithinRel(15e9 * 511.0 / 512.0, 1e-12));
  CHECK_THAT(0.5 * (f.front() + f.back()), WithinRel(100e9, 1e-15));
  for (std::size_t m = 0; m < f.size(); ++m) {
    if (m > 0) CHECK(f[m] > f[m - 1]);
    CHECK_THAT(f[m] + f[f.size() - 1 - m], WithinRel(2.0 * cfg.carrier_hz, 1e-14));
  }

  cfg.n_subcarriers = 1;
  const auto one = subcarrier_frequencies(cfg);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == cfg.carrier_hz);
}

TEST_CASE("steering vector", "[sysmodel]") {
  const CVector a0 = steering_vector(0.0, 16);
  for (auto v : a0) CHECK_THAT(std::abs(v - Complex(0.25, 0.0)), WithinAbs(0.0, 1e-15));

  const CVector a = steering_vector(0.5, 4);
  const Complex expect[] = {{0.5, 0}, {0, -0.5}, {-0.5, 0}, {0, 0.5}};
  for (int k = 0; k < 4; ++k) CHECK(std::abs(a(k) - expect[k]) < 1e-15);

  for (double t : {-1.7, -0.3, 0.0, 0.9, 1.2}) CHECK_THAT(steering_vector(t, 33).norm(), WithinAbs(1.0, 1e-14));
  CHECK_THROWS_AS(steering_vector(0.1, 0), InvalidParameter);
}

TEST_CASE("angle transform is unitary", "[sysmodel]") {
  const CMatrix f1 = angle_transform(1);
  REQUIRE(f1.rows() == 1);
  CHECK(std::abs(f1(0, 0) - Complex(1.0, 0.0)) < 1e-15);

  for (std::size_t n : {8u, 256u}) {
    const CMatrix f = angle_transform(n);
    const double err = (f * f.adjoint() - CMatrix::Identity(f.rows(), f.cols())).cwiseAbs().maxCoeff();
    CHECK(err < 1e-10);
  }

  // rows are conjugated grid steering vectors
  const AngleGrid g(8);
  const CMatrix f = angle_transform(8);
  for (Eigen::Index r = 0; r < 8; ++r)
    CHECK((f.row(r).transpose() - steering_vector(g[static_cast<GridIndex>(r)], 8).conjugate()).norm() < 1e-14);

  const CVector q = f * steering_vector(g[2], 8);  // sample 3
  for (Eigen::Index i = 0; i < 8; ++i) CHECK_THAT(std::abs(q(i)), WithinAbs(i == 2 ? 1.0 : 0.0, 1e-10));
}

TEST_CASE("grid orthogonality and Parseval", "[sysmodel]") {
  const std::size_t n = 64;
  const AngleGrid g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      CHECK(std::abs(steering_vector(g[i], n).dot(steering_vector(g[j], n))) < 1e-10);

  const CMatrix f = angle_transform(256);
  std::mt19937_64 eng(3);
  std::normal_distribution<double> z;
  for (int t = 0; t < 10; ++t) {
    CVector x(256);
    for (auto& v : x) v = {z(eng), z(eng)};
    CHECK_THAT((f * x).norm(), WithinRel(x.norm(), 1e-10));
  }
}

TEST_CASE("config validation names the field", "[sysmodel]") {
  SystemConfig ok;
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.antenna_spacing() == kLightSpeed / (2.0 * 100e9));

  auto rejects = [](SystemConfig c, const std::string& field) {
    try {
      c.validate();
      FAIL("accepted invalid " << field);
    } catch (const InvalidParameter& e) {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  SystemConfig c;
  c.n_antennas = 0;
  rejects(c, "n_antennas");
  c = {};
  c.n_rf = 300;
  rejects(c, "n_rf");
  c = {};
  c.n_rf = 0;
  rejects(c, "n_rf");
  c = {};
  c.n_subcarriers = 0;
  rejects(c, "n_subcarriers");
  c = {};
  c.pilot_slots = 0;
  rejects(c, "pilot_slots");
  c = {};
  c.n_paths = 0;
  rejects(c, "n_paths");
  c = {};
  c.bandwidth_hz = 100e9;
  rejects(c, "bandwidth_hz");
  c = {};
  c.bandwidth_hz = -1.0;
  rejects(c, "bandwidth_hz");
  c = {};
  c.window_halfwidth = 128;
  rejects(c, "window_halfwidth");
  c = {};
  c.window_halfwidth = 127;
  CHECK_NOTHROW(c.validate());
}
