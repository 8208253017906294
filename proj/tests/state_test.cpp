#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>
#include <vector>

#include "edg/state.hpp"

using namespace edg;

TEST_CASE("initial data families") {
  InitSpec mono;
  mono.family = InitFamily::monodisperse;
  mono.mass_at_one = 1.0;
  const DensityState m = make_state(mono, 4);
  CHECK(m.t == 0.0);
  CHECK(m.f == std::vector<double>{0.0, 1.0, 0.0, 0.0, 0.0});

  InitSpec delta;
  delta.family = InitFamily::delta_at;
  delta.s = 2;
  delta.mass_at_one = 0.5;
  CHECK(make_state(delta, 4).f == std::vector<double>{0.0, 0.0, 0.5, 0.0, 0.0});

  // geometric q=1/2 normalized to M0=1 over j <= 3: weights (1, 1/2, 1/4, 1/8),
  // total 15/8, so densities are (8,4,2,1)/15.
  InitSpec geo;
  geo.family = InitFamily::geometric;
  geo.q = 0.5;
  geo.mass_at_one = 1.0;
  const DensityState g = make_state(geo, 3);
  CHECK(g.f[0] == doctest::Approx(8.0 / 15.0).epsilon(1e-15));
  CHECK(g.f[1] == doctest::Approx(4.0 / 15.0).epsilon(1e-15));
  CHECK(g.f[2] == doctest::Approx(2.0 / 15.0).epsilon(1e-15));
  CHECK(g.f[3] == doctest::Approx(1.0 / 15.0).epsilon(1e-15));
  CHECK(moment(g, 0.0) == doctest::Approx(1.0).epsilon(1e-15));

  InitSpec custom;
  custom.family = InitFamily::custom;
  custom.values = {0.1, 0.2};
  const DensityState c = make_state(custom, 3);
  CHECK(c.f == std::vector<double>{0.1, 0.2, 0.0, 0.0});
}

TEST_CASE("initial data validation") {
  InitSpec geo;
  geo.family = InitFamily::geometric;
  geo.q = 1.0;
  CHECK_THROWS_AS(make_state(geo, 4), std::invalid_argument);
  geo.q = -0.1;
  CHECK_THROWS_AS(make_state(geo, 4), std::invalid_argument);

  InitSpec custom;
  custom.family = InitFamily::custom;
  custom.values = {1.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(make_state(custom, 2), std::invalid_argument);  // longer than N+1
  custom.values = {1.0, -1.0};
  CHECK_THROWS_AS(make_state(custom, 2), std::invalid_argument);

  InitSpec mono;
  CHECK_THROWS_AS(make_state(mono, 1), std::invalid_argument);  // N >= 2
}

TEST_CASE("moments") {
  DensityState st;
  st.f = {0.5, 0.25, 0.25};
  CHECK(moment(st, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(moment(st, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(moment(st, 2.0) == doctest::Approx(1.25).epsilon(1e-15));

  InitSpec mono;
  const DensityState m = make_state(mono, 6);
  for (double p : {0.0, 0.5, 1.0, 2.7, 5.0}) CHECK(moment(m, p) == 1.0);

  // 0^0 := 1, so M0 counts f_0 while higher orders do not.
  DensityState zeroes;
  zeroes.f = {2.0, 0.0, 0.0};
  CHECK(moment(zeroes, 0.0) == 2.0);
  CHECK(moment(zeroes, 0.5) == 0.0);
  CHECK(moment(zeroes, 2.0) == 0.0);

  InitSpec geo;
  geo.family = InitFamily::geometric;
  geo.q = 0.5;
  CHECK(moment(make_state(geo, 3), 1.0) == doctest::Approx(11.0 / 15.0).epsilon(1e-15));

  CHECK_THROWS_AS(moment(zeroes, -1.0), std::invalid_argument);
}

TEST_CASE("weighted sums") {
  DensityState st;
  st.f = {0.3, 0.1, 0.4, 0.2};
  std::vector<double> ones(4, 1.0);
  CHECK(weighted_sum(st, ones) == doctest::Approx(moment(st, 0.0)).epsilon(1e-15));
  std::vector<double> lin = {0.0, 1.0, 2.0, 3.0};
  CHECK(weighted_sum(st, lin) == doctest::Approx(moment(st, 1.0)).epsilon(1e-15));
  std::vector<double> e2 = {0.0, 0.0, 1.0, 0.0};
  CHECK(weighted_sum(st, e2) == st.f[2]);
  std::vector<double> wrong(3, 1.0);
  CHECK_THROWS_AS(weighted_sum(st, wrong), std::invalid_argument);
}

TEST_CASE("weighted_sum is linear in h and in f") {
  std::mt19937_64 rng(3);
  auto u = [&] { return double(rng() >> 11) * 0x1.0p-53; };
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t N = 2 + rng() % 40;
    DensityState a, b;
    a.f.resize(N + 1);
    b.f.resize(N + 1);
    std::vector<double> h1(N + 1), h2(N + 1);
    for (std::size_t j = 0; j <= N; ++j) {
      a.f[j] = u();
      b.f[j] = u();
      h1[j] = u();
      h2[j] = u();
    }
    const double alpha = u();
    std::vector<double> hmix(N + 1);
    for (std::size_t j = 0; j <= N; ++j) hmix[j] = h1[j] + alpha * h2[j];
    CHECK(weighted_sum(a, hmix) ==
          doctest::Approx(weighted_sum(a, h1) + alpha * weighted_sum(a, h2)).epsilon(1e-12));
    DensityState fmix;
    fmix.f.resize(N + 1);
    for (std::size_t j = 0; j <= N; ++j) fmix.f[j] = a.f[j] + alpha * b.f[j];
    CHECK(weighted_sum(fmix, h1) ==
          doctest::Approx(weighted_sum(a, h1) + alpha * weighted_sum(b, h1)).epsilon(1e-12));
  }
}

TEST_CASE("tail moments") {
  DensityState st;
  st.f = {0.0, 1.0, 1.0};
  CHECK(tail_moment(st, 2, 2.0) == 4.0);
  CHECK(tail_moment(st, 0, 1.5) == doctest::Approx(moment(st, 1.5)).epsilon(1e-15));

  InitSpec mono;
  const DensityState m = make_state(mono, 5);
  for (double p : {0.0, 1.0, 3.0}) CHECK(tail_moment(m, 2, p) == 0.0);
  CHECK_THROWS_AS(tail_moment(m, 6, 1.0), std::out_of_range);
}

TEST_CASE("moment ordering and monotonicity") {
  std::mt19937_64 rng(5);
  auto u = [&] { return double(rng() >> 11) * 0x1.0p-53; };
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t N = 2 + rng() % 60;
    DensityState st;
    st.f.assign(N + 1, 0.0);
    for (std::size_t j = 1; j <= N; ++j) st.f[j] = u();  // all mass on sizes >= 1
    const double p = 3.0 * u(), q = p + 2.0 * u();
    CHECK(moment(st, p) <= moment(st, q) * (1.0 + 1e-12));

    // moment is monotone in each entry
    DensityState bumped = st;
    const std::size_t at = 1 + rng() % N;
    bumped.f[at] += 0.5;
    CHECK(moment(bumped, p) >= moment(st, p));
  }
}

TEST_CASE("moment_weights agree with moment exactly") {
  DensityState st;
  st.f = {0.3, 0.25, 0.15, 0.2, 0.1};
  for (double p : {0.0, 1.0, 2.0, 2.5}) {
    const auto w = moment_weights(4, p);
    double dot = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) dot += w[j] * st.f[j];
    CHECK(dot == moment(st, p));  // bitwise: same pow values, same order
  }
}
