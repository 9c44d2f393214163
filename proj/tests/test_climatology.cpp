#include <doctest.h>

#include <cmath>
#include <fstream>

#include "helpers.hpp"
#include "nino/climatology.hpp"
#include "nino/error.hpp"

using namespace nino;
using nino::testing::make_grid;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::IoError;
}

AnomalySeries series(std::vector<double> v) { return AnomalySeries{TimeStamp(2000, 1), std::move(v)}; }

}  // namespace

TEST_CASE("climatology means per calendar month") {
  SUBCASE("constant Januaries") {
    auto g = nino::testing::constant_grid(2, 3, {2000, 1}, 24, 25.0);
    const auto clim = compute_climatology(g, complete_years(g));
    for (double m : clim.means[0]) CHECK(m == 25.0);
  }
  SUBCASE("two Januaries average") {
    std::vector<double> v(24, 0.0);
    v[0] = 24.0;
    v[12] = 26.0;
    const auto g = make_grid({0}, {0}, {2000, 1}, 24, v);
    const auto clim = compute_climatology(g, Period{{2000, 1}, {2001, 12}});
    CHECK(clim.mean(1, 0) == 25.0);
    CHECK(clim.mean(2, 0) == 0.0);
  }
  SUBCASE("single base year reproduces that year") {
    Rng rng(5);
    const auto g = nino::testing::random_grid(rng, 2, 2, {2000, 1}, 36);
    const auto clim = compute_climatology(g, Period{{2001, 1}, {2001, 12}});
    for (int m = 1; m <= 12; ++m) {
      for (std::size_t c = 0; c < 4; ++c) CHECK(clim.mean(m, c) == g.at(12 + static_cast<std::size_t>(m - 1), c / 2, c % 2));
    }
  }
  SUBCASE("base period outside the grid") {
    const auto g = nino::testing::constant_grid(1, 1, {2000, 1}, 24, 1.0);
    CHECK(kind_of([&] { compute_climatology(g, Period{{1990, 1}, {1999, 12}}); }) == ErrorKind::InsufficientData);
  }
}

TEST_CASE("complete years and the centered window") {
  const auto g = nino::testing::constant_grid(1, 1, {2000, 1}, 285, 1.0);  // through 2023-09
  const auto p = complete_years(g);
  CHECK(p.first == TimeStamp(2000, 1));
  CHECK(p.last == TimeStamp(2022, 12));
  const auto c = centered_base_period(2010);
  CHECK(c.first == TimeStamp(1995, 1));
  CHECK(c.last == TimeStamp(2024, 12));
  CHECK(c.months() == 360);
  CHECK(kind_of([&] { centered_regional_anomaly(g, GeoBounds(-90, 90, -180, 179)); }) == ErrorKind::InsufficientData);
}

TEST_CASE("regional anomaly") {
  Rng rng(1);
  const auto base = nino::testing::random_grid(rng, 2, 2, {2000, 1}, 24);
  const auto clim = compute_climatology(base, complete_years(base));
  const GeoBounds all(-90, 90, -180, 179);

  SUBCASE("grid equal to its climatology") {
    std::vector<double> v(base.values().size());
    for (std::size_t t = 0; t < 24; ++t) {
      for (std::size_t c = 0; c < 4; ++c) v[t * 4 + c] = clim.mean(base.time_at(t).month, c);
    }
    const auto a = regional_anomaly(base.with_values(v), clim, all);
    for (double x : a.values) CHECK(x == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("uniform offset") {
    std::vector<double> v(base.values().begin(), base.values().end());
    for (std::size_t t = 0; t < 24; ++t) {
      for (std::size_t c = 0; c < 4; ++c) v[t * 4 + c] = clim.mean(base.time_at(t).month, c) + 1.0;
    }
    const auto a = regional_anomaly(base.with_values(v), clim, all);
    for (double x : a.values) CHECK(x == doctest::Approx(1.0));
  }
  SUBCASE("half the region warm") {
    std::vector<double> v(base.values().size());
    for (std::size_t t = 0; t < 24; ++t) {
      for (std::size_t c = 0; c < 4; ++c) v[t * 4 + c] = clim.mean(base.time_at(t).month, c) + (c < 2 ? 2.0 : 0.0);
    }
    const auto a = regional_anomaly(base.with_values(v), clim, all);
    for (double x : a.values) CHECK(x == doctest::Approx(1.0));
  }
  SUBCASE("axes mismatch") {
    const auto other = nino::testing::constant_grid(3, 3, {2000, 1}, 24, 1.0);
    CHECK(kind_of([&] { regional_anomaly(other, clim, all); }) == ErrorKind::AxesMismatch);
  }
}

TEST_CASE("regional anomaly is invariant under a constant shift of the input") {
  Rng rng(21);
  const auto g = nino::testing::random_grid(rng, 5, 26, {2000, 1}, 120);
  const auto bounds = GeoBounds::nino34();
  const auto a = regional_anomaly(g, compute_climatology(g, complete_years(g)), bounds);
  for (double shift : {-7.5, 0.25, 13.0}) {
    std::vector<double> v(g.values().begin(), g.values().end());
    for (auto& x : v) x += shift;
    const auto s = g.with_values(v);
    const auto b = regional_anomaly(s, compute_climatology(s, complete_years(s)), bounds);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a.values[i] - b.values[i]) < 1e-9);
  }
}

TEST_CASE("oni") {
  SUBCASE("constant") {
    const auto o = oni(series(std::vector<double>(10, 1.0)));
    CHECK(o.size() == 8);
    for (double x : o.values) CHECK(x == doctest::Approx(1.0));
  }
  SUBCASE("three months") {
    const auto o = oni(series({0.3, 0.6, 0.9}));
    REQUIRE(o.size() == 1);
    CHECK(o.values[0] == doctest::Approx(0.6));
    CHECK(o.start == TimeStamp(2000, 3));
  }
  SUBCASE("step") {
    const auto o = oni(series({0, 0, 0, 3.0}));
    REQUIRE(o.size() == 2);
    CHECK(o.values[0] == 0.0);
    CHECK(o.values[1] == doctest::Approx(1.0));
  }
  SUBCASE("too short") { CHECK(kind_of([] { oni(series({1, 2})); }) == ErrorKind::TooShort); }
}

TEST_CASE("oni stays within the range of its three anomalies") {
  Rng rng(8);
  std::vector<double> v(200);
  for (auto& x : v) x = rng.uniform(-3, 3);
  const auto o = oni(series(v));
  for (std::size_t i = 0; i < o.size(); ++i) {
    const double lo = std::min({v[i], v[i + 1], v[i + 2]});
    const double hi = std::max({v[i], v[i + 1], v[i + 2]});
    CHECK(o.values[i] >= lo - 1e-12);
    CHECK(o.values[i] <= hi + 1e-12);
  }
}

TEST_CASE("quarter matrix") {
  SUBCASE("constant") {
    const auto q = quarter_matrix(series(std::vector<double>(20, 0.7)), 10);
    CHECK(q.n_steps() == 10);
    for (const auto& row : q.rows) {
      for (double x : row) CHECK(x == doctest::Approx(0.7));
    }
  }
  SUBCASE("ramp") {
    std::vector<double> v;
    for (int i = 0; i < 10; ++i) v.push_back(0.1 * i);
    const auto q = quarter_matrix(series(v), 1);
    const Quarters expected{0.1, 0.2, 0.3, 0.4, 0.5};
    for (std::size_t i = 0; i < kQuarters; ++i) CHECK(q.rows[0][i] == doctest::Approx(expected[i]));
  }
  SUBCASE("length rule") {
    CHECK_NOTHROW(quarter_matrix(series(std::vector<double>(58, 0.0)), 52));
    CHECK(kind_of([] { quarter_matrix(series(std::vector<double>(57, 0.0)), 52); }) == ErrorKind::TooShort);
  }
}

TEST_CASE("event classification") {
  CHECK(classify_event({0.6, 0.7, 0.8, 0.9, 1.0}, 0.5));
  CHECK_FALSE(classify_event({0.6, 0.4, 0.8, 0.9, 1.0}, 0.5));
  CHECK(classify_event({0.5, 0.5, 0.5, 0.5, 0.5}, 0.5));
}

TEST_CASE("raising a quarter never turns an event off") {
  Rng rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    Quarters q;
    for (auto& x : q) x = rng.uniform(0.0, 1.0);
    const bool before = classify_event(q);
    q[rng.below(kQuarters)] += rng.uniform(0.0, 1.0);
    if (before) CHECK(classify_event(q));
  }
}

TEST_CASE("series csv layout") {
  const auto dir = nino::testing::scratch_dir("clim_csv");
  const auto s = series({0.3, 0.6, 0.9, 1.2});
  write_series_csv(oni(s), dir / "oni.csv");
  write_quarter_csv(quarter_matrix(series(std::vector<double>(8, 0.5)), 2), dir / "q.csv");
  std::ifstream in(dir / "oni.csv");
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "time,value");
  CHECK(first.rfind("2000-03,", 0) == 0);
  std::ifstream qin(dir / "q.csv");
  std::getline(qin, header);
  CHECK(header == "t,q0,q1,q2,q3,q4");
}
