#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "tripforge/metrics.hpp"

using namespace tripforge;

TEST_CASE("hand-counted confusion") {
  const std::vector<int> pred{1, 0, 1, 0}, truth{1, 1, 0, 0};
  const auto r = classification_metrics<int>(pred, truth);
  CHECK(r.tp == 1);
  CHECK(r.fp == 1);
  CHECK(r.fn == 1);
  CHECK(r.tn == 1);
  CHECK(r.accuracy == 0.5);
  CHECK(*r.precision == 0.5);
  CHECK(*r.recall == 0.5);
  CHECK(*r.f1 == 0.5);

  const std::vector<int> p2{1, 1, 1, 0, 0}, t2{1, 1, 0, 0, 1};
  const auto r2 = classification_metrics<int>(p2, t2);
  CHECK(r2.accuracy == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(*r2.precision == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(*r2.recall == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(*r2.f1 == doctest::Approx(2.0 / 3).epsilon(1e-12));
}

TEST_CASE("perfect predictions") {
  const std::vector<int> t{1, 0, 1, 1, 0};
  const auto r = classification_metrics<int>(t, t);
  CHECK(r.accuracy == 1.0);
  CHECK(*r.precision == 1.0);
  CHECK(*r.recall == 1.0);
  CHECK(*r.f1 == 1.0);
}

TEST_CASE("undefined ratios are null") {
  const std::vector<int> none{0, 0, 0}, truth{1, 0, 1};
  const auto r = classification_metrics<int>(none, truth);
  CHECK_FALSE(r.precision.has_value());
  CHECK(*r.recall == 0.0);
  CHECK_FALSE(r.f1.has_value());
  const auto j = to_json(r);
  CHECK(j["precision"].is_null());

  const std::vector<int> neg{0, 0};
  const auto r2 = classification_metrics<int>(std::vector<int>{1, 0}, neg);
  CHECK_FALSE(r2.recall.has_value());
  CHECK(*r2.precision == 0.0);
}

TEST_CASE("hand-counted regression") {
  const std::vector<double> pred{2, 2, 2}, truth{1, 2, 3};
  const auto r = regression_metrics<double>(pred, truth);
  CHECK(r.mae == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(*r.r2 == doctest::Approx(0.0).epsilon(1e-12));

  const std::vector<double> exact{1, 2, 3};
  const auto perfect = regression_metrics<double>(exact, truth);
  CHECK(perfect.mae == 0.0);
  CHECK(*perfect.r2 == 1.0);

  // ss_res = 1+1+1 = 3, ss_tot = 2 -> r2 = -0.5
  const std::vector<double> off{2, 3, 4};
  CHECK(*regression_metrics<double>(off, truth).r2 == doctest::Approx(-0.5).epsilon(1e-12));

  const std::vector<double> flat{5, 5, 5};
  CHECK_FALSE(regression_metrics<double>(pred, flat).r2.has_value());
  CHECK(to_json(regression_metrics<double>(pred, flat))["r2"].is_null());
}

TEST_CASE("permutation invariance") {
  std::mt19937_64 rng(1);
  std::vector<int> p(101), t(101);
  std::vector<double> a(101), b(101);
  for (int i = 0; i < 101; ++i) {
    p[i] = static_cast<int>(rng() % 2);
    t[i] = static_cast<int>(rng() % 2);
    a[i] = static_cast<double>(rng() % 100);
    b[i] = static_cast<double>(rng() % 100);
  }
  const auto c0 = classification_metrics<int>(p, t);
  const auto r0 = regression_metrics<double>(a, b);
  std::vector<std::size_t> perm(101);
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> p2, t2;
  std::vector<double> a2, b2;
  for (auto i : perm) {
    p2.push_back(p[i]);
    t2.push_back(t[i]);
    a2.push_back(a[i]);
    b2.push_back(b[i]);
  }
  const auto c1 = classification_metrics<int>(p2, t2);
  const auto r1 = regression_metrics<double>(a2, b2);
  CHECK(c0.tp == c1.tp);
  CHECK(c0.fp == c1.fp);
  CHECK(c0.accuracy == c1.accuracy);
  CHECK(r0.mae == doctest::Approx(r1.mae).epsilon(1e-12));
  CHECK(*r0.r2 == doctest::Approx(*r1.r2).epsilon(1e-12));
}

TEST_CASE("length mismatch and empty input throw") {
  const std::vector<int> a{1, 0}, b{1};
  CHECK_THROWS_AS(classification_metrics<int>(a, b), std::invalid_argument);
  CHECK_THROWS_AS(classification_metrics<int>(std::vector<int>{}, std::vector<int>{}), std::invalid_argument);
  const std::vector<double> x{1.0}, y{1.0, 2.0};
  CHECK_THROWS_AS(regression_metrics<double>(x, y), std::invalid_argument);
}
