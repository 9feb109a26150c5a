#include <doctest.h>

#include <numeric>
#include <sstream>

#include "tripforge/analysis.hpp"
#include "tripforge/ingest.hpp"

using namespace tripforge;

namespace {

StationRegistry three_stations() {
  StationRegistry r;
  r.insert({1, "A", 41.88, -87.62, 10});
  r.insert({2, "B", 41.90, -87.64, 10});
  r.insert({3, "C", 41.86, -87.60, 10});
  return r;
}

TripRecord trip(TripId id, StationId from, StationId to, std::int64_t dur = 600,
                UserCategory user = UserCategory::subscriber(Gender::Male, 1980),
                Timestamp start = make_timestamp(2014, 7, 15, 8, 15)) {
  TripRecord t;
  t.trip_id = id;
  t.start_time = start;
  t.duration_seconds = dur;
  t.end_time = start + std::chrono::seconds{dur};
  t.origin_station_id = from;
  t.destination_station_id = to;
  t.user = user;
  return t;
}

std::size_t sum(const CategoryCounts& c) { return std::accumulate(c.begin(), c.end(), std::size_t{0}); }

}  // namespace

TEST_CASE("manhattan distance") {
  CHECK(manhattan_km(41.88, -87.62, 41.88, -87.62) == 0.0);
  CHECK(manhattan_km(41.0, -87.0, 42.0, -87.0) == doctest::Approx(kKmPerDegree).epsilon(1e-12));
  CHECK(manhattan_km(0.0, 10.0, 0.0, 11.0) == doctest::Approx(kKmPerDegree).epsilon(1e-12));
  // 0.02 deg north plus 0.02 deg west at 41.89 N
  CHECK(manhattan_km(41.88, -87.62, 41.90, -87.64) == doctest::Approx(3.879).epsilon(0.01 / 3.879));
  CHECK(manhattan_km(41.88, -87.62, 41.90, -87.64) == manhattan_km(41.90, -87.64, 41.88, -87.62));
}

TEST_CASE("composition") {
  const std::vector<TripRecord> one{trip(1, 1, 2, 600, UserCategory::customer())};
  const auto c = composition(one);
  CHECK(c.total == 1);
  CHECK(c.customers() == 1);
  CHECK(c.subscribers() == 0);
  CHECK(*c.fraction(c.customers()) == 1.0);
  CHECK_FALSE(composition({}).fraction(0).has_value());

  const auto corpus = synth_corpus(10, 10000, 30);
  const auto s = composition(corpus.trips);
  const SynthConfig cfg;
  for (int k = 0; k < kCategoryCount; ++k)
    CHECK(*s.fraction(s.by_category[k]) == doctest::Approx(cfg.category_weights[k]).epsilon(0.02 / std::max(0.02, cfg.category_weights[k])));
  CHECK(sum(s.by_category) == s.total);
  std::size_t ga = 0;
  for (const auto& g : s.by_gender_age) for (auto v : g) ga += v;
  CHECK(ga == s.subscribers());
}

TEST_CASE("temporal bins") {
  // Tuesday 2014-07-15 08:15
  const std::vector<TripRecord> trips{trip(1, 1, 2), trip(2, 1, 2, 600, UserCategory::customer(),
                                                          make_timestamp(2013, 1, 6, 23, 59))};
  const auto all = temporal(trips, 2014);
  CHECK(all.per_day.size() == 365);
  CHECK(all.per_weekday[2][1] == 1);
  CHECK(all.per_hour[8][1] == 1);
  CHECK(all.per_month[6][1] == 1);
  CHECK(all.per_day[195][1] == 1);  // July 15 is day 196
  CHECK(all.per_weekday[0][0] == 1);  // 2013-01-06 was a Sunday
  CHECK(all.per_hour[23][0] == 1);
  CHECK(all.year_total == 1);
  CHECK(all.cyclic_total == 2);
  const auto same = temporal(trips, 2014, CyclicScope::SameYear);
  CHECK(same.cyclic_total == 1);
  CHECK(temporal(trips, 2016).per_day.size() == 366);

  const auto corpus = synth_corpus(2, 5000, 20);
  const auto t = temporal(corpus.trips, 2014);
  std::size_t d = 0, m = 0, w = 0, h = 0;
  for (const auto& c : t.per_day) d += sum(c);
  for (const auto& c : t.per_month) m += sum(c);
  for (const auto& c : t.per_weekday) w += sum(c);
  for (const auto& c : t.per_hour) h += sum(c);
  CHECK(d == t.year_total);
  CHECK(m == t.year_total);
  CHECK(w == corpus.trips.size());
  CHECK(h == corpus.trips.size());
}

TEST_CASE("duration bins") {
  CHECK(duration_bin(0) == 0);
  CHECK(duration_bin(29 * 60 + 59) == 0);
  CHECK(duration_bin(30 * 60) == 1);
  CHECK(duration_bin(3599) == 1);
  CHECK(duration_bin(3600) == 2);
  CHECK(duration_bin(5 * 3600) == 4);
  CHECK(duration_bin(10 * 3600) == 5);
  CHECK(duration_bin(1000000) == 5);

  const std::vector<TripRecord> trips{trip(1, 1, 2, 1799, UserCategory::customer()), trip(2, 1, 2, 1800),
                                      trip(3, 1, 2, 1800, UserCategory::customer())};
  const auto r = durations(trips);
  CHECK(r.total == 3);
  CHECK(r.bins[0][0] == 1);
  CHECK(r.bins[1][0] == 1);
  CHECK(r.bins[1][1] == 1);
  CHECK(*r.mean_minutes == doctest::Approx((1799 + 1800 + 1800) / 180.0));
  CHECK(*r.mean_minutes_for(CategoryLabel::Customer) == doctest::Approx((1799 + 1800) / 120.0));
  CHECK_FALSE(r.mean_minutes_for(CategoryLabel::FemaleSubscriber).has_value());
  const auto j = to_json(r);
  CHECK(j["under_30m"] == 1);
  CHECK(j["customer_over_30m"] == 1);
  CHECK_FALSE(durations({}).mean_minutes.has_value());

  const auto corpus = synth_corpus(4, 5000, 20);
  const auto s = durations(corpus.trips);
  std::size_t bins = 0;
  for (int b = 0; b < kDurationBins; ++b) bins += s.count(b);
  CHECK(bins == s.total);
  std::size_t cats = 0;
  for (int c = 0; c < kCategoryCount; ++c) cats += s.category_total(static_cast<CategoryLabel>(c));
  CHECK(cats == s.total);
}

TEST_CASE("spatial top lists") {
  const auto reg = three_stations();
  std::vector<TripRecord> trips;
  for (int i = 0; i < 5; ++i) trips.push_back(trip(i + 1, 2, 3));
  trips.push_back(trip(10, 1, 2));
  trips.push_back(trip(11, 3, 1));
  const auto r = spatial(trips, reg, 3);
  REQUIRE(!r.all.top_pairs.empty());
  CHECK(r.all.top_pairs[0].pair == StationPair{2, 3});
  CHECK(r.all.top_pairs[0].count == 5);
  // (1,2) and (3,1) tie at 1: lower origin id first
  CHECK(r.all.top_pairs[1].pair == StationPair{1, 2});
  CHECK(r.all.top_origins[0].id == 2);
  CHECK(r.all.top_destinations[1].id == 1);
  CHECK(r.all.trips == 7);
  std::size_t hist = 0;
  for (auto v : r.all.distance_histogram) hist += v;
  CHECK(hist == 7);
  CHECK(*r.subscriber_mean_km() == doctest::Approx(*r.all.mean_km()));
  CHECK_THROWS_AS(spatial(std::vector<TripRecord>{trip(1, 1, 99)}, reg), std::out_of_range);
  CHECK(to_json(r, reg).contains("all"));
}

TEST_CASE("usage balance") {
  const auto reg = three_stations();
  const auto ab = usage_balance(std::vector<TripRecord>{trip(1, 1, 2)}, reg);
  CHECK(ab.stations[0].checked_out == 1);
  CHECK(ab.stations[0].returned == 0);
  CHECK(ab.stations[1].checked_out == 0);
  CHECK(ab.stations[1].returned == 1);
  CHECK(ab.checked_out_heavy == 1);
  CHECK(ab.returned_heavy == 1);
  CHECK(ab.inactive == 1);

  const auto aa = usage_balance(std::vector<TripRecord>{trip(1, 1, 1)}, reg);
  CHECK(aa.stations[0].checked_out == 1);
  CHECK(aa.stations[0].returned == 1);
  CHECK(aa.balanced == 1);
  CHECK(aa.balanced_ids == std::vector<StationId>{1});

  const auto corpus = synth_corpus(6, 4000, 25);
  const auto b = usage_balance(corpus.trips, corpus.registry);
  std::size_t out = 0, in = 0;
  for (const auto& s : b.stations) {
    out += s.checked_out;
    in += s.returned;
  }
  CHECK(out == corpus.trips.size());
  CHECK(in == corpus.trips.size());
  CHECK(b.checked_out_heavy + b.returned_heavy + b.balanced + b.inactive == b.stations.size());
}

TEST_CASE("reports serialize") {
  const auto corpus = synth_corpus(1, 300, 10);
  std::ostringstream o;
  write_csv(o, composition(corpus.trips));
  write_csv(o, temporal(corpus.trips, 2014));
  write_csv(o, durations(corpus.trips));
  write_csv(o, spatial(corpus.trips, corpus.registry), corpus.registry);
  write_csv(o, usage_balance(corpus.trips, corpus.registry));
  CHECK(!o.str().empty());
  CHECK(to_json(composition(corpus.trips))["total"] == 300);
}
