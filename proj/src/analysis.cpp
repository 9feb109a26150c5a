#include "tripforge/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <unordered_map>

namespace tripforge {

namespace {

std::size_t category_index(const UserCategory& u) {
  return static_cast<std::size_t>(category_label(u));
}

std::size_t sum(const CategoryCounts& c) {
  std::size_t s = 0;
  for (auto v : c) s += v;
  return s;
}

nlohmann::json category_json(const CategoryCounts& c) {
  nlohmann::json j;
  for (int i = 0; i < kCategoryCount; ++i)
    j[std::string(to_string(static_cast<CategoryLabel>(i)))] = c[static_cast<std::size_t>(i)];
  j["total"] = sum(c);
  return j;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename Key, typename Hash = std::hash<Key>>
std::vector<std::pair<Key, std::size_t>> top_k(const std::unordered_map<Key, std::size_t, Hash>& counts,
                                                std::size_t k) {
  std::vector<std::pair<Key, std::size_t>> v(counts.begin(), counts.end());
  auto by_count = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  const auto n = std::min(k, v.size());
  std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n), v.end(), by_count);
  v.resize(n);
  return v;
}

void write_category_header(std::ostream& out) {
  for (int i = 0; i < kCategoryCount; ++i) out << ',' << to_string(static_cast<CategoryLabel>(i));
  out << ",total\n";
}

void write_category_row(std::ostream& out, const CategoryCounts& c) {
  for (auto v : c) out << ',' << v;
  out << ',' << sum(c) << '\n';
}

}  // namespace

double manhattan_km(double lat_a, double lon_a, double lat_b, double lon_b) {
  const double mean_lat = 0.5 * (lat_a + lat_b) * std::numbers::pi / 180.0;
  return std::abs(lat_a - lat_b) * kKmPerDegree +
         std::abs(lon_a - lon_b) * kKmPerDegree * std::cos(mean_lat);
}

double manhattan_km(const Station& a, const Station& b) {
  return manhattan_km(a.latitude, a.longitude, b.latitude, b.longitude);
}

// --- composition -----------------------------------------------------------

std::size_t CompositionReport::subscribers() const { return total - by_category[0]; }

std::optional<double> CompositionReport::fraction(std::size_t count) const {
  if (total == 0) return std::nullopt;
  return static_cast<double>(count) / static_cast<double>(total);
}

CompositionReport composition(std::span<const TripRecord> trips) {
  CompositionReport r;
  for (const auto& t : trips) {
    ++r.total;
    ++r.by_category[category_index(t.user)];
    if (t.user.kind == UserKind::Subscriber) {
      const auto g = static_cast<std::size_t>(t.user.gender);
      const auto a = static_cast<std::size_t>(age_group(t.user, civil_fields(t.start_time).year));
      ++r.by_gender_age[g][a];
    }
  }
  return r;
}

nlohmann::json to_json(const CompositionReport& r) {
  nlohmann::json j;
  j["total"] = r.total;
  j["customers"] = {{"count", r.customers()}, {"fraction", optional_json(r.fraction(r.customers()))}};
  j["subscribers"] = {{"count", r.subscribers()},
                      {"fraction", optional_json(r.fraction(r.subscribers()))}};
  for (int i = 0; i < kCategoryCount; ++i) {
    const auto c = r.by_category[static_cast<std::size_t>(i)];
    j["by_category"][std::string(to_string(static_cast<CategoryLabel>(i)))] = {
        {"count", c}, {"fraction", optional_json(r.fraction(c))}};
  }
  for (int g = 0; g < 3; ++g) {
    for (int a = 0; a < kAgeGroupCount; ++a) {
      const auto c = r.by_gender_age[static_cast<std::size_t>(g)][static_cast<std::size_t>(a)];
      j["subscribers_by_gender_age"][std::string(to_string(static_cast<Gender>(g)))]
       [std::string(to_string(static_cast<AgeGroup>(a)))] = {{"count", c},
                                                             {"fraction", optional_json(r.fraction(c))}};
    }
  }
  return j;
}

void write_csv(std::ostream& out, const CompositionReport& r) {
  out << "group,gender,age_group,count,fraction\n";
  auto frac = [&](std::size_t c) {
    auto f = r.fraction(c);
    return f ? std::to_string(*f) : std::string();
  };
  for (int i = 0; i < kCategoryCount; ++i) {
    const auto c = r.by_category[static_cast<std::size_t>(i)];
    out << to_string(static_cast<CategoryLabel>(i)) << ",,," << c << ',' << frac(c) << '\n';
  }
  for (int g = 0; g < 3; ++g)
    for (int a = 0; a < kAgeGroupCount; ++a) {
      const auto c = r.by_gender_age[static_cast<std::size_t>(g)][static_cast<std::size_t>(a)];
      out << "subscriber," << to_string(static_cast<Gender>(g)) << ','
          << to_string(static_cast<AgeGroup>(a)) << ',' << c << ',' << frac(c) << '\n';
    }
}

// --- temporal --------------------------------------------------------------

TemporalReport temporal(std::span<const TripRecord> trips, int year, CyclicScope scope) {
  using namespace std::chrono;
  TemporalReport r;
  r.year = year;
  r.cyclic_scope = scope;
  const bool leap = std::chrono::year{year}.is_leap();
  r.per_day.assign(leap ? 366 : 365, CategoryCounts{});
  const sys_days jan1{std::chrono::year{year} / January / 1};
  for (const auto& t : trips) {
    const auto c = civil_fields(t.start_time);
    const auto cat = category_index(t.user);
    const bool in_year = c.year == year;
    if (in_year) {
      const auto doy = (floor<days>(t.start_time) - jan1).count();
      ++r.per_day[static_cast<std::size_t>(doy)][cat];
      ++r.per_month[c.month - 1][cat];
      ++r.year_total;
    }
    if (in_year || scope == CyclicScope::AllYears) {
      ++r.per_weekday[c.weekday][cat];
      ++r.per_hour[c.hour][cat];
      ++r.cyclic_total;
    }
  }
  return r;
}

nlohmann::json to_json(const TemporalReport& r) {
  nlohmann::json j;
  j["year"] = r.year;
  j["cyclic_scope"] = r.cyclic_scope == CyclicScope::AllYears ? "all_years" : "same_year";
  j["year_total"] = r.year_total;
  j["cyclic_total"] = r.cyclic_total;
  for (const auto& d : r.per_day) j["per_day"].push_back(category_json(d));
  for (const auto& m : r.per_month) j["per_month"].push_back(category_json(m));
  for (const auto& w : r.per_weekday) j["per_weekday"].push_back(category_json(w));
  for (const auto& h : r.per_hour) j["per_hour"].push_back(category_json(h));
  return j;
}

void write_csv(std::ostream& out, const TemporalReport& r) {
  out << "view,bin";
  write_category_header(out);
  for (std::size_t i = 0; i < r.per_day.size(); ++i) {
    out << "day," << i + 1;
    write_category_row(out, r.per_day[i]);
  }
  for (std::size_t i = 0; i < 12; ++i) {
    out << "month," << i + 1;
    write_category_row(out, r.per_month[i]);
  }
  for (std::size_t i = 0; i < 7; ++i) {
    out << "weekday," << i;
    write_category_row(out, r.per_weekday[i]);
  }
  for (std::size_t i = 0; i < 24; ++i) {
    out << "hour," << i;
    write_category_row(out, r.per_hour[i]);
  }
}

// --- durations -------------------------------------------------------------

int duration_bin(std::int64_t seconds) {
  int bin = 0;
  for (int b = 1; b < kDurationBins; ++b)
    if (seconds >= kDurationBinStart[static_cast<std::size_t>(b)]) bin = b;
  return bin;
}

std::size_t DurationReport::count(int bin) const { return sum(bins[static_cast<std::size_t>(bin)]); }

std::size_t DurationReport::category_total(CategoryLabel c) const {
  std::size_t s = 0;
  for (const auto& b : bins) s += b[static_cast<std::size_t>(c)];
  return s;
}

std::optional<double> DurationReport::mean_minutes_for(CategoryLabel c) const {
  const auto n = category_total(c);
  if (n == 0) return std::nullopt;
  return sum_minutes_by_category[static_cast<std::size_t>(c)] / static_cast<double>(n);
}

DurationReport durations(std::span<const TripRecord> trips) {
  DurationReport r;
  std::int64_t total_seconds = 0;
  for (const auto& t : trips) {
    const auto cat = category_index(t.user);
    ++r.total;
    total_seconds += t.duration_seconds;
    ++r.bins[static_cast<std::size_t>(duration_bin(t.duration_seconds))][cat];
    r.sum_minutes_by_category[cat] += static_cast<double>(t.duration_seconds) / 60.0;
  }
  if (r.total > 0)
    r.mean_minutes = static_cast<double>(total_seconds) / 60.0 / static_cast<double>(r.total);
  return r;
}

nlohmann::json to_json(const DurationReport& r) {
  static constexpr std::array<const char*, kDurationBins> labels{"<30m",  "30m-1h", "1h-2h",
                                                                 "2h-5h", "5h-10h", ">10h"};
  nlohmann::json j;
  j["total"] = r.total;
  j["mean_minutes"] = optional_json(r.mean_minutes);
  for (int i = 0; i < kCategoryCount; ++i) {
    const auto c = static_cast<CategoryLabel>(i);
    j["mean_minutes_by_category"][std::string(to_string(c))] = optional_json(r.mean_minutes_for(c));
  }
  for (int b = 0; b < kDurationBins; ++b) {
    auto row = category_json(r.bins[static_cast<std::size_t>(b)]);
    row["bin"] = labels[static_cast<std::size_t>(b)];
    row["start_seconds"] = kDurationBinStart[static_cast<std::size_t>(b)];
    j["bins"].push_back(row);
  }
  const auto under = r.count(0);
  const auto over = r.total - under;
  const auto customer_over = r.category_total(CategoryLabel::Customer) - r.bins[0][0];
  j["under_30m"] = under;
  j["under_30m_customer"] = r.bins[0][0];
  j["under_30m_subscriber"] = under - r.bins[0][0];
  j["over_30m"] = over;
  j["under_30m_share"] = r.total ? nlohmann::json(static_cast<double>(under) / static_cast<double>(r.total))
                                 : nlohmann::json(nullptr);
  j["customer_over_30m"] = customer_over;
  j["customer_share_of_over_30m"] =
      over ? nlohmann::json(static_cast<double>(customer_over) / static_cast<double>(over))
           : nlohmann::json(nullptr);
  return j;
}

void write_csv(std::ostream& out, const DurationReport& r) {
  out << "bin,start_seconds";
  write_category_header(out);
  for (int b = 0; b < kDurationBins; ++b) {
    out << b << ',' << kDurationBinStart[static_cast<std::size_t>(b)];
    write_category_row(out, r.bins[static_cast<std::size_t>(b)]);
  }
}

// --- spatial ---------------------------------------------------------------

std::optional<double> CategorySpatial::mean_km() const {
  if (trips == 0) return std::nullopt;
  return distance_sum_km / static_cast<double>(trips);
}

std::optional<double> SpatialReport::subscriber_mean_km() const {
  std::size_t n = 0;
  double s = 0.0;
  for (int i = 1; i < kCategoryCount; ++i) {
    n += by_category[static_cast<std::size_t>(i)].trips;
    s += by_category[static_cast<std::size_t>(i)].distance_sum_km;
  }
  if (n == 0) return std::nullopt;
  return s / static_cast<double>(n);
}

SpatialReport spatial(std::span<const TripRecord> trips, const StationRegistry& registry, std::size_t k,
                      double bin_width_km) {
  SpatialReport r;
  r.k = k;
  r.bin_width_km = bin_width_km;

  struct Tally {
    std::unordered_map<StationId, std::size_t> origins, destinations;
    std::unordered_map<StationPair, std::size_t, StationPairHash> pairs;
  };
  std::array<Tally, kCategoryCount> tallies;
  Tally all;

  auto bump = [bin_width_km](CategorySpatial& cs, double km) {
    const auto bin = static_cast<std::size_t>(std::floor(km / bin_width_km));
    if (cs.distance_histogram.size() <= bin) cs.distance_histogram.resize(bin + 1, 0);
    ++cs.distance_histogram[bin];
    ++cs.trips;
    cs.distance_sum_km += km;
  };

  for (const auto& t : trips) {
    const auto& o = registry.at(t.origin_station_id);
    const auto& d = registry.at(t.destination_station_id);
    const double km = manhattan_km(o, d);
    const auto cat = category_index(t.user);
    bump(r.by_category[cat], km);
    bump(r.all, km);
    const StationPair p{t.origin_station_id, t.destination_station_id};
    for (Tally* tl : {&tallies[cat], &all}) {
      ++tl->origins[p.origin];
      ++tl->destinations[p.destination];
      ++tl->pairs[p];
    }
  }

  auto fill = [k](CategorySpatial& cs, const Tally& tl) {
    for (auto& [id, n] : top_k(tl.origins, k)) cs.top_origins.push_back({id, n});
    for (auto& [id, n] : top_k(tl.destinations, k)) cs.top_destinations.push_back({id, n});
    for (auto& [p, n] : top_k(tl.pairs, k)) cs.top_pairs.push_back({p, n});
  };
  for (std::size_t i = 0; i < kCategoryCount; ++i) fill(r.by_category[i], tallies[i]);
  fill(r.all, all);
  return r;
}

namespace {

nlohmann::json station_json(const StationRegistry& reg, StationId id) {
  const auto& s = reg.at(id);
  return {{"id", s.id}, {"name", s.name}, {"latitude", s.latitude}, {"longitude", s.longitude}};
}

nlohmann::json spatial_json(const CategorySpatial& cs, const StationRegistry& reg) {
  nlohmann::json j;
  j["trips"] = cs.trips;
  j["mean_km"] = optional_json(cs.mean_km());
  j["distance_histogram"] = cs.distance_histogram;
  j["top_origins"] = nlohmann::json::array();
  j["top_destinations"] = nlohmann::json::array();
  j["top_pairs"] = nlohmann::json::array();
  for (const auto& s : cs.top_origins) {
    auto e = station_json(reg, s.id);
    e["count"] = s.count;
    j["top_origins"].push_back(e);
  }
  for (const auto& s : cs.top_destinations) {
    auto e = station_json(reg, s.id);
    e["count"] = s.count;
    j["top_destinations"].push_back(e);
  }
  for (const auto& p : cs.top_pairs) {
    j["top_pairs"].push_back({{"origin", station_json(reg, p.pair.origin)},
                              {"destination", station_json(reg, p.pair.destination)},
                              {"count", p.count}});
  }
  return j;
}

}  // namespace

nlohmann::json to_json(const SpatialReport& r, const StationRegistry& registry) {
  nlohmann::json j;
  j["bin_width_km"] = r.bin_width_km;
  j["k"] = r.k;
  j["subscriber_mean_km"] = optional_json(r.subscriber_mean_km());
  for (int i = 0; i < kCategoryCount; ++i)
    j["by_category"][std::string(to_string(static_cast<CategoryLabel>(i)))] =
        spatial_json(r.by_category[static_cast<std::size_t>(i)], registry);
  j["all"] = spatial_json(r.all, registry);
  return j;
}

void write_csv(std::ostream& out, const SpatialReport& r, const StationRegistry& registry) {
  out << "section,category,rank_or_bin,origin_id,origin_lat,origin_lon,destination_id,"
         "destination_lat,destination_lon,count\n";
  auto emit = [&](std::string_view cat, const CategorySpatial& cs) {
    for (std::size_t b = 0; b < cs.distance_histogram.size(); ++b)
      out << "distance_km," << cat << ',' << static_cast<double>(b) * r.bin_width_km << ",,,,,,,"
          << cs.distance_histogram[b] << '\n';
    std::size_t rank = 1;
    for (const auto& s : cs.top_origins) {
      const auto& st = registry.at(s.id);
      out << "top_origin," << cat << ',' << rank++ << ',' << st.id << ',' << st.latitude << ','
          << st.longitude << ",,,," << s.count << '\n';
    }
    rank = 1;
    for (const auto& s : cs.top_destinations) {
      const auto& st = registry.at(s.id);
      out << "top_destination," << cat << ',' << rank++ << ",,,," << st.id << ',' << st.latitude
          << ',' << st.longitude << ',' << s.count << '\n';
    }
    rank = 1;
    for (const auto& p : cs.top_pairs) {
      const auto& a = registry.at(p.pair.origin);
      const auto& b = registry.at(p.pair.destination);
      out << "top_pair," << cat << ',' << rank++ << ',' << a.id << ',' << a.latitude << ','
          << a.longitude << ',' << b.id << ',' << b.latitude << ',' << b.longitude << ','
          << p.count << '\n';
    }
  };
  for (int i = 0; i < kCategoryCount; ++i)
    emit(to_string(static_cast<CategoryLabel>(i)), r.by_category[static_cast<std::size_t>(i)]);
  emit("all", r.all);
}

// --- balance ---------------------------------------------------------------

BalanceReport usage_balance(std::span<const TripRecord> trips, const StationRegistry& registry) {
  BalanceReport r;
  std::unordered_map<StationId, std::size_t> slot;
  for (const auto& s : registry.stations()) {
    slot.emplace(s.id, r.stations.size());
    r.stations.push_back({s.id, 0, 0});
  }
  auto entry = [&](StationId id) -> StationBalance& {
    auto [it, inserted] = slot.emplace(id, r.stations.size());
    if (inserted) r.stations.push_back({id, 0, 0});
    return r.stations[it->second];
  };
  for (const auto& t : trips) {
    ++entry(t.origin_station_id).checked_out;
    ++entry(t.destination_station_id).returned;
  }
  for (const auto& s : r.stations) {
    if (!s.active()) {
      ++r.inactive;
    } else if (s.checked_out > s.returned) {
      ++r.checked_out_heavy;
    } else if (s.checked_out < s.returned) {
      ++r.returned_heavy;
    } else {
      ++r.balanced;
      r.balanced_ids.push_back(s.id);
    }
  }
  return r;
}

nlohmann::json to_json(const BalanceReport& r) {
  nlohmann::json j;
  j["checked_out_heavy"] = r.checked_out_heavy;
  j["returned_heavy"] = r.returned_heavy;
  j["balanced"] = r.balanced;
  j["inactive"] = r.inactive;
  j["balanced_ids"] = r.balanced_ids;
  j["stations"] = nlohmann::json::array();
  for (const auto& s : r.stations)
    j["stations"].push_back({{"id", s.id},
                             {"checked_out", s.checked_out},
                             {"returned", s.returned},
                             {"active", s.active()}});
  return j;
}

void write_csv(std::ostream& out, const BalanceReport& r) {
  out << "station_id,checked_out,returned,active\n";
  for (const auto& s : r.stations)
    out << s.id << ',' << s.checked_out << ',' << s.returned << ',' << (s.active() ? 1 : 0) << '\n';
}

}  // namespace tripforge
