#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "tripforge/trip_model.hpp"

namespace tripforge {

inline constexpr double kKmPerDegree = 111.195;

/// Axis-aligned (north-south plus east-west) distance in kilometres, with the
/// east-west leg scaled by cos of the mean latitude.
double manhattan_km(double lat_a, double lon_a, double lat_b, double lon_b);
double manhattan_km(const Station& a, const Station& b);

using CategoryCounts = std::array<std::size_t, kCategoryCount>;

struct CompositionReport {
  std::size_t total = 0;
  CategoryCounts by_category{};
  // subscribers only: [Male, Female, Unknown] x [Young, MidAged, Senior, Unknown]
  std::array<std::array<std::size_t, kAgeGroupCount>, 3> by_gender_age{};

  std::size_t subscribers() const;
  std::size_t customers() const { return by_category[0]; }
  /// nullopt when total == 0
  std::optional<double> fraction(std::size_t count) const;
};

CompositionReport composition(std::span<const TripRecord> trips);

enum class CyclicScope { AllYears, SameYear };

struct TemporalReport {
  int year = 0;
  CyclicScope cyclic_scope = CyclicScope::AllYears;
  std::vector<CategoryCounts> per_day;  // 365 or 366 entries, Jan 1 first
  std::array<CategoryCounts, 12> per_month{};
  std::array<CategoryCounts, 7> per_weekday{};  // Sunday first
  std::array<CategoryCounts, 24> per_hour{};
  std::size_t year_total = 0;    // trips counted in per_day / per_month
  std::size_t cyclic_total = 0;  // trips counted in per_weekday / per_hour
};

/// Per-day and per-month views only count trips starting in `year`. Weekday
/// and hour views count every trip when scope is AllYears, otherwise only
/// trips of `year`.
TemporalReport temporal(std::span<const TripRecord> trips, int year,
                        CyclicScope scope = CyclicScope::AllYears);

inline constexpr int kDurationBins = 6;
/// Lower-inclusive bin edges in seconds: [0,30m) [30m,1h) [1h,2h) [2h,5h) [5h,10h) [10h,inf)
inline constexpr std::array<std::int64_t, kDurationBins> kDurationBinStart{0, 1800, 3600, 7200,
                                                                            18000, 36000};

int duration_bin(std::int64_t seconds);

struct DurationReport {
  std::size_t total = 0;
  std::optional<double> mean_minutes;
  std::array<CategoryCounts, kDurationBins> bins{};
  std::array<double, kCategoryCount> sum_minutes_by_category{};

  std::size_t count(int bin) const;
  std::size_t category_total(CategoryLabel c) const;
  std::optional<double> mean_minutes_for(CategoryLabel c) const;
};

DurationReport durations(std::span<const TripRecord> trips);

struct StationCount {
  StationId id = 0;
  std::size_t count = 0;
};

struct PairCount {
  StationPair pair;
  std::size_t count = 0;
};

struct CategorySpatial {
  std::vector<std::size_t> distance_histogram;
  std::size_t trips = 0;
  double distance_sum_km = 0.0;
  std::vector<StationCount> top_origins;
  std::vector<StationCount> top_destinations;
  std::vector<PairCount> top_pairs;

  std::optional<double> mean_km() const;
};

struct SpatialReport {
  double bin_width_km = 0.25;
  std::size_t k = 10;
  std::array<CategorySpatial, kCategoryCount> by_category;
  CategorySpatial all;

  /// Mean over male, female and other subscribers together.
  std::optional<double> subscriber_mean_km() const;
};

/// Throws std::out_of_range if a trip cites a station missing from the registry.
SpatialReport spatial(std::span<const TripRecord> trips, const StationRegistry& registry,
                      std::size_t k = 10, double bin_width_km = 0.25);

struct StationBalance {
  StationId id = 0;
  std::size_t checked_out = 0;
  std::size_t returned = 0;
  bool active() const { return checked_out + returned > 0; }
};

struct BalanceReport {
  std::vector<StationBalance> stations;  // registry order
  std::size_t checked_out_heavy = 0;
  std::size_t returned_heavy = 0;
  std::size_t balanced = 0;  // active stations with checked_out == returned
  std::size_t inactive = 0;
  std::vector<StationId> balanced_ids;
};

/// Trips citing stations absent from the registry are still counted, in
/// extra entries appended after the registry stations.
BalanceReport usage_balance(std::span<const TripRecord> trips, const StationRegistry& registry);

nlohmann::json to_json(const CompositionReport& r);
nlohmann::json to_json(const TemporalReport& r);
nlohmann::json to_json(const DurationReport& r);
nlohmann::json to_json(const SpatialReport& r, const StationRegistry& registry);
nlohmann::json to_json(const BalanceReport& r);

void write_csv(std::ostream& out, const CompositionReport& r);
void write_csv(std::ostream& out, const TemporalReport& r);
void write_csv(std::ostream& out, const DurationReport& r);
void write_csv(std::ostream& out, const SpatialReport& r, const StationRegistry& registry);
void write_csv(std::ostream& out, const BalanceReport& r);

}  // namespace tripforge
