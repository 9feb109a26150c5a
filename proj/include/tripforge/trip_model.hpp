#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tripforge {

using StationId = std::int64_t;
using TripId = std::int64_t;

// Civil (wall clock) time as shipped in the source files. No time zone is
// attached; the sys_clock epoch is only used as a counting origin.
using Timestamp = std::chrono::sys_seconds;

struct CivilFields {
  int year = 1970;
  unsigned month = 1;   // 1..12
  unsigned day = 1;     // 1..31
  unsigned hour = 0;    // 0..23
  unsigned minute = 0;
  unsigned second = 0;
  unsigned weekday = 4; // Sunday = 0
};

Timestamp make_timestamp(int year, unsigned month, unsigned day, unsigned hour = 0,
                         unsigned minute = 0, unsigned second = 0);
CivilFields civil_fields(Timestamp t);
std::int64_t to_epoch_seconds(Timestamp t);
Timestamp from_epoch_seconds(std::int64_t s);
// "YYYY-MM-DD HH:MM:SS"
std::string to_iso_string(Timestamp t);
std::optional<Timestamp> parse_iso_timestamp(std::string_view text);

struct Station {
  StationId id = 0;
  std::string name;
  double latitude = 0.0;
  double longitude = 0.0;
  int capacity = 0;

  bool operator==(const Station&) const = default;
};

bool valid_coordinates(double latitude, double longitude);

enum class UserKind { Customer, Subscriber };
enum class Gender { Male, Female, Unknown };

struct UserCategory {
  UserKind kind = UserKind::Customer;
  Gender gender = Gender::Unknown;
  std::optional<int> birth_year;

  static UserCategory customer() { return {}; }
  static UserCategory subscriber(Gender g, std::optional<int> birth_year) {
    return {UserKind::Subscriber, g, birth_year};
  }

  bool operator==(const UserCategory&) const = default;
};

struct TripRecord {
  TripId trip_id = 0;
  Timestamp start_time{};
  Timestamp end_time{};
  std::int64_t duration_seconds = 0;
  StationId origin_station_id = 0;
  StationId destination_station_id = 0;
  UserCategory user;

  bool operator==(const TripRecord&) const = default;
};

struct StationPair {
  StationId origin = 0;
  StationId destination = 0;

  bool operator==(const StationPair&) const = default;
  auto operator<=>(const StationPair&) const = default;
};

struct StationPairHash {
  std::size_t operator()(const StationPair& p) const noexcept {
    auto h = static_cast<std::uint64_t>(p.origin) * 0x9E3779B97F4A7C15ull;
    return static_cast<std::size_t>(h ^ (static_cast<std::uint64_t>(p.destination) + (h << 6) + (h >> 2)));
  }
};

/// Stations keyed by id. Iteration order is ascending id.
class StationRegistry {
 public:
  StationRegistry() = default;

  /// Returns false (and leaves the registry untouched) if the id is taken.
  bool insert(Station station);

  const Station* find(StationId id) const;
  /// Throws std::out_of_range for unknown ids.
  const Station& at(StationId id) const;
  bool contains(StationId id) const { return index_.contains(id); }

  std::size_t size() const { return stations_.size(); }
  bool empty() const { return stations_.empty(); }
  std::span<const Station> stations() const { return stations_; }

 private:
  std::vector<Station> stations_;  // sorted by id
  std::unordered_map<StationId, std::size_t> index_;
};

enum class AgeGroup { Young, MidAged, Senior, Unknown };
enum class CategoryLabel { Customer, MaleSubscriber, FemaleSubscriber, OtherSubscriber };

inline constexpr int kCategoryCount = 4;
inline constexpr int kAgeGroupCount = 4;

AgeGroup age_group(const UserCategory& user, int reference_year);
CategoryLabel category_label(const UserCategory& user);

std::string_view to_string(UserKind k);
std::string_view to_string(Gender g);
std::string_view to_string(AgeGroup g);
std::string_view to_string(CategoryLabel c);

}  // namespace tripforge
