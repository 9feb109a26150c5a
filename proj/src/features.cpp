#include "tripforge/features.hpp"

#include <algorithm>

#include "tripforge/analysis.hpp"

namespace tripforge {

namespace {

constexpr std::array<int, 13> kAllSlots{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
constexpr std::array<int, 3> kUserSlots{kUserType, kGender, kAge};
constexpr std::array<int, 3> kTimeSlots{kMonth, kWeekday, kHour};
constexpr std::array<int, 7> kStationSlots{kOriginId,       kDestinationId,  kOriginLat, kOriginLon,
                                           kDestinationLat, kDestinationLon, kDistance};
constexpr std::array<const char*, 13> kSlotNames{
    "x1_user_type", "x2_gender",         "x3_age",           "x4_month",         "x5_weekday",
    "x6_hour",      "x7_origin_id",      "x7_destination_id", "x8_origin_lat",   "x8_origin_lon",
    "x8_destination_lat", "x8_destination_lon", "x9_distance_km"};

}  // namespace

std::string_view to_string(FeatureMask m) {
  switch (m) {
    case FeatureMask::All: return "all";
    case FeatureMask::UserOnly: return "user";
    case FeatureMask::StationOnly: return "station";
    case FeatureMask::TimeOnly: return "time";
  }
  return "all";
}

std::optional<FeatureMask> parse_feature_mask(std::string_view s) {
  if (s == "all") return FeatureMask::All;
  if (s == "user") return FeatureMask::UserOnly;
  if (s == "station") return FeatureMask::StationOnly;
  if (s == "time") return FeatureMask::TimeOnly;
  return std::nullopt;
}

std::span<const int> mask_slots(FeatureMask m) {
  switch (m) {
    case FeatureMask::UserOnly: return kUserSlots;
    case FeatureMask::StationOnly: return kStationSlots;
    case FeatureMask::TimeOnly: return kTimeSlots;
    case FeatureMask::All: break;
  }
  return kAllSlots;
}

int mask_width(FeatureMask m) { return static_cast<int>(mask_slots(m).size()); }

std::vector<std::string> feature_names(FeatureMask m) {
  std::vector<std::string> names;
  for (int s : mask_slots(m)) names.emplace_back(kSlotNames[static_cast<std::size_t>(s)]);
  return names;
}

UserFeatures user_features(const UserCategory& user, int trip_year) {
  UserFeatures f;
  if (user.kind == UserKind::Customer) {
    f.user_type = -1;
    return f;
  }
  f.user_type = +1;
  f.gender = user.gender == Gender::Male ? 1.0 : user.gender == Gender::Female ? -1.0 : 0.0;
  if (user.birth_year) f.age = std::max(0, trip_year - *user.birth_year);
  return f;
}

TimeFeatures time_features(Timestamp start) {
  const auto c = civil_fields(start);
  return {static_cast<double>(c.month), static_cast<double>(c.weekday), static_cast<double>(c.hour)};
}

StationFeatures station_features(const StationPair& pair, const StationRegistry& registry) {
  const auto& o = registry.at(pair.origin);
  const auto& d = registry.at(pair.destination);
  StationFeatures f;
  f.pair = {static_cast<double>(o.id), static_cast<double>(d.id)};
  f.coords = {o.latitude, o.longitude, d.latitude, d.longitude};
  f.distance_km = manhattan_km(o, d);
  return f;
}

FeatureVector full_features(const UserCategory& user, Timestamp start, const StationPair& pair,
                            const StationRegistry& registry) {
  const auto u = user_features(user, civil_fields(start).year);
  const auto t = time_features(start);
  const auto s = station_features(pair, registry);
  FeatureVector x;
  x << u.user_type, u.gender, u.age, t.month, t.weekday, t.hour, s.pair[0], s.pair[1], s.coords[0],
      s.coords[1], s.coords[2], s.coords[3], s.distance_km;
  return x;
}

Eigen::VectorXd apply_mask(const FeatureVector& full, FeatureMask mask) {
  const auto slots = mask_slots(mask);
  Eigen::VectorXd x(static_cast<Eigen::Index>(slots.size()));
  for (std::size_t i = 0; i < slots.size(); ++i) x(static_cast<Eigen::Index>(i)) = full(slots[i]);
  return x;
}

Eigen::VectorXd extract(const UserCategory& user, Timestamp start, const StationPair& pair,
                        const StationRegistry& registry, FeatureMask mask) {
  return apply_mask(full_features(user, start, pair, registry), mask);
}

}  // namespace tripforge
