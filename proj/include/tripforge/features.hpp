#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tripforge/trip_model.hpp"

namespace tripforge {

inline constexpr int kFeatureLength = 13;

/// Flattened layout of the full feature vector.
enum FeatureSlot : int {
  kUserType = 0,      // x1
  kGender = 1,        // x2
  kAge = 2,           // x3
  kMonth = 3,         // x4
  kWeekday = 4,       // x5
  kHour = 5,          // x6
  kOriginId = 6,      // x7
  kDestinationId = 7,
  kOriginLat = 8,     // x8
  kOriginLon = 9,
  kDestinationLat = 10,
  kDestinationLon = 11,
  kDistance = 12,     // x9
};

using FeatureVector = Eigen::Matrix<double, kFeatureLength, 1>;

enum class FeatureMask { All, UserOnly, StationOnly, TimeOnly };

std::string_view to_string(FeatureMask m);
std::optional<FeatureMask> parse_feature_mask(std::string_view s);

/// Flattened slot indices kept by a mask, in ascending order.
std::span<const int> mask_slots(FeatureMask m);
int mask_width(FeatureMask m);
/// Column names (x1_user_type, x2_gender, ...) for the kept slots.
std::vector<std::string> feature_names(FeatureMask m);

struct UserFeatures {
  double user_type = 0, gender = 0, age = 0;
};
struct TimeFeatures {
  double month = 1, weekday = 0, hour = 0;
};
struct StationFeatures {
  std::array<double, 2> pair{};
  std::array<double, 4> coords{};
  double distance_km = 0;
};

UserFeatures user_features(const UserCategory& user, int trip_year);
TimeFeatures time_features(Timestamp start);
/// Throws std::out_of_range for unknown station ids.
StationFeatures station_features(const StationPair& pair, const StationRegistry& registry);

FeatureVector full_features(const UserCategory& user, Timestamp start, const StationPair& pair,
                            const StationRegistry& registry);

/// Masked-out groups are dropped from the result, not zero-filled.
Eigen::VectorXd extract(const UserCategory& user, Timestamp start, const StationPair& pair,
                        const StationRegistry& registry, FeatureMask mask);

Eigen::VectorXd apply_mask(const FeatureVector& full, FeatureMask mask);

}  // namespace tripforge
