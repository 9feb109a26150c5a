#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tripforge/features.hpp"
#include "tripforge/trip_model.hpp"

namespace tripforge {

struct LabeledExample {
  Eigen::VectorXd features;  // already masked
  int label = 0;             // 1 = observed trip, 0 = sampled non-trip
  std::optional<std::int64_t> duration_seconds;  // present iff label == 1
  Timestamp start_time{};
};

/// One label-1 example per trip, duration attached.
std::vector<LabeledExample> positives(std::span<const TripRecord> trips, const StationRegistry& registry,
                                      FeatureMask mask);

struct NegativeSampling {
  Timestamp from{};
  Timestamp to{};
  std::uint64_t seed = 0;
};

/// Random non-trips: customer or subscriber with equal chance, subscriber
/// gender uniform over {male, female}, subscriber age uniform over 1..100,
/// origin and destination independently uniform over the registry, start
/// uniform in epoch seconds over [from, to]. Throws std::invalid_argument on
/// an empty registry or when from >= to (unless n == 0).
std::vector<LabeledExample> negatives(std::size_t n, const StationRegistry& registry,
                                      const NegativeSampling& sampling, FeatureMask mask);

/// The raw tuples behind negatives(), in the same order and for the same seed.
std::vector<TripRecord> sample_negative_tuples(std::size_t n, const StationRegistry& registry,
                                               const NegativeSampling& sampling);

inline constexpr double kTrainFraction = 0.8;

struct Split {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> test;
  bool degenerate = false;  // fewer than 5 examples
};

/// Time-ordered 4:1 split. Examples are stably ordered by start_time and the
/// first round(0.8 n) go to train.
Split split(std::vector<LabeledExample> examples);

/// Positives and negatives pooled, then split.
Split classification_split(std::vector<LabeledExample> pos, std::vector<LabeledExample> neg);

struct DesignMatrix {
  Eigen::MatrixXd x;       // n x k, row per example
  Eigen::VectorXd labels;  // 0/1
  Eigen::VectorXd durations;  // seconds; NaN where absent
};

DesignMatrix design_matrix(std::span<const LabeledExample> examples);

/// Headered CSV: feature columns for the mask, then label, then duration.
void write_feature_csv(std::ostream& out, std::span<const LabeledExample> examples, FeatureMask mask);

}  // namespace tripforge
