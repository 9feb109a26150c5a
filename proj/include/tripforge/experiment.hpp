#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tripforge/dataset.hpp"
#include "tripforge/features.hpp"
#include "tripforge/gbdt.hpp"
#include "tripforge/ingest.hpp"
#include "tripforge/lasso.hpp"
#include "tripforge/metrics.hpp"

namespace tripforge {

/// Bad user input: missing files, unknown ids, malformed flags. Maps to exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<std::filesystem::path> trips;
  std::filesystem::path stations;
  std::string preset = "default";
  std::uint64_t seed = 0;
  FeatureMask mask = FeatureMask::All;
  GbdtConfig gbdt;
  LassoConfig lasso;
  std::optional<double> alpha;  // nullopt: 0.01 * alpha_max of the training set
  std::filesystem::path out = "out";
  std::size_t k = 10;
  int year = 2014;
  std::optional<Timestamp> negatives_from, negatives_to;  // default: span of the corpus
};

nlohmann::json to_json(const RunConfig& c);

struct Corpus {
  StationRegistry registry;
  std::vector<TripRecord> trips;
  IngestReport station_report;
  std::vector<IngestReport> trip_reports;
  std::string fingerprint;  // sha256 over the input files, in order
};

/// SHA-256 over the concatenated bytes of the files, hex encoded.
std::string fingerprint_files(std::span<const std::filesystem::path> files);

/// Throws InputError if any input is missing or unreadable.
Corpus load_corpus(const RunConfig& config);

struct DestinationResult {
  GbdtModel<double> model;
  ClassificationReport metrics;
  std::size_t n_train = 0, n_test = 0, n_positive = 0, n_negative = 0;
};

struct DurationResult {
  LassoModel<double> model;
  RegressionReport metrics;  // MAE in minutes
  double alpha_max = 0;
  std::size_t n_train = 0, n_test = 0;
};

/// Positives plus an equal number of sampled negatives, pooled and split 4:1
/// by time; fit on the first fold, scored on the second.
DestinationResult train_destination(std::span<const TripRecord> trips, const StationRegistry& registry,
                                    FeatureMask mask, const RunConfig& config);

/// Positives only, split 4:1 by time.
DurationResult train_duration(std::span<const TripRecord> trips, const StationRegistry& registry,
                              FeatureMask mask, const RunConfig& config);

NegativeSampling negative_sampling_for(std::span<const TripRecord> trips, const RunConfig& config);

}  // namespace tripforge
