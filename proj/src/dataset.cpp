#include "tripforge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

namespace tripforge {

std::vector<LabeledExample> positives(std::span<const TripRecord> trips, const StationRegistry& registry,
                                      FeatureMask mask) {
  std::vector<LabeledExample> out;
  out.reserve(trips.size());
  for (const auto& t : trips) {
    const StationPair pair{t.origin_station_id, t.destination_station_id};
    out.push_back({extract(t.user, t.start_time, pair, registry, mask), 1, t.duration_seconds,
                   t.start_time});
  }
  return out;
}

std::vector<TripRecord> sample_negative_tuples(std::size_t n, const StationRegistry& registry,
                                               const NegativeSampling& sampling) {
  std::vector<TripRecord> out;
  if (n == 0) return out;
  if (registry.empty()) throw std::invalid_argument("negatives: empty station registry");
  if (!(sampling.from < sampling.to)) throw std::invalid_argument("negatives: empty time range");

  std::mt19937_64 rng(sampling.seed);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> age(1, 100);
  std::uniform_int_distribution<std::size_t> station(0, registry.size() - 1);
  std::uniform_int_distribution<std::int64_t> when(to_epoch_seconds(sampling.from),
                                                   to_epoch_seconds(sampling.to));
  const auto stations = registry.stations();

  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    TripRecord t;
    const bool subscriber = coin(rng);
    Gender g = Gender::Unknown;
    int a = 0;
    if (subscriber) {
      g = coin(rng) ? Gender::Male : Gender::Female;
      a = age(rng);
    }
    t.origin_station_id = stations[station(rng)].id;
    t.destination_station_id = stations[station(rng)].id;
    t.start_time = from_epoch_seconds(when(rng));
    t.end_time = t.start_time;
    if (subscriber) {
      t.user = UserCategory::subscriber(g, civil_fields(t.start_time).year - a);
    } else {
      t.user = UserCategory::customer();
    }
    out.push_back(t);
  }
  return out;
}

std::vector<LabeledExample> negatives(std::size_t n, const StationRegistry& registry,
                                      const NegativeSampling& sampling, FeatureMask mask) {
  std::vector<LabeledExample> out;
  out.reserve(n);
  for (const auto& t : sample_negative_tuples(n, registry, sampling)) {
    const StationPair pair{t.origin_station_id, t.destination_station_id};
    out.push_back({extract(t.user, t.start_time, pair, registry, mask), 0, std::nullopt, t.start_time});
  }
  return out;
}

Split split(std::vector<LabeledExample> examples) {
  std::stable_sort(examples.begin(), examples.end(),
                   [](const LabeledExample& a, const LabeledExample& b) { return a.start_time < b.start_time; });
  const auto n = examples.size();
  const auto n_train = static_cast<std::size_t>(std::llround(kTrainFraction * static_cast<double>(n)));
  Split s;
  s.degenerate = n < 5;
  s.test.assign(std::make_move_iterator(examples.begin() + static_cast<std::ptrdiff_t>(n_train)),
                std::make_move_iterator(examples.end()));
  examples.resize(n_train);
  s.train = std::move(examples);
  return s;
}

Split classification_split(std::vector<LabeledExample> pos, std::vector<LabeledExample> neg) {
  pos.insert(pos.end(), std::make_move_iterator(neg.begin()), std::make_move_iterator(neg.end()));
  return split(std::move(pos));
}

DesignMatrix design_matrix(std::span<const LabeledExample> examples) {
  DesignMatrix m;
  const auto n = static_cast<Eigen::Index>(examples.size());
  const auto k = examples.empty() ? Eigen::Index{0} : examples.front().features.size();
  m.x.resize(n, k);
  m.labels.resize(n);
  m.durations.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& e = examples[static_cast<std::size_t>(i)];
    if (e.features.size() != k) throw std::invalid_argument("design_matrix: ragged feature widths");
    m.x.row(i) = e.features.transpose();
    m.labels(i) = e.label;
    m.durations(i) = e.duration_seconds ? static_cast<double>(*e.duration_seconds)
                                        : std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

void write_feature_csv(std::ostream& out, std::span<const LabeledExample> examples, FeatureMask mask) {
  for (const auto& name : feature_names(mask)) out << name << ',';
  out << "label,duration_seconds\n";
  const auto old_precision = out.precision(17);
  for (const auto& e : examples) {
    for (Eigen::Index i = 0; i < e.features.size(); ++i) out << e.features(i) << ',';
    out << e.label << ',';
    if (e.duration_seconds) out << *e.duration_seconds;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace tripforge
