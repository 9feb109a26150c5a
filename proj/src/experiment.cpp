#include "tripforge/experiment.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

namespace tripforge {

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["trips"] = nlohmann::json::array();
  for (const auto& p : c.trips) j["trips"].push_back(p.string());
  j["stations"] = c.stations.string();
  j["preset"] = c.preset;
  j["seed"] = c.seed;
  j["mask"] = std::string(to_string(c.mask));
  j["gbdt"] = to_json(c.gbdt);
  j["lasso"] = {{"alpha", c.alpha ? nlohmann::json(*c.alpha) : nlohmann::json("0.01*alpha_max")},
                {"max_iterations", c.lasso.max_iterations},
                {"tolerance", c.lasso.tolerance}};
  j["out"] = c.out.string();
  j["k"] = c.k;
  j["year"] = c.year;
  j["negatives_from"] = c.negatives_from ? nlohmann::json(to_iso_string(*c.negatives_from)) : nlohmann::json(nullptr);
  j["negatives_to"] = c.negatives_to ? nlohmann::json(to_iso_string(*c.negatives_to)) : nlohmann::json(nullptr);
  return j;
}

std::string fingerprint_files(std::span<const std::filesystem::path> files) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 init failed");
  std::vector<char> buf(1 << 16);
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    if (!in) throw InputError("cannot read " + f.string());
    while (in) {
      in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
      if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  char b[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

Corpus load_corpus(const RunConfig& config) {
  const auto map = ColumnMap::preset(config.preset);
  if (!map) throw InputError("unknown preset '" + config.preset + "'");
  if (config.stations.empty()) throw InputError("--stations is required");
  if (config.trips.empty()) throw InputError("--trips is required");
  std::vector<std::filesystem::path> inputs{config.stations};
  inputs.insert(inputs.end(), config.trips.begin(), config.trips.end());
  for (const auto& p : inputs)
    if (!std::filesystem::is_regular_file(p)) throw InputError("input not found: " + p.string());

  Corpus c;
  try {
    auto st = load_stations(config.stations, *map);
    c.registry = std::move(st.registry);
    c.station_report = std::move(st.report);
    for (const auto& p : config.trips) {
      auto tl = load_trips(p, *map, c.registry);
      c.trips.insert(c.trips.end(), std::make_move_iterator(tl.trips.begin()),
                     std::make_move_iterator(tl.trips.end()));
      c.trip_reports.push_back(std::move(tl.report));
    }
  } catch (const InputError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
  c.fingerprint = fingerprint_files(inputs);
  return c;
}

NegativeSampling negative_sampling_for(std::span<const TripRecord> trips, const RunConfig& config) {
  NegativeSampling s;
  s.seed = config.seed;
  if (!trips.empty()) {
    auto [lo, hi] = std::minmax_element(trips.begin(), trips.end(), [](const TripRecord& a, const TripRecord& b) {
      return a.start_time < b.start_time;
    });
    s.from = lo->start_time;
    s.to = hi->start_time;
  }
  if (config.negatives_from) s.from = *config.negatives_from;
  if (config.negatives_to) s.to = *config.negatives_to;
  if (!(s.from < s.to)) s.to = s.from + std::chrono::seconds{1};
  return s;
}

DestinationResult train_destination(std::span<const TripRecord> trips, const StationRegistry& registry,
                                    FeatureMask mask, const RunConfig& config) {
  if (trips.empty()) throw InputError("no trips to train on");
  auto pos = positives(trips, registry, mask);
  auto neg = negatives(trips.size(), registry, negative_sampling_for(trips, config), mask);
  DestinationResult r;
  r.n_positive = pos.size();
  r.n_negative = neg.size();
  auto s = classification_split(std::move(pos), std::move(neg));
  r.n_train = s.train.size();
  r.n_test = s.test.size();
  const auto train = design_matrix(s.train);
  r.model = fit_gbdt<double>(train.x, train.labels, config.gbdt);
  if (!s.test.empty()) {
    const auto test = design_matrix(s.test);
    std::vector<int> predicted(s.test.size()), truth(s.test.size());
    for (std::size_t i = 0; i < s.test.size(); ++i) {
      predicted[i] = r.model.classify(test.x.row(static_cast<Eigen::Index>(i)).transpose());
      truth[i] = s.test[i].label;
    }
    r.metrics = classification_metrics<int>(predicted, truth);
  }
  return r;
}

DurationResult train_duration(std::span<const TripRecord> trips, const StationRegistry& registry,
                              FeatureMask mask, const RunConfig& config) {
  if (trips.size() < 2) throw InputError("need at least 2 trips to fit durations");
  auto s = split(positives(trips, registry, mask));
  DurationResult r;
  r.n_train = s.train.size();
  r.n_test = s.test.size();
  const auto train = design_matrix(s.train);
  const LassoProblem<double> prob(train.x, train.durations);
  r.alpha_max = prob.alpha_max();
  LassoConfig lc = config.lasso;
  lc.alpha = config.alpha ? *config.alpha : 0.01 * r.alpha_max;
  r.model = solve_lasso(prob, lc);
  if (!s.test.empty()) {
    const auto test = design_matrix(s.test);
    const Eigen::VectorXd pred = r.model.predict_rows(test.x) / 60.0;
    const Eigen::VectorXd truth = test.durations / 60.0;
    r.metrics = regression_metrics<double>(std::span(pred.data(), static_cast<std::size_t>(pred.size())),
                                           std::span(truth.data(), static_cast<std::size_t>(truth.size())));
  }
  return r;
}

}  // namespace tripforge
