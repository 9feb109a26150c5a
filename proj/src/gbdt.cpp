#include "tripforge/gbdt.hpp"

namespace tripforge {

nlohmann::json to_json(const GbdtConfig& c) {
  return {{"n_trees", c.n_trees},
          {"learning_rate", c.learning_rate},
          {"max_depth", c.max_depth},
          {"min_samples_leaf", c.min_samples_leaf},
          {"subsample", c.subsample},
          {"seed", c.seed}};
}

GbdtConfig gbdt_config_from_json(const nlohmann::json& j) {
  GbdtConfig c;
  c.n_trees = j.at("n_trees").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.max_depth = j.at("max_depth").get<int>();
  c.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  c.subsample = j.at("subsample").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

std::vector<RankedDestination> rank_destinations(const GbdtModel<double>& model, const UserCategory& user,
                                                 Timestamp start, StationId origin,
                                                 const StationRegistry& registry, FeatureMask mask) {
  registry.at(origin);
  std::vector<RankedDestination> out;
  out.reserve(registry.size());
  for (const auto& s : registry.stations()) {
    const auto x = extract(user, start, {origin, s.id}, registry, mask);
    out.push_back({s.id, model.predict_proba(x)});
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedDestination& a, const RankedDestination& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.station < b.station;
  });
  return out;
}

}  // namespace tripforge
