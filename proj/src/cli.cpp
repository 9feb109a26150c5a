#include "tripforge/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "tripforge/analysis.hpp"
#include "tripforge/experiment.hpp"

namespace tripforge {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliState {
  RunConfig cfg;
  std::string mask = "all";
  std::string neg_from, neg_to;
  std::string task = "destination";
  double bin_width_km = 0.25;
  // synth
  std::size_t n_trips = 10000;
  std::size_t n_stations = 50;
  // predict
  fs::path model, duration_model;
  StationId origin = 0;
  std::string start;
  std::string user_type = "Subscriber";
  std::string gender;
  std::optional<int> birth_year;
};

int thread_cap() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("TRIPFORGE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

Timestamp parse_time_flag(const std::string& text, const char* flag) {
  if (auto t = parse_iso_timestamp(text)) return *t;
  throw InputError(std::string(flag) + ": expected YYYY-MM-DD[ HH:MM[:SS]], got '" + text + "'");
}

// Validates the free-text flags and folds them into the run config.
void finalize(CliState& s) {
  s.cfg.mask = *parse_feature_mask(s.mask);
  if (!s.neg_from.empty()) s.cfg.negatives_from = parse_time_flag(s.neg_from, "--neg-from");
  if (!s.neg_to.empty()) s.cfg.negatives_to = parse_time_flag(s.neg_to, "--neg-to");
  s.cfg.gbdt.seed = s.cfg.seed;
  s.cfg.gbdt.threads = thread_cap();
  try {
    s.cfg.gbdt.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InputError("cannot create output directory " + dir.string());
}

template <typename Fn>
void write_with(const fs::path& path, Fn&& fn) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path.string());
  fn(f);
  if (!f) throw InputError("cannot write " + path.string());
}

void write_json(const fs::path& path, const json& j) {
  write_with(path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

json provenance(const RunConfig& cfg, const std::string& fingerprint) {
  return {{"run_config", to_json(cfg)}, {"input_sha256", fingerprint}};
}

json with_provenance(json doc, const json& prov) {
  doc["provenance"] = prov;
  return doc;
}

void add_input_flags(CLI::App* cmd, CliState& s) {
  cmd->add_option("--trips", s.cfg.trips, "Trip CSV files")->required()->expected(1, -1);
  cmd->add_option("--stations", s.cfg.stations, "Station CSV file")->required();
  cmd->add_option("--preset", s.cfg.preset, "Column map preset")
      ->check(CLI::IsMember(ColumnMap::preset_names()));
  cmd->add_option("--out", s.cfg.out, "Output directory");
}

void add_model_flags(CLI::App* cmd, CliState& s) {
  cmd->add_option("--mask", s.mask, "Feature groups: all|user|station|time")
      ->check(CLI::IsMember({"all", "user", "station", "time"}));
  cmd->add_option("--seed", s.cfg.seed, "Seed for negative sampling and row subsampling");
  cmd->add_option("--alpha", s.cfg.alpha, "Lasso L1 weight (default 0.01 * alpha_max)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--trees", s.cfg.gbdt.n_trees, "Boosting rounds");
  cmd->add_option("--lr", s.cfg.gbdt.learning_rate, "Learning rate in (0,1]");
  cmd->add_option("--depth", s.cfg.gbdt.max_depth, "Maximum tree depth");
  cmd->add_option("--min-leaf", s.cfg.gbdt.min_samples_leaf, "Minimum rows per leaf");
  cmd->add_option("--subsample", s.cfg.gbdt.subsample, "Row subsample fraction in (0,1]");
  cmd->add_option("--neg-from", s.neg_from, "Earliest negative start time (default: first trip)");
  cmd->add_option("--neg-to", s.neg_to, "Latest negative start time (default: last trip)");
}

void write_ingest_reports(const Corpus& c, const fs::path& out, const json& prov) {
  json j;
  j["stations"] = to_json(c.station_report);
  j["trips"] = json::array();
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < c.trip_reports.size(); ++i) {
    j["trips"].push_back(to_json(c.trip_reports[i]));
    accepted += c.trip_reports[i].rows_accepted;
    write_with(out / ("rejects_trips_" + std::to_string(i) + ".csv"),
               [&](std::ostream& o) { write_rejections_csv(o, c.trip_reports[i]); });
  }
  write_with(out / "rejects_stations.csv", [&](std::ostream& o) { write_rejections_csv(o, c.station_report); });
  j["total_trips_accepted"] = accepted;
  j["stations_accepted"] = c.registry.size();
  write_json(out / "ingest.json", with_provenance(j, prov));
}

// --- subcommands -----------------------------------------------------------

int cmd_synth(CliState& s, std::ostream& out) {
  SynthCorpus corpus;
  try {
    corpus = synth_corpus(s.cfg.seed, s.n_trips, s.n_stations);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  ensure_dir(s.cfg.out);
  write_with(s.cfg.out / "stations.csv", [&](std::ostream& o) { write_stations_csv(o, corpus.registry); });
  write_with(s.cfg.out / "trips.csv",
             [&](std::ostream& o) { write_trips_csv(o, corpus.trips, corpus.registry); });
  out << "wrote " << corpus.registry.size() << " stations and " << corpus.trips.size() << " trips to "
      << s.cfg.out.string() << '\n';
  return kExitOk;
}

int cmd_ingest(CliState& s, std::ostream& out) {
  const auto corpus = load_corpus(s.cfg);
  ensure_dir(s.cfg.out);
  write_ingest_reports(corpus, s.cfg.out, provenance(s.cfg, corpus.fingerprint));
  out << "stations " << corpus.registry.size() << ", trips " << corpus.trips.size() << '\n';
  return kExitOk;
}

int cmd_analyze(CliState& s, std::ostream& out) {
  const auto corpus = load_corpus(s.cfg);
  const auto prov = provenance(s.cfg, corpus.fingerprint);
  const auto comp = composition(corpus.trips);
  const auto temp = temporal(corpus.trips, s.cfg.year);
  const auto dur = durations(corpus.trips);
  const auto spat = spatial(corpus.trips, corpus.registry, s.cfg.k, s.bin_width_km);
  const auto bal = usage_balance(corpus.trips, corpus.registry);

  const auto& dir = s.cfg.out;
  ensure_dir(dir);
  write_ingest_reports(corpus, dir, prov);
  write_json(dir / "composition.json", with_provenance(to_json(comp), prov));
  write_json(dir / "temporal.json", with_provenance(to_json(temp), prov));
  write_json(dir / "durations.json", with_provenance(to_json(dur), prov));
  write_json(dir / "spatial.json", with_provenance(to_json(spat, corpus.registry), prov));
  write_json(dir / "balance.json", with_provenance(to_json(bal), prov));
  write_with(dir / "composition.csv", [&](std::ostream& o) { write_csv(o, comp); });
  write_with(dir / "temporal.csv", [&](std::ostream& o) { write_csv(o, temp); });
  write_with(dir / "durations.csv", [&](std::ostream& o) { write_csv(o, dur); });
  write_with(dir / "spatial.csv", [&](std::ostream& o) { write_csv(o, spat, corpus.registry); });
  write_with(dir / "balance.csv", [&](std::ostream& o) { write_csv(o, bal); });
  write_json(dir / "run_config.json", prov);
  out << "analyzed " << corpus.trips.size() << " trips into " << dir.string() << '\n';
  return kExitOk;
}

json destination_metrics_doc(const DestinationResult& r, FeatureMask mask) {
  return {{"task", "destination"},   {"mask", std::string(to_string(mask))},
          {"metrics", to_json(r.metrics)}, {"n_train", r.n_train},
          {"n_test", r.n_test},      {"n_positive", r.n_positive},
          {"n_negative", r.n_negative}};
}

json duration_metrics_doc(const DurationResult& r, FeatureMask mask) {
  return {{"task", "duration"},
          {"mask", std::string(to_string(mask))},
          {"metrics", to_json(r.metrics)},
          {"alpha", r.model.alpha},
          {"alpha_max", r.alpha_max},
          {"converged", r.model.converged},
          {"n_iterations", r.model.n_iterations},
          {"nonzero_coefficients", r.model.nonzero_count()},
          {"n_train", r.n_train},
          {"n_test", r.n_test}};
}

int cmd_train(CliState& s, std::ostream& out) {
  if (s.task != "destination" && s.task != "duration") throw InputError("--task must be destination or duration");
  const auto corpus = load_corpus(s.cfg);
  const auto prov = provenance(s.cfg, corpus.fingerprint);
  json model, metrics;
  if (s.task == "destination") {
    const auto r = train_destination(corpus.trips, corpus.registry, s.cfg.mask, s.cfg);
    model = to_json(r.model);
    metrics = destination_metrics_doc(r, s.cfg.mask);
  } else {
    const auto r = train_duration(corpus.trips, corpus.registry, s.cfg.mask, s.cfg);
    model = to_json(r.model);
    metrics = duration_metrics_doc(r, s.cfg.mask);
  }
  model["task"] = s.task;
  model["mask"] = std::string(to_string(s.cfg.mask));
  ensure_dir(s.cfg.out);
  write_json(s.cfg.out / "model.json", with_provenance(model, prov));
  write_json(s.cfg.out / "metrics.json", with_provenance(metrics, prov));
  write_json(s.cfg.out / "run_config.json", prov);
  out << metrics["metrics"].dump() << '\n';
  return kExitOk;
}

int cmd_ablate(CliState& s, std::ostream& out) {
  const auto corpus = load_corpus(s.cfg);
  const auto prov = provenance(s.cfg, corpus.fingerprint);
  json rows = json::array();
  for (auto mask : {FeatureMask::All, FeatureMask::UserOnly, FeatureMask::StationOnly, FeatureMask::TimeOnly}) {
    rows.push_back(destination_metrics_doc(train_destination(corpus.trips, corpus.registry, mask, s.cfg), mask));
  }
  for (auto mask : {FeatureMask::All, FeatureMask::UserOnly, FeatureMask::StationOnly, FeatureMask::TimeOnly}) {
    rows.push_back(duration_metrics_doc(train_duration(corpus.trips, corpus.registry, mask, s.cfg), mask));
  }
  ensure_dir(s.cfg.out);
  write_json(s.cfg.out / "ablation.json", with_provenance({{"rows", rows}}, prov));
  auto cell = [](const json& v) { return v.is_null() ? std::string() : v.dump(); };
  write_with(s.cfg.out / "ablation.csv", [&](std::ostream& o) {
    o << "task,mask,accuracy,precision,recall,f1,mae_minutes,r2\n";
    for (const auto& r : rows) {
      const auto& m = r["metrics"];
      o << r["task"].get<std::string>() << ',' << r["mask"].get<std::string>() << ',';
      if (r["task"] == "destination") {
        o << cell(m["accuracy"]) << ',' << cell(m["precision"]) << ',' << cell(m["recall"]) << ','
          << cell(m["f1"]) << ",,\n";
      } else {
        o << ",,,," << cell(m["mae_minutes"]) << ',' << cell(m["r2"]) << '\n';
      }
    }
  });
  write_json(s.cfg.out / "run_config.json", prov);
  out << rows.dump(2) << '\n';
  return kExitOk;
}

json read_json_file(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw InputError("cannot read " + p.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw InputError(p.string() + ": " + e.what());
  }
}

FeatureMask model_mask(const json& j) {
  const auto m = parse_feature_mask(j.value("mask", std::string("all")));
  if (!m) throw InputError("model file has an unknown mask");
  return *m;
}

int cmd_predict(CliState& s, std::ostream& out) {
  const auto map = ColumnMap::preset(s.cfg.preset);
  if (!fs::is_regular_file(s.model)) throw InputError("model not found: " + s.model.string());
  if (!s.duration_model.empty() && !fs::is_regular_file(s.duration_model))
    throw InputError("duration model not found: " + s.duration_model.string());
  if (!fs::is_regular_file(s.cfg.stations)) throw InputError("stations not found: " + s.cfg.stations.string());
  const auto registry = load_stations(s.cfg.stations, *map).registry;
  if (!registry.contains(s.origin)) throw InputError("unknown origin station " + std::to_string(s.origin));
  const auto start = parse_time_flag(s.start, "--start");

  UserCategory user;
  if (s.user_type == "Customer") {
    user = UserCategory::customer();
  } else if (s.user_type == "Subscriber") {
    Gender g = Gender::Unknown;
    if (s.gender == "Male") g = Gender::Male;
    else if (s.gender == "Female") g = Gender::Female;
    else if (!s.gender.empty()) throw InputError("--gender must be Male or Female");
    user = UserCategory::subscriber(g, s.birth_year);
  } else {
    throw InputError("--user-type must be Customer or Subscriber");
  }

  const auto mj = read_json_file(s.model);
  GbdtModel<double> dest;
  std::optional<LassoModel<double>> dur;
  FeatureMask dur_mask = FeatureMask::All;
  try {
    dest = gbdt_from_json<double>(mj);
    if (!s.duration_model.empty()) {
      const auto dj = read_json_file(s.duration_model);
      dur = lasso_from_json<double>(dj);
      dur_mask = model_mask(dj);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
  const auto mask = model_mask(mj);
  if (dest.n_features() != mask_width(mask)) throw InputError("model feature width does not match its mask");

  auto ranked = rank_destinations(dest, user, start, s.origin, registry, mask);
  ranked.resize(std::min(ranked.size(), s.cfg.k));
  out << "rank,station_id,name,probability,duration_minutes,arrival_time\n";
  std::size_t rank = 1;
  for (const auto& r : ranked) {
    const auto& st = registry.at(r.station);
    out << rank++ << ',' << st.id << ',' << csv::escape(st.name) << ',' << r.probability << ',';
    if (dur) {
      const double secs = dur->predict(extract(user, start, {s.origin, st.id}, registry, dur_mask));
      const auto arrival = start + std::chrono::seconds{std::llround(secs)};
      out << secs / 60.0 << ',' << to_iso_string(arrival);
    } else {
      out << ',';
    }
    out << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CliState s;
  CLI::App app{"Bike-share trip analysis and destination / duration prediction"};
  app.set_config("--config", "", "TOML/INI file with defaults; command-line flags win");
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "Write a synthetic station + trip corpus");
  synth->add_option("--seed", s.cfg.seed, "Generator seed");
  synth->add_option("--n-trips", s.n_trips, "Number of trips");
  synth->add_option("--n-stations", s.n_stations, "Number of stations (>= 2)");
  synth->add_option("--out", s.cfg.out, "Output directory");

  auto* ingest = app.add_subcommand("ingest", "Load inputs and write ingest reports");
  add_input_flags(ingest, s);

  auto* analyze = app.add_subcommand("analyze", "Descriptive reports (composition, temporal, durations, spatial, balance)");
  add_input_flags(analyze, s);
  analyze->add_option("--year", s.cfg.year, "Year for the per-day and per-month views");
  analyze->add_option("--k", s.cfg.k, "Top-k stations and pairs")->check(CLI::PositiveNumber);
  analyze->add_option("--bin-width", s.bin_width_km, "Distance histogram bin width (km)")->check(CLI::PositiveNumber);

  auto* train = app.add_subcommand("train", "Fit and evaluate one model");
  add_input_flags(train, s);
  add_model_flags(train, s);
  train->add_option("--task", s.task, "destination|duration")->check(CLI::IsMember({"destination", "duration"}));

  auto* ablate = app.add_subcommand("ablate", "Both tasks under all four feature masks");
  add_input_flags(ablate, s);
  add_model_flags(ablate, s);

  auto* predict = app.add_subcommand("predict", "Rank destinations for a departing rider");
  predict->add_option("--model", s.model, "Destination model.json")->required();
  predict->add_option("--duration-model", s.duration_model, "Duration model.json");
  predict->add_option("--stations", s.cfg.stations, "Station CSV file")->required();
  predict->add_option("--preset", s.cfg.preset, "Column map preset")->check(CLI::IsMember(ColumnMap::preset_names()));
  predict->add_option("--origin", s.origin, "Origin station id")->required();
  predict->add_option("--start", s.start, "Departure time YYYY-MM-DD HH:MM")->required();
  predict->add_option("--user-type", s.user_type, "Customer|Subscriber");
  predict->add_option("--gender", s.gender, "Male|Female (subscribers)");
  predict->add_option("--birth-year", s.birth_year, "Birth year (subscribers)");
  predict->add_option("--k", s.cfg.k, "Number of destinations")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    finalize(s);
    if (synth->parsed()) return cmd_synth(s, out);
    if (ingest->parsed()) return cmd_ingest(s, out);
    if (analyze->parsed()) return cmd_analyze(s, out);
    if (train->parsed()) return cmd_train(s, out);
    if (ablate->parsed()) return cmd_ablate(s, out);
    if (predict->parsed()) return cmd_predict(s, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInput;
}

}  // namespace tripforge
