#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tripforge/cli.hpp"
#include "tripforge/experiment.hpp"

namespace fs = std::filesystem;
using namespace tripforge;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "tripforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream o, e;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
  r.out = o.str();
  r.err = e.str();
  return r;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("tripforge_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// Small corpus shared by the cases below.
const fs::path& corpus() {
  static const fs::path dir = [] {
    auto d = scratch("corpus");
    const auto r = cli({"synth", "--seed", "4", "--n-trips", "1500", "--n-stations", "25", "--out", d.string()});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

std::vector<std::string> inputs() {
  return {"--trips", (corpus() / "trips.csv").string(), "--stations", (corpus() / "stations.csv").string()};
}

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const std::vector<std::string> kFast{"--trees", "20", "--depth", "3"};

}  // namespace

TEST_CASE("synth then ingest round-trips") {
  const auto out = scratch("ingest");
  const auto r = cli(with(with({"ingest"}, inputs()), {"--out", out.string()}));
  REQUIRE(r.code == 0);
  const auto j = read_json(out / "ingest.json");
  CHECK(j["trips"][0]["rows_accepted"] == 1500);
  CHECK(j["trips"][0]["rows_rejected"] == 0);
  CHECK(j["stations"]["rows_accepted"] == 25);
  CHECK(j["provenance"]["input_sha256"].get<std::string>().size() == 64);

  const auto a = scratch("seed_a"), b = scratch("seed_b");
  REQUIRE(cli({"synth", "--seed", "1", "--n-trips", "50", "--out", a.string()}).code == 0);
  REQUIRE(cli({"synth", "--seed", "2", "--n-trips", "50", "--out", b.string()}).code == 0);
  const std::vector<fs::path> fa{a / "trips.csv"}, fb{b / "trips.csv"};
  CHECK(fingerprint_files(fa) != fingerprint_files(fb));
}

TEST_CASE("input errors exit with code 2") {
  const auto out = scratch("missing");
  auto r = cli({"ingest", "--trips", "/nonexistent/t.csv", "--stations", "/nonexistent/s.csv", "--out", out.string()});
  CHECK(r.code == kExitInput);
  CHECK_FALSE(fs::exists(out));
  CHECK(r.err.find("not found") != std::string::npos);

  // output directory below a regular file cannot be created
  const auto blocker = scratch("blocker");
  std::ofstream(blocker) << "x";
  r = cli(with(with({"ingest"}, inputs()), {"--out", (blocker / "sub").string()}));
  CHECK(r.code == kExitInput);

  CHECK(cli({}).code == kExitInput);
  CHECK(cli({"frobnicate"}).code == kExitInput);
  CHECK(cli(with(with({"train"}, inputs()), {"--task", "weather"})).code == kExitInput);
  CHECK(cli(with(with({"train"}, inputs()), {"--mask", "nope"})).code == kExitInput);
  CHECK(cli(with(with({"train"}, inputs()), {"--subsample", "0"})).code == kExitInput);
  CHECK(cli({"synth", "--n-stations", "1", "--out", scratch("one").string()}).code == kExitInput);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("analyze writes every report") {
  const auto out = scratch("analyze");
  const auto r = cli(with(with({"analyze"}, inputs()), {"--out", out.string(), "--year", "2014", "--k", "3"}));
  REQUIRE(r.code == 0);
  for (const char* name : {"composition", "temporal", "durations", "spatial", "balance"}) {
    CHECK(fs::exists(out / (std::string(name) + ".json")));
    CHECK(fs::exists(out / (std::string(name) + ".csv")));
  }
  CHECK(read_json(out / "composition.json")["total"] == 1500);
  CHECK(read_json(out / "run_config.json")["run_config"]["k"] == 3);
}

TEST_CASE("train writes model and metrics, deterministically") {
  const auto a = scratch("train_a");
  auto r = cli(with(with(with({"train", "--task", "destination", "--seed", "3"}, inputs()), kFast), {"--out", a.string()}));
  REQUIRE(r.code == 0);
  const auto m = read_json(a / "metrics.json");
  CHECK(m["task"] == "destination");
  for (const char* k : {"accuracy", "precision", "recall", "f1", "tp", "fp", "tn", "fn"}) CHECK(m["metrics"].contains(k));
  CHECK(m["n_positive"] == m["n_negative"]);
  const auto model = read_json(a / "model.json");
  CHECK(model["model"] == "gbdt");
  CHECK(model["trees"].size() == 20);
  CHECK(model.contains("provenance"));
  const auto first = slurp(a / "metrics.json");
  const auto first_model = slurp(a / "model.json");
  REQUIRE(cli(with(with(with({"train", "--task", "destination", "--seed", "3"}, inputs()), kFast), {"--out", a.string()})).code == 0);
  CHECK(slurp(a / "metrics.json") == first);
  CHECK(slurp(a / "model.json") == first_model);

  const auto d = scratch("train_d");
  r = cli(with(with({"train", "--task", "duration", "--mask", "station"}, inputs()), {"--out", d.string()}));
  REQUIRE(r.code == 0);
  const auto dm = read_json(d / "metrics.json");
  CHECK(dm["mask"] == "station");
  CHECK(dm["metrics"].contains("mae_minutes"));
  CHECK(dm["metrics"].contains("r2"));
  CHECK(read_json(d / "model.json")["coefficients"].size() == 7);
}

TEST_CASE("ablate covers four masks per task") {
  const auto out = scratch("ablate");
  const auto r = cli(with(with(with({"ablate"}, inputs()), kFast), {"--out", out.string()}));
  REQUIRE(r.code == 0);
  const auto rows = read_json(out / "ablation.json")["rows"];
  REQUIRE(rows.size() == 8);
  int dest = 0, dur = 0;
  for (const auto& row : rows) (row["task"] == "destination" ? dest : dur)++;
  CHECK(dest == 4);
  CHECK(dur == 4);
  std::istringstream csv(slurp(out / "ablation.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 9);
}

TEST_CASE("predict ranks destinations") {
  const auto dest = scratch("pred_dest"), dur = scratch("pred_dur");
  REQUIRE(cli(with(with(with({"train", "--task", "destination"}, inputs()), kFast), {"--out", dest.string()})).code == 0);
  REQUIRE(cli(with(with({"train", "--task", "duration"}, inputs()), {"--out", dur.string()})).code == 0);
  const std::vector<std::string> base{"predict", "--model", (dest / "model.json").string(), "--stations",
                                      (corpus() / "stations.csv").string(), "--origin", "3",
                                      "--start", "2014-07-15 08:15", "--gender", "Female", "--birth-year", "1988"};
  auto lines_of = [](const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
  };
  auto r = cli(with(base, {"--k", "1"}));
  REQUIRE(r.code == 0);
  CHECK(lines_of(r.out).size() == 2);
  r = cli(with(base, {"--k", "1000"}));
  REQUIRE(r.code == 0);
  CHECK(lines_of(r.out).size() == 26);

  r = cli(with(base, {"--k", "3", "--duration-model", (dur / "model.json").string()}));
  REQUIRE(r.code == 0);
  const auto rows = lines_of(r.out);
  REQUIRE(rows.size() == 4);
  // rank,station_id,name,probability,duration_minutes,arrival_time
  std::vector<std::string> f;
  std::istringstream row(rows[1]);
  for (std::string c; std::getline(row, c, ',');) f.push_back(c);
  REQUIRE(f.size() == 6);
  const double minutes = std::stod(f[4]);
  const auto arrival = parse_iso_timestamp(f[5]);
  REQUIRE(arrival.has_value());
  // arrival = start + round(seconds); minutes are printed to six significant digits
  const auto elapsed = to_epoch_seconds(*arrival) - to_epoch_seconds(make_timestamp(2014, 7, 15, 8, 15));
  CHECK(std::abs(static_cast<double>(elapsed) - minutes * 60) <= 0.51);

  CHECK(cli({"predict", "--model", (dest / "model.json").string(), "--stations", (corpus() / "stations.csv").string(),
             "--origin", "9999", "--start", "2014-07-15 08:15"})
            .code == kExitInput);
  CHECK(cli(with(base, {"--user-type", "Alien"})).code == kExitInput);
  CHECK(cli({"predict", "--model", "/nonexistent.json", "--stations", (corpus() / "stations.csv").string(),
             "--origin", "3", "--start", "2014-07-15 08:15"})
            .code == kExitInput);
}
