#include <doctest.h>

#include <sstream>
#include <stdexcept>

#include "tripforge/analysis.hpp"
#include "tripforge/ingest.hpp"

using namespace tripforge;

namespace {

const char* kStations =
    "id,name,latitude,longitude,dpcapacity\n"
    "1,Alpha,41.88,-87.62,15\n"
    "2,\"Beta, the second\",41.90,-87.64,19\n"
    "3,Gamma,41.87,-87.65,11\n";

const char* kHeader =
    "trip_id,starttime,stoptime,bikeid,tripduration,from_station_id,from_station_name,to_station_id,"
    "to_station_name,usertype,gender,birthyear\n";

StationRegistry stations() {
  std::istringstream in(kStations);
  return load_stations(in, ColumnMap{}).registry;
}

std::string trip_row(int id, int from, int to, const char* user = "Subscriber", const char* gender = "Male",
                     const char* birth = "1985") {
  std::ostringstream o;
  o << id << ",6/30/2014 23:57,7/1/2014 0:07,480,600," << from << ",x," << to << ",y," << user << ',' << gender
    << ',' << birth << '\n';
  return o.str();
}

}  // namespace

TEST_CASE("stations: quoted names, duplicates, header only") {
  auto reg = stations();
  REQUIRE(reg.size() == 3);
  CHECK(reg.at(2).name == "Beta, the second");
  CHECK(reg.at(2).capacity == 19);

  std::istringstream dup(std::string(kStations) + "2,Again,41.1,-87.1,3\n");
  const auto d = load_stations(dup, ColumnMap{});
  CHECK(d.registry.size() == 3);
  CHECK(d.report.rows_rejected == 1);
  CHECK(d.report.rejection_reasons.at(std::string(to_string(RejectReason::DuplicateId))) == 1);

  std::istringstream header_only("id,name,latitude,longitude,dpcapacity\n");
  const auto h = load_stations(header_only, ColumnMap{});
  CHECK(h.registry.empty());
  CHECK(h.report.rows_read == 0);

  std::istringstream one("id,name,latitude,longitude,dpcapacity\n7,Solo,41.8,-87.6,9\n");
  CHECK(load_stations(one, ColumnMap{}).registry.size() == 1);

  std::istringstream bad("id,name,latitude,longitude\n8,Far,95.0,-87.6\n");
  const auto b = load_stations(bad, ColumnMap{});
  CHECK(b.registry.empty());
  CHECK(b.report.rejection_reasons.count(std::string(to_string(RejectReason::CoordinateRange))) == 1);
}

TEST_CASE("trips citing unknown stations are rejected and counted") {
  const auto reg = stations();
  std::string text = kHeader;
  for (int i = 1; i <= 8; ++i) text += trip_row(i, 1 + i % 3, 1 + (i + 1) % 3);
  text += trip_row(9, 99999, 1);
  text += trip_row(10, 2, 99999);
  std::istringstream in(text);
  const auto r = load_trips(in, ColumnMap{}, reg);
  CHECK(r.trips.size() == 8);
  CHECK(r.report.rows_read == 10);
  CHECK(r.report.rows_accepted == 8);
  CHECK(r.report.rows_rejected == 2);
  CHECK(r.report.rejection_reasons.at(std::string(to_string(RejectReason::StationUnknown))) == 2);
  REQUIRE(r.report.rejections.size() == 2);
  CHECK(r.report.rejections[0].line == 10);
  CHECK(r.report.rejections[1].line == 11);
  CHECK(r.report.rows_read == r.report.rows_accepted + r.report.rows_rejected);
}

TEST_CASE("trip field handling") {
  const auto reg = stations();
  std::string text = kHeader;
  text += trip_row(1, 1, 2);
  text += trip_row(2, 1, 2, "Customer", "", "");
  text += trip_row(3, 1, 2, "Subscriber", "", "");
  text += trip_row(4, 1, 2, "Dependent", "Female", "1990");
  text += trip_row(1, 2, 3);                              // duplicate id
  text += trip_row(5, 1, 2, "Alien");                     // bad user type
  text += trip_row(6, 1, 2, "Subscriber", "Robot");       // bad gender
  text += "7,6/30/2014 23:57,garbage,480,600,1,x,2,y,Customer,,\n";
  text += "8,6/30/2014 23:57,7/1/2014 0:07,480,\"1,200\",1,x,2,y,Customer,,\n";
  text += "9,6/30/2014 23:57,7/1/2014 0:07\n";            // short row
  text += "\n";
  // fall-back DST hour: wall-clock end before start by under an hour
  text += "10,11/2/2014 1:50,11/2/2014 1:05,480,900,1,x,2,y,Customer,,\n";
  text += "11,11/2/2014 5:50,11/2/2014 1:05,480,900,1,x,2,y,Customer,,\n";
  std::istringstream in(text);
  const auto r = load_trips(in, ColumnMap{}, reg);
  REQUIRE(r.trips.size() == 6);
  CHECK(r.trips[0].user == UserCategory::subscriber(Gender::Male, 1985));
  CHECK(r.trips[0].start_time == make_timestamp(2014, 6, 30, 23, 57));
  CHECK(r.trips[0].duration_seconds == 600);
  CHECK(r.trips[1].user == UserCategory::customer());
  CHECK(r.trips[2].user == UserCategory::subscriber(Gender::Unknown, std::nullopt));
  CHECK(r.trips[3].user == UserCategory::subscriber(Gender::Female, 1990));
  CHECK(r.trips[4].duration_seconds == 1200);
  CHECK(r.trips[5].trip_id == 10);
  CHECK(r.trips[5].end_time == make_timestamp(2014, 11, 2, 2, 5));
  const auto& reasons = r.report.rejection_reasons;
  for (auto reason : {RejectReason::DuplicateId, RejectReason::BadUserType, RejectReason::BadGender,
                      RejectReason::BadTimestamp, RejectReason::ColumnCount, RejectReason::EndBeforeStart})
    CHECK(reasons.at(std::string(to_string(reason))) == 1);
  CHECK(r.report.rows_read == r.report.rows_accepted + r.report.rows_rejected);
}

TEST_CASE("missing columns and files throw") {
  const auto reg = stations();
  std::istringstream in("trip_id,starttime\n1,2\n");
  CHECK_THROWS_AS(load_trips(in, ColumnMap{}, reg), std::runtime_error);
  std::istringstream empty("");
  CHECK_THROWS_AS(load_stations(empty, ColumnMap{}), std::runtime_error);
  CHECK_THROWS_AS(load_trips(std::filesystem::path("/nonexistent/trips.csv"), ColumnMap{}, reg),
                  std::runtime_error);
}

TEST_CASE("timestamp formats") {
  CHECK(parse_timestamp("7/1/2014 0:07", "M/D/YYYY H:MM") == make_timestamp(2014, 7, 1, 0, 7));
  CHECK(parse_timestamp("12/31/2013 23:59:30", "M/D/YYYY H:MM") == make_timestamp(2013, 12, 31, 23, 59, 30));
  CHECK(parse_timestamp("2014-03-05 08:09", "YYYY-M-D H:MM") == make_timestamp(2014, 3, 5, 8, 9));
  CHECK_FALSE(parse_timestamp("13/1/2014 0:07", "M/D/YYYY H:MM").has_value());
  CHECK_FALSE(parse_timestamp("2/29/2014 0:07", "M/D/YYYY H:MM").has_value());
  CHECK_FALSE(parse_timestamp("7/1/2014 0:7", "M/D/YYYY H:MM").has_value());
  CHECK(format_timestamp(make_timestamp(2014, 7, 1, 0, 7), "M/D/YYYY H:MM") == "7/1/2014 0:07");
  CHECK(format_timestamp(make_timestamp(2014, 7, 1, 0, 7, 5), "M/D/YYYY H:MM") == "7/1/2014 0:07:05");
  for (const auto& name : ColumnMap::preset_names()) {
    const auto map = ColumnMap::preset(name);
    REQUIRE(map.has_value());
    const auto t = make_timestamp(2015, 11, 9, 17, 4, 33);
    CHECK(parse_timestamp(format_timestamp(t, map->timestamp_format), map->timestamp_format) == t);
  }
  CHECK_FALSE(ColumnMap::preset("nope").has_value());
}

TEST_CASE("csv reader") {
  std::istringstream in("\xEF\xBB\xBF" "a,\"b \"\"q\"\"\",c\r\n\"multi\nline\",2,3\n");
  csv::Reader r(in);
  std::vector<std::string> f;
  REQUIRE(r.next(f));
  CHECK(f == std::vector<std::string>{"a", "b \"q\"", "c"});
  REQUIRE(r.next(f));
  CHECK(r.record_line() == 2);
  CHECK(f[0] == "multi\nline");
  CHECK_FALSE(r.next(f));
  CHECK(csv::escape("plain") == "plain");
  CHECK(csv::escape("a,b") == "\"a,b\"");
  CHECK(csv::escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("synthetic corpus round-trips through the loaders") {
  const auto c = synth_corpus(3, 500, 20);
  std::stringstream st, tr;
  write_stations_csv(st, c.registry);
  write_trips_csv(tr, c.trips, c.registry);
  const auto s = load_stations(st, ColumnMap{});
  CHECK(s.report.rows_rejected == 0);
  CHECK(s.registry.size() == 20);
  const auto t = load_trips(tr, ColumnMap{}, s.registry);
  CHECK(t.report.rows_rejected == 0);
  REQUIRE(t.trips.size() == c.trips.size());
  for (std::size_t i = 0; i < t.trips.size(); ++i) CHECK(t.trips[i] == c.trips[i]);
}

TEST_CASE("synthetic generator contract") {
  const auto a = synth_corpus(42, 2000, 30);
  const auto b = synth_corpus(42, 2000, 30);
  CHECK(a.trips == b.trips);
  CHECK(synth_corpus(43, 2000, 30).trips != a.trips);
  CHECK(synth_corpus(1, 0, 5).trips.empty());
  CHECK_THROWS_AS(synth_corpus(1, 10, 1), std::invalid_argument);
  for (std::size_t i = 1; i < a.trips.size(); ++i) CHECK(a.trips[i - 1].start_time <= a.trips[i].start_time);
  for (const auto& t : a.trips) {
    CHECK(t.end_time == t.start_time + std::chrono::seconds{t.duration_seconds});
    CHECK(a.registry.contains(t.origin_station_id));
    CHECK(a.registry.contains(t.destination_station_id));
    if (t.user.kind == UserKind::Customer) CHECK(t.user == UserCategory::customer());
  }

  const auto big = synth_corpus(8, 100000, 100);
  const auto comp = composition(big.trips);
  CHECK(*comp.fraction(comp.subscribers()) == doctest::Approx(0.66).epsilon(0.02 / 0.66));
}
