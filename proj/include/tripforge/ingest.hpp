#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tripforge/trip_model.hpp"

namespace tripforge {

/// Source column names for each target field, plus the timestamp layout.
///
/// Timestamp formats are written with the tokens YYYY, M, D, H, MM and SS;
/// any other character must match literally. M, D and H accept one or two
/// digits on input (so "YYYY-M-D" reads zero-padded ISO dates) and are
/// written unpadded; MM is always the two-digit minute. A trailing ":SS"
/// group in the data is always accepted even when the format stops at
/// minutes, and is emitted on write only when non-zero.
struct ColumnMap {
  std::string trip_id = "trip_id";
  std::string start_time = "starttime";
  std::string end_time = "stoptime";
  std::string duration = "tripduration";
  std::string origin_id = "from_station_id";
  std::string destination_id = "to_station_id";
  std::string user_type = "usertype";
  std::string gender = "gender";
  std::string birth_year = "birthyear";

  std::string station_id = "id";
  std::string station_name = "name";
  std::string latitude = "latitude";
  std::string longitude = "longitude";
  std::string capacity = "dpcapacity";

  std::string timestamp_format = "M/D/YYYY H:MM";

  /// Known presets: default, divvy2013, divvy2014q1q2, divvy2014q3q4, divvy2015.
  static std::optional<ColumnMap> preset(std::string_view name);
  static std::vector<std::string> preset_names();
};

std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view format);
std::string format_timestamp(Timestamp t, std::string_view format);

enum class RejectReason {
  ColumnCount,
  BadTripId,
  BadTimestamp,
  BadDuration,
  EndBeforeStart,
  BadStationId,
  StationUnknown,
  BadUserType,
  BadGender,
  BadBirthYear,
  DuplicateId,
  BadNumber,
  CoordinateRange,
};

std::string_view to_string(RejectReason r);

struct Rejection {
  std::size_t line = 0;  // 1-based physical line of the record start
  RejectReason reason{};
};

struct IngestReport {
  std::string source;
  std::size_t rows_read = 0;
  std::size_t rows_accepted = 0;
  std::size_t rows_rejected = 0;
  std::map<std::string, std::size_t> rejection_reasons;
  std::vector<Rejection> rejections;

  void accept() { ++rows_read; ++rows_accepted; }
  void reject(std::size_t line, RejectReason r);
};

nlohmann::json to_json(const IngestReport& report);
/// One "line,reason" row per rejection, with a header.
void write_rejections_csv(std::ostream& out, const IngestReport& report);

struct TripLoad {
  std::vector<TripRecord> trips;
  IngestReport report;
};

struct StationLoad {
  StationRegistry registry;
  IngestReport report;
};

/// Throws std::runtime_error when the file cannot be opened or a required
/// column is missing from the header. Malformed rows are counted, never fatal.
TripLoad load_trips(const std::filesystem::path& path, const ColumnMap& map,
                    const StationRegistry& registry);
TripLoad load_trips(std::istream& in, const ColumnMap& map, const StationRegistry& registry,
                    std::string source = "<stream>");

StationLoad load_stations(const std::filesystem::path& path, const ColumnMap& map);
StationLoad load_stations(std::istream& in, const ColumnMap& map, std::string source = "<stream>");

/// Writers emit the columns named by `map` in the order of the default Divvy
/// header. Output is re-ingestable by the loaders with the same map.
void write_trips_csv(std::ostream& out, std::span<const TripRecord> trips,
                     const StationRegistry& registry, const ColumnMap& map = {});
void write_stations_csv(std::ostream& out, const StationRegistry& registry,
                        const ColumnMap& map = {});

/// Mixture weights for the synthetic generator.
struct SynthConfig {
  // customer, male subscriber, female subscriber, other subscriber
  std::vector<double> category_weights{0.34, 0.50, 0.15, 0.01};
  // fraction of subscribers with a known birth year
  double subscriber_birth_year_known = 0.98;
  Timestamp begin = make_timestamp(2013, 7, 1);
  Timestamp end = make_timestamp(2015, 7, 1);
  double center_latitude = 41.88;
  double center_longitude = -87.63;
  double spread_degrees = 0.035;
  // each origin sends most of its trips to a handful of nearby stations
  int preferred_destinations = 4;
  double preferred_share = 0.85;
};

struct SynthCorpus {
  StationRegistry registry;
  std::vector<TripRecord> trips;
};

/// Deterministic in (seed, n_trips, n_stations, config). Throws
/// std::invalid_argument when n_stations < 2.
SynthCorpus synth_corpus(std::uint64_t seed, std::size_t n_trips, std::size_t n_stations,
                         const SynthConfig& config = {});

namespace csv {

/// RFC-4180 record reader: quoted fields, doubled quotes, embedded newlines,
/// CRLF or LF line endings. A UTF-8 BOM at the start of the stream is skipped.
class Reader {
 public:
  explicit Reader(std::istream& in);
  /// Returns false at end of input.
  bool next(std::vector<std::string>& fields);
  /// Physical line on which the last returned record started.
  std::size_t record_line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
  bool first_ = true;
};

std::string escape(std::string_view field);

}  // namespace csv

}  // namespace tripforge
