#include "tripforge/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "tripforge/analysis.hpp"

namespace tripforge {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  Int v{};
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v{};
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Some releases write durations as "1,234" or "316.0".
std::optional<std::int64_t> parse_duration(std::string_view s) {
  std::string digits;
  for (char c : trim(s))
    if (c != ',') digits.push_back(c);
  if (auto i = parse_int<std::int64_t>(digits)) return i;
  if (auto d = parse_double(digits)) return static_cast<std::int64_t>(std::llround(*d));
  return std::nullopt;
}

bool read_digits(std::string_view text, std::size_t& pos, std::size_t min_len, std::size_t max_len,
                 unsigned& out) {
  std::size_t n = 0;
  unsigned v = 0;
  while (pos + n < text.size() && n < max_len && text[pos + n] >= '0' && text[pos + n] <= '9') {
    v = v * 10 + static_cast<unsigned>(text[pos + n] - '0');
    ++n;
  }
  if (n < min_len) return false;
  pos += n;
  out = v;
  return true;
}

struct TripColumns {
  std::size_t trip_id, start, end, duration, origin, destination, user_type;
  std::optional<std::size_t> gender, birth_year;
  std::size_t width;
};

std::optional<std::size_t> find_column(const std::vector<std::string>& header, std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (trim(header[i]) == name) return i;
  return std::nullopt;
}

std::size_t require_column(const std::vector<std::string>& header, std::string_view name,
                           const std::string& source) {
  if (auto i = find_column(header, name)) return *i;
  throw std::runtime_error(source + ": missing column '" + std::string(name) + "'");
}

}  // namespace

std::optional<ColumnMap> ColumnMap::preset(std::string_view name) {
  ColumnMap m;
  if (name == "default" || name == "divvy2015" || name == "divvy2014q3q4") return m;
  if (name == "divvy2014q1q2") {
    m.timestamp_format = "YYYY-M-D H:MM";
    return m;
  }
  if (name == "divvy2013") {
    m.birth_year = "birthday";
    m.timestamp_format = "YYYY-M-D H:MM";
    return m;
  }
  return std::nullopt;
}

std::vector<std::string> ColumnMap::preset_names() {
  return {"default", "divvy2013", "divvy2014q1q2", "divvy2014q3q4", "divvy2015"};
}

std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view format) {
  text = trim(text);
  unsigned y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  std::size_t pos = 0;
  std::size_t f = 0;
  while (f < format.size()) {
    auto rest = format.substr(f);
    bool ok = true;
    if (rest.starts_with("YYYY")) {
      ok = read_digits(text, pos, 4, 4, y);
      f += 4;
    } else if (rest.starts_with("MM")) {
      ok = read_digits(text, pos, 2, 2, mi);
      f += 2;
    } else if (rest.starts_with("SS")) {
      ok = read_digits(text, pos, 2, 2, s);
      f += 2;
    } else if (rest.starts_with("M")) {
      ok = read_digits(text, pos, 1, 2, mo);
      f += 1;
    } else if (rest.starts_with("D")) {
      ok = read_digits(text, pos, 1, 2, d);
      f += 1;
    } else if (rest.starts_with("H")) {
      ok = read_digits(text, pos, 1, 2, h);
      f += 1;
    } else {
      ok = pos < text.size() && text[pos] == format[f];
      ++pos;
      ++f;
    }
    if (!ok) return std::nullopt;
  }
  if (pos + 3 == text.size() && text[pos] == ':' && format.find("SS") == std::string_view::npos) {
    ++pos;
    if (!read_digits(text, pos, 2, 2, s)) return std::nullopt;
  }
  if (pos != text.size()) return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{static_cast<int>(y)} / month{mo} / day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
  return make_timestamp(static_cast<int>(y), mo, d, h, mi, s);
}

std::string format_timestamp(Timestamp t, std::string_view format) {
  const auto c = civil_fields(t);
  std::string out;
  auto pad2 = [&](unsigned v) {
    out.push_back(static_cast<char>('0' + v / 10));
    out.push_back(static_cast<char>('0' + v % 10));
  };
  std::size_t f = 0;
  while (f < format.size()) {
    auto rest = format.substr(f);
    if (rest.starts_with("YYYY")) {
      out += std::to_string(c.year);
      f += 4;
    } else if (rest.starts_with("MM")) {
      pad2(c.minute);
      f += 2;
    } else if (rest.starts_with("SS")) {
      pad2(c.second);
      f += 2;
    } else if (rest.starts_with("M")) {
      out += std::to_string(c.month);
      ++f;
    } else if (rest.starts_with("D")) {
      out += std::to_string(c.day);
      ++f;
    } else if (rest.starts_with("H")) {
      out += std::to_string(c.hour);
      ++f;
    } else {
      out.push_back(format[f++]);
    }
  }
  if (c.second != 0 && format.find("SS") == std::string_view::npos) {
    out.push_back(':');
    pad2(c.second);
  }
  return out;
}

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::ColumnCount: return "ColumnCount";
    case RejectReason::BadTripId: return "BadTripId";
    case RejectReason::BadTimestamp: return "BadTimestamp";
    case RejectReason::BadDuration: return "BadDuration";
    case RejectReason::EndBeforeStart: return "EndBeforeStart";
    case RejectReason::BadStationId: return "BadStationId";
    case RejectReason::StationUnknown: return "StationUnknown";
    case RejectReason::BadUserType: return "BadUserType";
    case RejectReason::BadGender: return "BadGender";
    case RejectReason::BadBirthYear: return "BadBirthYear";
    case RejectReason::DuplicateId: return "DuplicateId";
    case RejectReason::BadNumber: return "BadNumber";
    case RejectReason::CoordinateRange: return "CoordinateRange";
  }
  return "Unknown";
}

void IngestReport::reject(std::size_t line, RejectReason r) {
  ++rows_read;
  ++rows_rejected;
  ++rejection_reasons[std::string(to_string(r))];
  rejections.push_back({line, r});
}

nlohmann::json to_json(const IngestReport& report) {
  return {{"source", report.source},
          {"rows_read", report.rows_read},
          {"rows_accepted", report.rows_accepted},
          {"rows_rejected", report.rows_rejected},
          {"rejection_reasons", report.rejection_reasons}};
}

void write_rejections_csv(std::ostream& out, const IngestReport& report) {
  out << "line,reason\n";
  for (const auto& r : report.rejections) out << r.line << ',' << to_string(r.reason) << '\n';
}

// --- CSV -------------------------------------------------------------------

namespace csv {

Reader::Reader(std::istream& in) : in_(in) {}

bool Reader::next(std::vector<std::string>& fields) {
  fields.clear();
  if (first_) {
    first_ = false;
    if (in_.peek() == 0xEF) {
      char bom[3];
      in_.read(bom, 3);
      if (!(static_cast<unsigned char>(bom[1]) == 0xBB && static_cast<unsigned char>(bom[2]) == 0xBF)) {
        in_.seekg(0);
      }
    }
  }
  int c = in_.get();
  if (c == std::char_traits<char>::eof()) return false;
  record_line_ = line_;
  std::string field;
  bool quoted = false;
  for (;; c = in_.get()) {
    if (c == std::char_traits<char>::eof()) {
      fields.push_back(std::move(field));
      return true;
    }
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\r') {
      if (in_.peek() == '\n') in_.get();
      ++line_;
      fields.push_back(std::move(field));
      return true;
    } else if (ch == '\n') {
      ++line_;
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(ch);
    }
  }
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace csv

// --- loaders ---------------------------------------------------------------

TripLoad load_trips(const std::filesystem::path& path, const ColumnMap& map,
                    const StationRegistry& registry) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trip file " + path.string());
  return load_trips(in, map, registry, path.string());
}

TripLoad load_trips(std::istream& in, const ColumnMap& map, const StationRegistry& registry,
                    std::string source) {
  TripLoad out;
  out.report.source = source;
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw std::runtime_error(source + ": missing header row");

  TripColumns col{};
  col.trip_id = require_column(row, map.trip_id, source);
  col.start = require_column(row, map.start_time, source);
  col.end = require_column(row, map.end_time, source);
  col.duration = require_column(row, map.duration, source);
  col.origin = require_column(row, map.origin_id, source);
  col.destination = require_column(row, map.destination_id, source);
  col.user_type = require_column(row, map.user_type, source);
  col.gender = find_column(row, map.gender);
  col.birth_year = find_column(row, map.birth_year);
  col.width = row.size();

  std::unordered_set<TripId> seen;
  while (reader.next(row)) {
    const auto line = reader.record_line();
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (row.size() != col.width) {
      out.report.reject(line, RejectReason::ColumnCount);
      continue;
    }
    TripRecord t;
    auto id = parse_int<TripId>(row[col.trip_id]);
    if (!id || *id <= 0) {
      out.report.reject(line, RejectReason::BadTripId);
      continue;
    }
    t.trip_id = *id;
    auto start = parse_timestamp(row[col.start], map.timestamp_format);
    auto end = parse_timestamp(row[col.end], map.timestamp_format);
    if (!start || !end) {
      out.report.reject(line, RejectReason::BadTimestamp);
      continue;
    }
    auto duration = parse_duration(row[col.duration]);
    if (!duration || *duration < 0) {
      out.report.reject(line, RejectReason::BadDuration);
      continue;
    }
    t.start_time = *start;
    t.duration_seconds = *duration;
    t.end_time = *end;
    if (*end < *start) {
      // The fall-back DST hour makes wall-clock end precede start; the stored
      // duration is authoritative, so rebuild the end from it.
      if (*start - *end > std::chrono::hours{1}) {
        out.report.reject(line, RejectReason::EndBeforeStart);
        continue;
      }
      t.end_time = *start + std::chrono::seconds{*duration};
    }
    auto origin = parse_int<StationId>(row[col.origin]);
    auto destination = parse_int<StationId>(row[col.destination]);
    if (!origin || !destination) {
      out.report.reject(line, RejectReason::BadStationId);
      continue;
    }
    if (!registry.contains(*origin) || !registry.contains(*destination)) {
      out.report.reject(line, RejectReason::StationUnknown);
      continue;
    }
    t.origin_station_id = *origin;
    t.destination_station_id = *destination;

    const auto kind = trim(row[col.user_type]);
    if (kind == "Customer") {
      t.user = UserCategory::customer();
    } else if (kind == "Subscriber" || kind == "Dependent") {
      Gender g = Gender::Unknown;
      if (col.gender) {
        const auto gs = trim(row[*col.gender]);
        if (gs == "Male") g = Gender::Male;
        else if (gs == "Female") g = Gender::Female;
        else if (!gs.empty()) {
          out.report.reject(line, RejectReason::BadGender);
          continue;
        }
      }
      std::optional<int> birth;
      if (col.birth_year) {
        const auto bs = trim(row[*col.birth_year]);
        if (!bs.empty()) {
          auto by = parse_int<int>(bs);
          if (!by) {
            if (auto bd = parse_double(bs)) by = static_cast<int>(*bd);
          }
          if (!by || *by <= 0) {
            out.report.reject(line, RejectReason::BadBirthYear);
            continue;
          }
          birth = *by;
        }
      }
      t.user = UserCategory::subscriber(g, birth);
    } else {
      out.report.reject(line, RejectReason::BadUserType);
      continue;
    }
    if (!seen.insert(t.trip_id).second) {
      out.report.reject(line, RejectReason::DuplicateId);
      continue;
    }
    out.trips.push_back(std::move(t));
    out.report.accept();
  }
  return out;
}

StationLoad load_stations(const std::filesystem::path& path, const ColumnMap& map) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open station file " + path.string());
  return load_stations(in, map, path.string());
}

StationLoad load_stations(std::istream& in, const ColumnMap& map, std::string source) {
  StationLoad out;
  out.report.source = source;
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw std::runtime_error(source + ": missing header row");
  const auto c_id = require_column(row, map.station_id, source);
  const auto c_name = require_column(row, map.station_name, source);
  const auto c_lat = require_column(row, map.latitude, source);
  const auto c_lon = require_column(row, map.longitude, source);
  const auto c_cap = find_column(row, map.capacity);
  const auto width = row.size();

  while (reader.next(row)) {
    const auto line = reader.record_line();
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (row.size() != width) {
      out.report.reject(line, RejectReason::ColumnCount);
      continue;
    }
    auto id = parse_int<StationId>(row[c_id]);
    if (!id || *id <= 0) {
      out.report.reject(line, RejectReason::BadStationId);
      continue;
    }
    auto lat = parse_double(row[c_lat]);
    auto lon = parse_double(row[c_lon]);
    std::optional<int> cap = 0;
    if (c_cap) cap = parse_int<int>(row[*c_cap]);
    if (!lat || !lon || !cap || *cap < 0) {
      out.report.reject(line, RejectReason::BadNumber);
      continue;
    }
    if (!valid_coordinates(*lat, *lon)) {
      out.report.reject(line, RejectReason::CoordinateRange);
      continue;
    }
    Station s{*id, std::string(trim(row[c_name])), *lat, *lon, *cap};
    if (!out.registry.insert(std::move(s))) {
      out.report.reject(line, RejectReason::DuplicateId);
      continue;
    }
    out.report.accept();
  }
  return out;
}

// --- writers ---------------------------------------------------------------

void write_trips_csv(std::ostream& out, std::span<const TripRecord> trips,
                     const StationRegistry& registry, const ColumnMap& map) {
  out << map.trip_id << ',' << map.start_time << ',' << map.end_time << ",bikeid," << map.duration
      << ',' << map.origin_id << ",from_station_name," << map.destination_id
      << ",to_station_name," << map.user_type << ',' << map.gender << ',' << map.birth_year << '\n';
  auto name_of = [&](StationId id) {
    const auto* s = registry.find(id);
    return s ? csv::escape(s->name) : std::string();
  };
  for (const auto& t : trips) {
    out << t.trip_id << ',' << format_timestamp(t.start_time, map.timestamp_format) << ','
        << format_timestamp(t.end_time, map.timestamp_format) << ",0," << t.duration_seconds << ','
        << t.origin_station_id << ',' << name_of(t.origin_station_id) << ','
        << t.destination_station_id << ',' << name_of(t.destination_station_id) << ','
        << to_string(t.user.kind) << ',';
    if (t.user.gender != Gender::Unknown) out << to_string(t.user.gender);
    out << ',';
    if (t.user.birth_year) out << *t.user.birth_year;
    out << '\n';
  }
}

void write_stations_csv(std::ostream& out, const StationRegistry& registry, const ColumnMap& map) {
  out << map.station_id << ',' << map.station_name << ',' << map.latitude << ',' << map.longitude
      << ',' << map.capacity << '\n';
  char lat[32], lon[32];
  for (const auto& s : registry.stations()) {
    auto r1 = std::to_chars(lat, lat + sizeof lat, s.latitude);
    auto r2 = std::to_chars(lon, lon + sizeof lon, s.longitude);
    out << s.id << ',' << csv::escape(s.name) << ',' << std::string_view(lat, r1.ptr) << ','
        << std::string_view(lon, r2.ptr) << ',' << s.capacity << '\n';
  }
}

// --- synthetic corpus ------------------------------------------------------

namespace {

constexpr std::array<double, 12> kSubscriberSeason{0.25, 0.3, 0.5, 0.8, 1.1, 1.3,
                                                   1.4,  1.4, 1.2, 1.0, 0.6, 0.4};
constexpr std::array<double, 12> kCustomerSeason{0.03, 0.04, 0.15, 0.5, 1.2, 1.7,
                                                 1.9,  1.9,  1.2,  0.7, 0.1, 0.06};
constexpr std::array<double, 24> kSubscriberHours{0.3, 0.2, 0.1, 0.1, 0.2, 0.8, 2.5, 5.5,
                                                  6.5, 3.5, 2.2, 2.5, 3.0, 2.8, 2.6, 3.2,
                                                  5.5, 7.0, 5.0, 3.0, 2.0, 1.5, 1.0, 0.6};
constexpr std::array<double, 24> kCustomerHours{0.3, 0.2, 0.1, 0.1, 0.1, 0.2, 0.4, 0.8,
                                                1.2, 2.2, 4.0, 5.5, 6.5, 7.0, 7.0, 7.0,
                                                6.5, 5.5, 4.0, 3.0, 2.0, 1.4, 0.9, 0.5};

std::discrete_distribution<std::size_t> day_distribution(std::span<const double> season,
                                                         double weekday_w, double weekend_w,
                                                         Timestamp begin, std::size_t n_days) {
  std::vector<double> w(n_days);
  for (std::size_t i = 0; i < n_days; ++i) {
    const auto c = civil_fields(begin + std::chrono::days{i});
    const bool weekend = c.weekday == 0 || c.weekday == 6;
    w[i] = season[c.month - 1] * (weekend ? weekend_w : weekday_w);
  }
  return {w.begin(), w.end()};
}

}  // namespace

SynthCorpus synth_corpus(std::uint64_t seed, std::size_t n_trips, std::size_t n_stations,
                         const SynthConfig& cfg) {
  if (n_stations < 2) throw std::invalid_argument("synth_corpus: need at least 2 stations");
  if (cfg.category_weights.size() != kCategoryCount)
    throw std::invalid_argument("synth_corpus: category_weights must have 4 entries");
  if (!(cfg.begin < cfg.end)) throw std::invalid_argument("synth_corpus: empty time range");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SynthCorpus out;

  const double lon_scale = 1.0 / std::cos(cfg.center_latitude * std::numbers::pi / 180.0);
  std::vector<double> popularity(n_stations);
  for (std::size_t i = 0; i < n_stations; ++i) {
    const double dlat = (2 * unit(rng) - 1) * cfg.spread_degrees;
    const double dlon = (2 * unit(rng) - 1) * cfg.spread_degrees * lon_scale;
    Station s;
    s.id = static_cast<StationId>(i + 1);
    s.name = "Station " + std::to_string(s.id);
    s.latitude = std::round((cfg.center_latitude + dlat) * 1e6) / 1e6;
    s.longitude = std::round((cfg.center_longitude + dlon) * 1e6) / 1e6;
    s.capacity = 11 + static_cast<int>(unit(rng) * 16);
    popularity[i] = 1.0 / (0.3 + std::hypot(dlat, dlon / lon_scale) / cfg.spread_degrees);
    out.registry.insert(std::move(s));
  }
  const auto stations = out.registry.stations();

  // preferred destinations: nearest neighbours of each origin
  const auto n_pref = std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.preferred_destinations, 1)),
                                            n_stations - 1);
  std::vector<std::vector<std::size_t>> preferred(n_stations);
  for (std::size_t i = 0; i < n_stations; ++i) {
    std::vector<std::pair<double, std::size_t>> by_dist;
    for (std::size_t j = 0; j < n_stations; ++j)
      if (j != i) by_dist.emplace_back(manhattan_km(stations[i], stations[j]), j);
    std::partial_sort(by_dist.begin(), by_dist.begin() + static_cast<std::ptrdiff_t>(n_pref),
                      by_dist.end());
    for (std::size_t r = 0; r < n_pref; ++r) preferred[i].push_back(by_dist[r].second);
  }
  std::vector<double> rank_w(n_pref);
  for (std::size_t r = 0; r < n_pref; ++r) rank_w[r] = 1.0 / static_cast<double>(r + 1);

  std::discrete_distribution<std::size_t> pick_origin(popularity.begin(), popularity.end());
  std::discrete_distribution<std::size_t> pick_rank(rank_w.begin(), rank_w.end());
  std::uniform_int_distribution<std::size_t> pick_any(0, n_stations - 1);
  std::discrete_distribution<int> pick_category(cfg.category_weights.begin(), cfg.category_weights.end());

  const auto n_days = static_cast<std::size_t>(
      std::chrono::ceil<std::chrono::days>(cfg.end - cfg.begin).count());
  auto sub_day = day_distribution(kSubscriberSeason, 1.0, 0.55, cfg.begin, n_days);
  auto cus_day = day_distribution(kCustomerSeason, 0.65, 1.6, cfg.begin, n_days);
  std::discrete_distribution<unsigned> sub_hour(kSubscriberHours.begin(), kSubscriberHours.end());
  std::discrete_distribution<unsigned> cus_hour(kCustomerHours.begin(), kCustomerHours.end());
  std::uniform_int_distribution<unsigned> minute(0, 59);
  std::normal_distribution<double> age(34.0, 10.0);
  std::lognormal_distribution<double> noise(0.0, 0.3);
  std::exponential_distribution<double> leisure(1.0 / 2400.0);

  const auto day0 = std::chrono::floor<std::chrono::days>(cfg.begin);
  out.trips.reserve(n_trips);
  for (std::size_t k = 0; k < n_trips; ++k) {
    TripRecord t;
    const int cat = pick_category(rng);
    const bool customer = cat == 0;
    auto day = customer ? cus_day(rng) : sub_day(rng);
    unsigned hour = customer ? cus_hour(rng) : sub_hour(rng);
    t.start_time = day0 + std::chrono::days{day} + std::chrono::hours{hour} +
                   std::chrono::minutes{minute(rng)};
    if (t.start_time < cfg.begin) t.start_time = cfg.begin;
    if (t.start_time >= cfg.end) t.start_time = cfg.end - std::chrono::minutes{1};
    const int trip_year = civil_fields(t.start_time).year;

    if (customer) {
      t.user = UserCategory::customer();
    } else {
      const Gender g = cat == 1 ? Gender::Male : cat == 2 ? Gender::Female : Gender::Unknown;
      std::optional<int> birth;
      if (unit(rng) < cfg.subscriber_birth_year_known) {
        const int a = static_cast<int>(std::clamp(std::round(age(rng)), 16.0, 80.0));
        birth = trip_year - a;
      }
      t.user = UserCategory::subscriber(g, birth);
    }

    const auto o = pick_origin(rng);
    std::size_t d = o;
    if (unit(rng) < cfg.preferred_share) {
      d = preferred[o][pick_rank(rng)];
    } else {
      d = pick_any(rng);
    }
    t.origin_station_id = stations[o].id;
    t.destination_station_id = stations[d].id;

    const double km = manhattan_km(stations[o], stations[d]);
    const double kmh = customer ? 9.0 : 12.5;
    double secs = (o == d ? 900.0 : 90.0 + km / kmh * 3600.0) * noise(rng);
    if (customer && unit(rng) < 0.15) secs += leisure(rng);
    if (!customer && unit(rng) < 0.02) secs += leisure(rng);
    t.duration_seconds = std::max<std::int64_t>(60, static_cast<std::int64_t>(std::llround(secs)));
    t.end_time = t.start_time + std::chrono::seconds{t.duration_seconds};
    out.trips.push_back(std::move(t));
  }
  std::stable_sort(out.trips.begin(), out.trips.end(),
                   [](const TripRecord& a, const TripRecord& b) { return a.start_time < b.start_time; });
  for (std::size_t k = 0; k < out.trips.size(); ++k) out.trips[k].trip_id = static_cast<TripId>(k + 1);
  return out;
}

}  // namespace tripforge
