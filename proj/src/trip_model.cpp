#include "tripforge/trip_model.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace tripforge {

using namespace std::chrono;

Timestamp make_timestamp(int y, unsigned m, unsigned d, unsigned hh, unsigned mm, unsigned ss) {
  const sys_days day{year{y} / month{m} / std::chrono::day{d}};
  return day + hours{hh} + minutes{mm} + seconds{ss};
}

CivilFields civil_fields(Timestamp t) {
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  CivilFields f;
  f.year = static_cast<int>(ymd.year());
  f.month = static_cast<unsigned>(ymd.month());
  f.day = static_cast<unsigned>(ymd.day());
  f.hour = static_cast<unsigned>(hms.hours().count());
  f.minute = static_cast<unsigned>(hms.minutes().count());
  f.second = static_cast<unsigned>(hms.seconds().count());
  f.weekday = weekday{day}.c_encoding();
  return f;
}

std::int64_t to_epoch_seconds(Timestamp t) { return t.time_since_epoch().count(); }

Timestamp from_epoch_seconds(std::int64_t s) { return Timestamp{seconds{s}}; }

std::string to_iso_string(Timestamp t) {
  const auto f = civil_fields(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02u:%02u:%02u", f.year, f.month, f.day, f.hour,
                f.minute, f.second);
  return buf;
}

std::optional<Timestamp> parse_iso_timestamp(std::string_view s) {
  // YYYY-MM-DD[ HH:MM[:SS]] or with 'T' separator
  auto num = [&](std::size_t pos, std::size_t len, unsigned& out) {
    if (pos + len > s.size()) return false;
    auto r = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return r.ec == std::errc{} && r.ptr == s.data() + pos + len;
  };
  unsigned y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!num(0, 4, y) || !num(5, 2, mo) || !num(8, 2, d)) return std::nullopt;
  if (s.size() > 10) {
    if ((s[10] != ' ' && s[10] != 'T') || s.size() < 16 || s[13] != ':') return std::nullopt;
    if (!num(11, 2, h) || !num(14, 2, mi)) return std::nullopt;
    if (s.size() > 16) {
      if (s.size() != 19 || s[16] != ':' || !num(17, 2, sec)) return std::nullopt;
    }
  }
  const year_month_day ymd{year{static_cast<int>(y)} / month{mo} / day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 59) return std::nullopt;
  return make_timestamp(static_cast<int>(y), mo, d, h, mi, sec);
}

bool valid_coordinates(double lat, double lon) {
  return lat >= -90.0 && lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
}

bool StationRegistry::insert(Station station) {
  if (index_.contains(station.id)) return false;
  auto pos = std::lower_bound(stations_.begin(), stations_.end(), station.id,
                              [](const Station& s, StationId id) { return s.id < id; });
  const bool append = pos == stations_.end();
  stations_.insert(pos, std::move(station));
  if (append) {
    index_.emplace(stations_.back().id, stations_.size() - 1);
  } else {
    index_.clear();
    for (std::size_t i = 0; i < stations_.size(); ++i) index_.emplace(stations_[i].id, i);
  }
  return true;
}

const Station* StationRegistry::find(StationId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &stations_[it->second];
}

const Station& StationRegistry::at(StationId id) const {
  if (const auto* s = find(id)) return *s;
  throw std::out_of_range("unknown station id " + std::to_string(id));
}

AgeGroup age_group(const UserCategory& user, int reference_year) {
  if (!user.birth_year) return AgeGroup::Unknown;
  const int age = reference_year - *user.birth_year;
  if (age < 30) return AgeGroup::Young;
  if (age < 50) return AgeGroup::MidAged;
  return AgeGroup::Senior;
}

CategoryLabel category_label(const UserCategory& user) {
  if (user.kind == UserKind::Customer) return CategoryLabel::Customer;
  switch (user.gender) {
    case Gender::Male: return CategoryLabel::MaleSubscriber;
    case Gender::Female: return CategoryLabel::FemaleSubscriber;
    case Gender::Unknown: break;
  }
  return CategoryLabel::OtherSubscriber;
}

std::string_view to_string(UserKind k) {
  return k == UserKind::Customer ? "Customer" : "Subscriber";
}

std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::Male: return "Male";
    case Gender::Female: return "Female";
    case Gender::Unknown: break;
  }
  return "Unknown";
}

std::string_view to_string(AgeGroup g) {
  switch (g) {
    case AgeGroup::Young: return "young";
    case AgeGroup::MidAged: return "mid_aged";
    case AgeGroup::Senior: return "senior";
    case AgeGroup::Unknown: break;
  }
  return "unknown";
}

std::string_view to_string(CategoryLabel c) {
  switch (c) {
    case CategoryLabel::Customer: return "customer";
    case CategoryLabel::MaleSubscriber: return "male_subscriber";
    case CategoryLabel::FemaleSubscriber: return "female_subscriber";
    case CategoryLabel::OtherSubscriber: break;
  }
  return "other_subscriber";
}

}  // namespace tripforge
