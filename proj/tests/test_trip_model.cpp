#include <doctest.h>

#include <stdexcept>

#include "tripforge/trip_model.hpp"

using namespace tripforge;

TEST_CASE("age_group boundaries") {
  auto sub = [](int by) { return UserCategory::subscriber(Gender::Male, by); };
  CHECK(age_group(sub(1990), 2014) == AgeGroup::Young);
  CHECK(age_group(sub(1984), 2014) == AgeGroup::MidAged);
  CHECK(age_group(UserCategory::subscriber(Gender::Female, std::nullopt), 2014) == AgeGroup::Unknown);
  CHECK(age_group(UserCategory::customer(), 2014) == AgeGroup::Unknown);

  // reference - birth in {29, 30, 49, 50}
  for (int ref = 1900; ref <= 2100; ref += 7) {
    CHECK(age_group(sub(ref - 29), ref) == AgeGroup::Young);
    CHECK(age_group(sub(ref - 30), ref) == AgeGroup::MidAged);
    CHECK(age_group(sub(ref - 49), ref) == AgeGroup::MidAged);
    CHECK(age_group(sub(ref - 50), ref) == AgeGroup::Senior);
  }
}

TEST_CASE("category_label") {
  CHECK(category_label(UserCategory::subscriber(Gender::Male, 1980)) == CategoryLabel::MaleSubscriber);
  CHECK(category_label(UserCategory::subscriber(Gender::Female, 1980)) == CategoryLabel::FemaleSubscriber);
  CHECK(category_label(UserCategory::customer()) == CategoryLabel::Customer);
  CHECK(category_label(UserCategory::subscriber(Gender::Unknown, std::nullopt)) ==
        CategoryLabel::OtherSubscriber);
}

TEST_CASE("civil time helpers") {
  const auto t = make_timestamp(2014, 7, 20, 13, 45, 10);
  const auto c = civil_fields(t);
  CHECK(c.year == 2014);
  CHECK(c.month == 7);
  CHECK(c.day == 20);
  CHECK(c.hour == 13);
  CHECK(c.minute == 45);
  CHECK(c.second == 10);
  CHECK(c.weekday == 0);  // Sunday
  CHECK(to_iso_string(t) == "2014-07-20 13:45:10");
  CHECK(parse_iso_timestamp("2014-07-20 13:45:10") == t);
  CHECK(parse_iso_timestamp("2014-07-20") == make_timestamp(2014, 7, 20));
  CHECK_FALSE(parse_iso_timestamp("2014-02-30 00:00").has_value());
  CHECK_FALSE(parse_iso_timestamp("2014/07/20").has_value());
  CHECK(from_epoch_seconds(to_epoch_seconds(t)) == t);
}

TEST_CASE("station registry") {
  StationRegistry reg;
  CHECK(reg.insert({5, "five", 41.9, -87.6, 10}));
  CHECK(reg.insert({2, "two", 41.8, -87.7, 15}));
  CHECK_FALSE(reg.insert({5, "dup", 0, 0, 0}));
  CHECK(reg.size() == 2);
  CHECK(reg.stations()[0].id == 2);
  CHECK(reg.at(5).name == "five");
  CHECK(reg.find(7) == nullptr);
  CHECK_THROWS_AS(reg.at(7), std::out_of_range);
  CHECK(valid_coordinates(90, -180));
  CHECK_FALSE(valid_coordinates(90.1, 0));
}

TEST_CASE("station pair is ordered") {
  CHECK(StationPair{1, 2} != StationPair{2, 1});
  CHECK(StationPair{3, 3} == StationPair{3, 3});
}
