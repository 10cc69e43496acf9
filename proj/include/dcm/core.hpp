#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dcm {

inline constexpr int hours_per_day = 24;
inline constexpr int last_hour = hours_per_day - 1;

using DayArray = std::array<double, hours_per_day>;

// Errors -------------------------------------------------------------------

// Raised when a requested step would leave a resource outside its limits.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Calendar -----------------------------------------------------------------
//
// Plain day counter with month boundaries; every year has 365 days.

inline constexpr std::array<int, 12> month_lengths = {31, 28, 31, 30, 31, 30,
                                                      31, 31, 30, 31, 30, 31};
inline constexpr int days_per_year = 365;

struct Date {
  int year = 2020;
  int month = 1;  // 1-12
  int day = 1;    // 1-based

  friend auto operator<=>(const Date&, const Date&) = default;

  bool valid() const {
    return month >= 1 && month <= 12 && day >= 1 && day <= month_lengths[month - 1];
  }

  // 0-based day within the year.
  int day_of_year() const {
    int n = day - 1;
    for (int m = 1; m < month; ++m) n += month_lengths[m - 1];
    return n;
  }

  // Months since year 0; used as a ledger key.
  int month_key() const { return year * 12 + (month - 1); }

  Date next() const {
    Date d = *this;
    if (++d.day > month_lengths[d.month - 1]) {
      d.day = 1;
      if (++d.month > 12) {
        d.month = 1;
        ++d.year;
      }
    }
    return d;
  }

  static Date from_day_of_year(int year, int doy) {
    if (doy < 0 || doy >= days_per_year) throw std::out_of_range("day of year out of range");
    Date d{year, 1, 1};
    while (doy >= month_lengths[d.month - 1]) {
      doy -= month_lengths[d.month - 1];
      ++d.month;
    }
    d.day = doy + 1;
    return d;
  }

  std::string iso() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
  }

  // Parses YYYY-MM-DD; throws std::invalid_argument on anything else.
  static Date parse(std::string_view s) {
    Date d;
    int consumed = 0;
    std::string tmp(s);
    if (tmp.size() != 10 ||
        std::sscanf(tmp.c_str(), "%4d-%2d-%2d%n", &d.year, &d.month, &d.day, &consumed) != 3 ||
        consumed != 10 || !d.valid())
      throw std::invalid_argument("bad date '" + tmp + "' (expected YYYY-MM-DD)");
    return d;
  }
};

// Calendar timestamp at hour resolution, ISO-8601 "YYYY-MM-DDTHH:00", no zone.
struct Timestamp {
  Date date;
  int hour = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;

  Timestamp next() const {
    if (hour < last_hour) return {date, hour + 1};
    return {date.next(), 0};
  }

  // Hours since 0000-01-01T00 on the 365-day calendar.
  std::int64_t ordinal() const {
    return (static_cast<std::int64_t>(date.year) * days_per_year + date.day_of_year()) *
               hours_per_day +
           hour;
  }

  std::string iso() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "T%02d:00", hour);
    return date.iso() + buf;
  }

  static Timestamp parse(std::string_view s) {
    if (s.size() != 16 || s[10] != 'T' || s[13] != ':' || s[14] != '0' || s[15] != '0')
      throw std::invalid_argument("bad timestamp '" + std::string(s) +
                                  "' (expected YYYY-MM-DDTHH:00)");
    Timestamp t{Date::parse(s.substr(0, 10)), 0};
    const char h0 = s[11], h1 = s[12];
    if (h0 < '0' || h0 > '9' || h1 < '0' || h1 > '9')
      throw std::invalid_argument("bad hour in timestamp '" + std::string(s) + "'");
    t.hour = (h0 - '0') * 10 + (h1 - '0');
    if (t.hour > last_hour) throw std::invalid_argument("hour out of range in '" + std::string(s) + "'");
    return t;
  }
};

// HourlyProfile ------------------------------------------------------------

// Hourly series of MW (or degC) values starting at `start`.
class HourlyProfile {
 public:
  HourlyProfile() = default;

  explicit HourlyProfile(std::vector<double> values, Timestamp start = {})
      : values_(std::move(values)), start_(start) {
    if (values_.empty()) throw std::invalid_argument("HourlyProfile needs at least one value");
    for (double v : values_)
      if (!std::isfinite(v)) throw std::invalid_argument("HourlyProfile values must be finite");
  }

  static HourlyProfile from_day(const DayArray& a, Date date) {
    return HourlyProfile(std::vector<double>(a.begin(), a.end()), Timestamp{date, 0});
  }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const Timestamp& start() const { return start_; }
  std::span<const double> values() const { return values_; }

  double operator[](std::size_t abs_hour) const { return values_[abs_hour]; }
  double at(std::size_t abs_hour) const { return values_.at(abs_hour); }

  // `day` counts from the profile's first day; the profile is assumed to start at hour 0.
  double at(std::size_t day, int hour) const {
    return values_.at(day * hours_per_day + static_cast<std::size_t>(hour) -
                      static_cast<std::size_t>(start_.hour));
  }

  std::size_t day_count() const { return (values_.size() + start_.hour) / hours_per_day; }

  HourlyProfile day(std::size_t d) const {
    if (start_.hour != 0) throw std::invalid_argument("day slicing needs a midnight-aligned profile");
    const std::size_t first = d * hours_per_day;
    if (first + hours_per_day > values_.size()) throw std::out_of_range("day out of range");
    Date date = start_.date;
    for (std::size_t i = 0; i < d; ++i) date = date.next();
    return HourlyProfile(std::vector<double>(values_.begin() + first,
                                             values_.begin() + first + hours_per_day),
                         Timestamp{date, 0});
  }

  DayArray to_day_array() const {
    if (values_.size() != hours_per_day) throw std::invalid_argument("profile is not a single day");
    DayArray a{};
    std::copy(values_.begin(), values_.end(), a.begin());
    return a;
  }

  double max() const { return *std::max_element(values_.begin(), values_.end()); }

  // Earliest index of the maximum.
  std::size_t argmax() const {
    return static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) -
                                    values_.begin());
  }

  friend bool operator==(const HourlyProfile&, const HourlyProfile&) = default;

 private:
  std::vector<double> values_;
  Timestamp start_{};
};

// TargetHourSet ------------------------------------------------------------

class TargetHourSet {
 public:
  TargetHourSet() = default;

  // `hours` must be sorted, unique, within 0..23. When `payback_hour_appended`
  // the last entry is the extra payback hour.
  TargetHourSet(std::vector<int> hours, bool horizonal, bool payback_hour_appended = false,
                bool payback_clipped = false)
      : hours_(std::move(hours)),
        horizonal_(horizonal),
        payback_(payback_hour_appended),
        clipped_(payback_clipped) {
    for (std::size_t i = 0; i < hours_.size(); ++i) {
      if (hours_[i] < 0 || hours_[i] > last_hour)
        throw std::invalid_argument("target hour out of range 0..23");
      if (i > 0 && hours_[i] <= hours_[i - 1])
        throw std::invalid_argument("target hours must be strictly ascending");
      if (horizonal_ && i > 0 && hours_[i] != hours_[i - 1] + 1)
        throw std::invalid_argument("horizon target hours must be consecutive");
    }
    if (payback_ && hours_.size() < 2)
      throw std::invalid_argument("payback hour needs at least one deployment hour");
  }

  const std::vector<int>& hours() const { return hours_; }
  std::size_t size() const { return hours_.size(); }
  bool empty() const { return hours_.empty(); }
  bool horizonal() const { return horizonal_; }
  bool payback_hour_appended() const { return payback_; }
  // The span ended at 23 so the requested payback hour fell off the day.
  bool payback_clipped() const { return clipped_; }

  // Hours eligible for categorical deployment (the appended payback hour excluded).
  std::vector<int> deployable() const {
    if (!payback_) return hours_;
    return {hours_.begin(), hours_.end() - 1};
  }

  bool contains(int hour) const { return std::binary_search(hours_.begin(), hours_.end(), hour); }

  friend bool operator==(const TargetHourSet&, const TargetHourSet&) = default;

 private:
  std::vector<int> hours_;
  bool horizonal_ = false;
  bool payback_ = false;
  bool clipped_ = false;
};

// DayContext ---------------------------------------------------------------

struct DayContext {
  Date date;
  HourlyProfile forecast_load;  // MW, day-ahead forecast
  HourlyProfile actual_load;    // MW
  HourlyProfile temperature;    // degC, forecast used for planning
  double peak_day_probability = 0.0;
  std::vector<double> peak_hour_probabilities = std::vector<double>(hours_per_day, 0.0);
};

struct Violation {
  std::string field;
  std::string rule;
  friend bool operator==(const Violation&, const Violation&) = default;
};

inline std::vector<Violation> validate_day_context(const DayContext& ctx) {
  std::vector<Violation> out;
  auto check_profile = [&](const HourlyProfile& p, const char* field, bool is_load) {
    if (p.size() != hours_per_day) {
      out.push_back({field, "length must be 24"});
      return;
    }
    for (double v : p.values()) {
      if (!std::isfinite(v)) {
        out.push_back({field, "values must be finite"});
        return;
      }
      if (is_load && v < 0.0) {
        out.push_back({field, "load values must be >= 0"});
        return;
      }
    }
  };
  if (!ctx.date.valid()) out.push_back({"date", "must be a valid calendar date"});
  check_profile(ctx.forecast_load, "forecast_load", true);
  check_profile(ctx.actual_load, "actual_load", true);
  check_profile(ctx.temperature, "temperature", false);

  const double pd = ctx.peak_day_probability;
  if (!(pd >= 0.0 && pd <= 1.0)) out.push_back({"peak_day_probability", "must be in [0,1]"});

  const auto& ph = ctx.peak_hour_probabilities;
  if (ph.size() != hours_per_day) {
    out.push_back({"peak_hour_probabilities", "length must be 24"});
  } else {
    bool in_range = true;
    for (double p : ph) in_range = in_range && p >= 0.0 && p <= 1.0;
    if (!in_range) out.push_back({"peak_hour_probabilities", "entries must be in [0,1]"});
    else if (std::accumulate(ph.begin(), ph.end(), 0.0) > 1.0 + 1e-9)
      out.push_back({"peak_hour_probabilities", "entries must sum to <= 1"});
  }
  return out;
}

// Top-x selection ----------------------------------------------------------

// The x hours with the largest values, ties broken toward the earlier hour.
inline TargetHourSet top_x_hours(std::span<const double> values, int x) {
  if (values.size() != hours_per_day) throw std::invalid_argument("top_x_hours needs 24 values");
  if (x < 1 || x > hours_per_day) throw std::invalid_argument("x must be in 1..24");
  std::array<int, hours_per_day> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] > values[b]; });
  std::vector<int> hours(order.begin(), order.begin() + x);
  std::sort(hours.begin(), hours.end());
  return TargetHourSet(std::move(hours), false);
}

// Option matrices ----------------------------------------------------------

// One on/off pattern over the targeted hours (entry j belongs to hours[j]).
using OptionColumn = std::vector<std::uint8_t>;

struct OptionMatrix {
  std::vector<int> hours;  // deployable targeted hours
  std::vector<OptionColumn> columns;

  std::size_t option_count() const { return columns.size(); }

  std::size_t zero_column_index() const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (std::all_of(columns[i].begin(), columns[i].end(), [](auto b) { return b == 0; }))
        return i;
    throw std::logic_error("option matrix has no all-zero column");
  }
};

// Checks the column-length, distinctness and single-zero-column rules.
inline bool well_formed(const OptionMatrix& m) {
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < m.columns.size(); ++i) {
    const auto& c = m.columns[i];
    if (c.size() != m.hours.size()) return false;
    if (std::all_of(c.begin(), c.end(), [](auto b) { return b == 0; })) ++zeros;
    for (std::size_t j = 0; j < i; ++j)
      if (m.columns[j] == c) return false;
  }
  return zeros == 1;
}

// Places a column on the 24-hour clock; untargeted hours are off.
inline std::array<bool, hours_per_day> embed(const OptionColumn& column, std::span<const int> hours) {
  if (column.size() != hours.size()) throw std::invalid_argument("column/hour dimension mismatch");
  std::array<bool, hours_per_day> day{};
  for (std::size_t j = 0; j < hours.size(); ++j) day[hours[j]] = column[j] != 0;
  return day;
}

struct Run {
  int first;
  int last;  // inclusive
  int length() const { return last - first + 1; }
};

// Maximal consecutive on-runs of a day pattern.
inline std::vector<Run> on_runs(const std::array<bool, hours_per_day>& day) {
  std::vector<Run> runs;
  for (int h = 0; h < hours_per_day; ++h) {
    if (!day[h]) continue;
    if (!runs.empty() && runs.back().last == h - 1) runs.back().last = h;
    else runs.push_back({h, h});
  }
  return runs;
}

// All subsets of `hours` accepted by `feasible`, most-on first; ties ordered
// so the earliest hour switched on comes first. The all-zero option is last.
template <typename Predicate>
OptionMatrix enumerate_options(std::span<const int> hours, Predicate&& feasible) {
  const std::size_t n = hours.size();
  if (n == 0) throw std::invalid_argument("empty target hour set");
  if (n > hours_per_day) throw std::invalid_argument("too many target hours");
  OptionMatrix m;
  m.hours.assign(hours.begin(), hours.end());
  const std::uint32_t count = 1u << n;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    OptionColumn c(n);
    for (std::size_t j = 0; j < n; ++j) c[j] = (mask >> (n - 1 - j)) & 1u;
    if (feasible(embed(c, hours))) m.columns.push_back(std::move(c));
  }
  std::stable_sort(m.columns.begin(), m.columns.end(), [](const auto& a, const auto& b) {
    const auto pa = std::count(a.begin(), a.end(), 1);
    const auto pb = std::count(b.begin(), b.end(), 1);
    if (pa != pb) return pa > pb;
    return a > b;
  });
  return m;
}

inline int count_on(const OptionColumn& c) {
  return static_cast<int>(std::count(c.begin(), c.end(), 1));
}

}  // namespace dcm
