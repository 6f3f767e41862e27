#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tkg {

/// A proleptic Gregorian calendar date stored as days since 1970-01-01.
class Date {
public:
    constexpr Date() = default;

    static Date from_ymd(int year, unsigned month, unsigned day);
    static Date from_days(std::int64_t days) {
        Date d;
        d.days_ = days;
        return d;
    }

    /// Parses `YYYY-MM-DD`; throws ParseError otherwise.
    static Date parse(std::string_view text);
    static std::optional<Date> try_parse(std::string_view text);

    std::int64_t days() const noexcept { return days_; }
    int year() const;
    unsigned month() const;
    unsigned day() const;

    std::string to_string() const;

    Date operator+(std::int64_t n) const { return from_days(days_ + n); }
    Date operator-(std::int64_t n) const { return from_days(days_ - n); }
    std::int64_t operator-(Date other) const { return days_ - other.days_; }

    auto operator<=>(const Date&) const = default;

private:
    std::int64_t days_ = 0;
};

/// Half-open date range [start, end).
struct DateInterval {
    Date start;
    Date end;

    bool empty() const { return end <= start; }
    std::int64_t length() const { return empty() ? 0 : end - start; }
    bool contains(Date d) const { return start <= d && d < end; }
    DateInterval intersect(const DateInterval& other) const;

    bool operator==(const DateInterval&) const = default;
};

/// A calendar month, ordered chronologically.
struct YearMonth {
    int year = 1970;
    unsigned month = 1;

    /// Parses `YYYY-MM`.
    static YearMonth parse(std::string_view text);
    static YearMonth of(Date d) { return {d.year(), d.month()}; }

    YearMonth next() const { return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1}; }
    std::string to_string() const;

    auto operator<=>(const YearMonth&) const = default;
};

}  // namespace tkg
