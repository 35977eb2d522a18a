#pragma once

#include <cstdint>
#include <string>

namespace arb {

// Calendar date, stored as days since 1970-01-01. Market-local; no timezone math.
struct Date {
    std::int64_t days = 0;

    friend auto operator<=>(const Date&, const Date&) = default;

    Date operator+(std::int64_t d) const { return Date{days + d}; }
    Date operator-(std::int64_t d) const { return Date{days - d}; }
    std::int64_t operator-(const Date& o) const { return days - o.days; }
    Date& operator++() { ++days; return *this; }
};

// Minute-resolution timestamp within the market-local calendar.
struct Timestamp {
    Date date;
    int minute_of_day = 0;  // 0..1439

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

Date make_date(int year, int month, int day);
void civil_from_date(Date d, int& year, int& month, int& day);

// Accepts "YYYY-MM-DD".
Date parse_date(const std::string& s);

// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS]", or the space-separated variant.
// Seconds must be zero when present.
Timestamp parse_timestamp(const std::string& s);

std::string format_date(Date d);
std::string format_timestamp(const Timestamp& ts);  // YYYY-MM-DDTHH:MM

}  // namespace arb
