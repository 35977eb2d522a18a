#include "arb/dates.hpp"

#include <cstdio>
#include <stdexcept>

namespace arb {

namespace {

// Howard Hinnant's civil date algorithms.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

int parse_int(const std::string& s, size_t pos, size_t len) {
    int v = 0;
    for (size_t i = pos; i < pos + len; ++i) {
        if (i >= s.size() || s[i] < '0' || s[i] > '9')
            throw std::invalid_argument("bad timestamp: '" + s + "'");
        v = v * 10 + (s[i] - '0');
    }
    return v;
}

}  // namespace

Date make_date(int year, int month, int day) {
    return Date{days_from_civil(year, month, day)};
}

void civil_from_date(Date d, int& year, int& month, int& day) {
    civil_from_days(d.days, year, month, day);
}

Date parse_date(const std::string& s) {
    if (s.size() < 10 || s[4] != '-' || s[7] != '-')
        throw std::invalid_argument("bad date: '" + s + "'");
    int y = parse_int(s, 0, 4);
    int m = parse_int(s, 5, 2);
    int d = parse_int(s, 8, 2);
    if (m < 1 || m > 12 || d < 1 || d > 31)
        throw std::invalid_argument("bad date: '" + s + "'");
    return make_date(y, m, d);
}

Timestamp parse_timestamp(const std::string& s) {
    Date date = parse_date(s);
    if (s.size() == 10) return Timestamp{date, 0};
    if (s.size() < 16 || (s[10] != 'T' && s[10] != ' ') || s[13] != ':')
        throw std::invalid_argument("bad timestamp: '" + s + "'");
    int hh = parse_int(s, 11, 2);
    int mm = parse_int(s, 14, 2);
    if (hh > 23 || mm > 59)
        throw std::invalid_argument("bad timestamp: '" + s + "'");
    if (s.size() > 16) {
        if (s.size() != 19 || s[16] != ':' || parse_int(s, 17, 2) != 0)
            throw std::invalid_argument("bad timestamp: '" + s + "'");
    }
    return Timestamp{date, hh * 60 + mm};
}

std::string format_date(Date d) {
    int y, m, dd;
    civil_from_date(d, y, m, dd);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, dd);
    return buf;
}

std::string format_timestamp(const Timestamp& ts) {
    char buf[24];
    std::string d = format_date(ts.date);
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d", d.c_str(),
                  ts.minute_of_day / 60, ts.minute_of_day % 60);
    return buf;
}

}  // namespace arb
