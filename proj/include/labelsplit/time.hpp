#ifndef LABELSPLIT_TIME_HPP
#define LABELSPLIT_TIME_HPP

#include "labelsplit/errors.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace labelsplit {

/// Absolute instant, UTC, millisecond resolution.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
/// Wall-clock time in some (unspecified) zone.
using LocalTime = std::chrono::local_time<std::chrono::milliseconds>;
/// Offset from local midnight, in [0, 24h).
using TimeOfDay = std::chrono::milliseconds;

namespace detail {

inline std::mutex& libc_tz_mutex() {
    static std::mutex m;
    return m;
}

// glibc has no reentrant per-zone conversion, so TZ is swapped under a lock.
inline long libc_utc_offset_seconds(const std::string& zone, std::time_t t) {
    std::lock_guard lock(libc_tz_mutex());
    std::optional<std::string> saved;
    if (const char* old = std::getenv("TZ")) saved = old;
    ::setenv("TZ", zone.c_str(), 1);
    ::tzset();
    std::tm out{};
    ::localtime_r(&t, &out);
    if (saved)
        ::setenv("TZ", saved->c_str(), 1);
    else
        ::unsetenv("TZ");
    ::tzset();
    return out.tm_gmtoff;
}

inline bool parse_uint(std::string_view s, int& out) {
    if (s.empty()) return false;
    int v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    return true;
}

// "+HH:MM", "-HHMM", "+HH"
inline std::optional<std::chrono::minutes> parse_offset(std::string_view s) {
    if (s.empty() || (s[0] != '+' && s[0] != '-')) return std::nullopt;
    const int sign = s[0] == '-' ? -1 : 1;
    s.remove_prefix(1);
    int h = 0, m = 0;
    if (s.size() == 2) {
        if (!parse_uint(s, h)) return std::nullopt;
    } else if (s.size() == 4) {
        if (!parse_uint(s.substr(0, 2), h) || !parse_uint(s.substr(2, 2), m)) return std::nullopt;
    } else if (s.size() == 5 && s[2] == ':') {
        if (!parse_uint(s.substr(0, 2), h) || !parse_uint(s.substr(3, 2), m)) return std::nullopt;
    } else {
        return std::nullopt;
    }
    if (h > 23 || m > 59) return std::nullopt;
    return std::chrono::minutes{sign * (h * 60 + m)};
}

} // namespace detail

/// A timezone: UTC, a fixed offset, or an IANA zone name resolved through the system tz database.
class TimeZone {
public:
    TimeZone() : name_("UTC"), fixed_(std::chrono::minutes{0}) {}

    static TimeZone utc() { return TimeZone{}; }

    static TimeZone fixed(std::chrono::minutes offset) {
        TimeZone tz;
        tz.fixed_ = offset;
        const auto total = offset.count();
        const long a = total < 0 ? -total : total;
        char buf[48];
        std::snprintf(buf, sizeof buf, "%c%02ld:%02ld", total < 0 ? '-' : '+', a / 60, a % 60);
        tz.name_ = buf;
        return tz;
    }

    /// Accepts "UTC", "Z", "+01:00", "UTC-05:00" or an IANA name such as "Europe/Amsterdam".
    static TimeZone parse(std::string_view spec) {
        if (spec.empty() || spec == "UTC" || spec == "Z" || spec == "utc") return utc();
        std::string_view off = spec;
        if (off.substr(0, 3) == "UTC" || off.substr(0, 3) == "GMT") off.remove_prefix(3);
        if (auto m = detail::parse_offset(off)) return fixed(*m);

        std::string name(spec);
        if (name.find("..") != std::string::npos || name.front() == '/')
            throw ConfigError("invalid timezone '" + name + "'");
        const char* dir = std::getenv("TZDIR");
        const std::filesystem::path root = dir ? dir : "/usr/share/zoneinfo";
        std::error_code ec;
        if (!std::filesystem::is_regular_file(root / name, ec))
            throw ConfigError("unknown timezone '" + name + "'");
        TimeZone tz;
        tz.name_ = std::move(name);
        tz.fixed_.reset();
        return tz;
    }

    const std::string& name() const noexcept { return name_; }
    bool is_fixed() const noexcept { return fixed_.has_value(); }

    std::chrono::seconds offset_at(Timestamp t) const {
        if (fixed_) return *fixed_;
        const auto secs = std::chrono::floor<std::chrono::seconds>(t).time_since_epoch().count();
        return std::chrono::seconds{detail::libc_utc_offset_seconds(name_, static_cast<std::time_t>(secs))};
    }

    LocalTime to_local(Timestamp t) const {
        return LocalTime{t.time_since_epoch() + offset_at(t)};
    }

    /// Ambiguous or skipped wall times (DST transitions) resolve to the offset in force just after.
    Timestamp to_utc(LocalTime local) const {
        if (fixed_) return Timestamp{local.time_since_epoch() - *fixed_};
        const Timestamp guess{local.time_since_epoch() - offset_at(Timestamp{local.time_since_epoch()})};
        return Timestamp{local.time_since_epoch() - offset_at(guess)};
    }

    friend bool operator==(const TimeZone& a, const TimeZone& b) {
        return a.name_ == b.name_ && a.fixed_ == b.fixed_;
    }

private:
    std::string name_;
    std::optional<std::chrono::minutes> fixed_;
};

/// Calendar day (midnight to midnight) of `t` in `tz`.
inline std::chrono::local_days local_day(Timestamp t, const TimeZone& tz) {
    return std::chrono::floor<std::chrono::days>(tz.to_local(t));
}

inline TimeOfDay time_of_day(Timestamp t, const TimeZone& tz) {
    const LocalTime local = tz.to_local(t);
    return local - std::chrono::floor<std::chrono::days>(local);
}

inline std::string format_date(std::chrono::local_days day) {
    const std::chrono::year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

/// "HH:MM:SS", with ".mmm" appended only when the milliseconds are nonzero.
inline std::string format_time_of_day(TimeOfDay tod) {
    const auto ms = tod.count();
    char buf[32];
    const long long h = ms / 3'600'000, m = ms / 60'000 % 60, s = ms / 1000 % 60, frac = ms % 1000;
    if (frac == 0)
        std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", h, m, s);
    else
        std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld.%03lld", h, m, s, frac);
    return buf;
}

/// Parses "HH:MM" or "HH:MM:SS".
inline TimeOfDay parse_time_of_day(std::string_view s) {
    int h = 0, m = 0, sec = 0;
    const bool ok = (s.size() == 5 && s[2] == ':' && detail::parse_uint(s.substr(0, 2), h) &&
                     detail::parse_uint(s.substr(3, 2), m)) ||
                    (s.size() == 8 && s[2] == ':' && s[5] == ':' && detail::parse_uint(s.substr(0, 2), h) &&
                     detail::parse_uint(s.substr(3, 2), m) && detail::parse_uint(s.substr(6, 2), sec));
    if (!ok || h > 23 || m > 59 || sec > 59)
        throw ParseError("invalid time of day '" + std::string(s) + "' (expected HH:MM or HH:MM:SS)");
    return std::chrono::hours{h} + std::chrono::minutes{m} + std::chrono::seconds{sec};
}

inline std::string format_iso8601(Timestamp t) {
    const auto day = std::chrono::floor<std::chrono::days>(t);
    return format_date(std::chrono::local_days{day.time_since_epoch()}) + "T" +
           format_time_of_day(t - day) + "Z";
}

namespace detail {

inline std::optional<LocalTime> make_local(int y, int mo, int d, int h, int mi, int s, int ms) {
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
    return local_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms};
}

// YYYY-MM-DD[(T| )HH:MM[:SS[.fff...]]][Z|±HH[:MM]]
inline std::optional<Timestamp> parse_iso8601(std::string_view s, const TimeZone& tz) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, ms = 0;
    if (s.size() < 10 || s[4] != '-' || s[7] != '-' || !parse_uint(s.substr(0, 4), y) ||
        !parse_uint(s.substr(5, 2), mo) || !parse_uint(s.substr(8, 2), d))
        return std::nullopt;
    std::string_view rest = s.substr(10);
    if (!rest.empty() && (rest[0] == 'T' || rest[0] == ' ')) {
        rest.remove_prefix(1);
        if (rest.size() < 5 || rest[2] != ':' || !parse_uint(rest.substr(0, 2), h) ||
            !parse_uint(rest.substr(3, 2), mi))
            return std::nullopt;
        rest.remove_prefix(5);
        if (!rest.empty() && rest[0] == ':') {
            if (rest.size() < 3 || !parse_uint(rest.substr(1, 2), sec)) return std::nullopt;
            rest.remove_prefix(3);
            if (!rest.empty() && (rest[0] == '.' || rest[0] == ',')) {
                rest.remove_prefix(1);
                std::size_t n = 0;
                int scale = 100;
                while (n < rest.size() && rest[n] >= '0' && rest[n] <= '9') {
                    ms += (rest[n] - '0') * scale;
                    scale /= 10;
                    ++n;
                }
                if (n == 0) return std::nullopt;
                rest.remove_prefix(n);
            }
        }
    }
    const auto local = make_local(y, mo, d, h, mi, sec, ms);
    if (!local) return std::nullopt;
    if (rest.empty()) return tz.to_utc(*local);
    if (rest == "Z" || rest == "z") return Timestamp{local->time_since_epoch()};
    if (auto off = parse_offset(rest)) return Timestamp{local->time_since_epoch() - *off};
    return std::nullopt;
}

inline std::optional<Timestamp> parse_strptime(const std::string& s, const std::string& format,
                                               const TimeZone& tz) {
    std::tm tm{};
    tm.tm_mday = 1;
    const char* end = ::strptime(s.c_str(), format.c_str(), &tm);
    if (end == nullptr) return std::nullopt;
    while (*end == ' ' || *end == '\t') ++end;
    if (*end != '\0') return std::nullopt;
    const auto local = make_local(tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min,
                                  tm.tm_sec, 0);
    if (!local) return std::nullopt;
    if (format.find("%z") != std::string::npos)
        return Timestamp{local->time_since_epoch() - std::chrono::seconds{tm.tm_gmtoff}};
    return tz.to_utc(*local);
}

} // namespace detail

inline constexpr std::string_view kIsoFormat = "iso8601";

/// Parses a timestamp. `format` is "iso8601" or a strptime(3) pattern; times without an explicit
/// offset are interpreted as wall-clock time in `tz`.
inline Timestamp parse_timestamp(std::string_view text, std::string_view format = kIsoFormat,
                                 const TimeZone& tz = TimeZone::utc()) {
    std::string_view trimmed = text;
    while (!trimmed.empty() && (trimmed.front() == ' ' || trimmed.front() == '\t')) trimmed.remove_prefix(1);
    while (!trimmed.empty() && (trimmed.back() == ' ' || trimmed.back() == '\t' || trimmed.back() == '\r'))
        trimmed.remove_suffix(1);
    const auto parsed = format == kIsoFormat ? detail::parse_iso8601(trimmed, tz)
                                             : detail::parse_strptime(std::string(trimmed), std::string(format), tz);
    if (!parsed) throw ParseError("unparseable timestamp '" + std::string(text) + "'");
    return *parsed;
}

} // namespace labelsplit

#endif // LABELSPLIT_TIME_HPP
