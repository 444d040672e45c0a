// Copyright 2026 The DMFI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dmfi/time_util.hpp"

#include <cstdio>

#include "dmfi/errors.hpp"

namespace dmfi {

namespace {

using namespace std::chrono;

Timestamp make_timestamp(int y, int mo, int d, int h, int mi, int s, const std::string& src) {
    year_month_day ymd{year{y}, month{unsigned(mo)}, day{unsigned(d)}};
    if (!ymd.ok()) throw DataError("invalid calendar date in timestamp '" + src + "'");
    if (h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60)
        throw DataError("invalid time of day in timestamp '" + src + "'");
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

}  // namespace

Timestamp parse_rfc3339(const std::string& text) {
    int y, mo, d, h, mi, s;
    char sep;
    int n = 0;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2d%c%2d:%2d:%2d%n", &y, &mo, &d, &sep, &h, &mi, &s,
                    &n) != 7 ||
        (sep != 'T' && sep != 't' && sep != ' '))
        throw DataError("malformed timestamp '" + text + "'");
    Timestamp ts = make_timestamp(y, mo, d, h, mi, s, text);
    std::string rest = text.substr(size_t(n));
    if (rest == "Z" || rest == "z") return ts;
    int oh, om;
    char sign;
    if (std::sscanf(rest.c_str(), "%c%2d:%2d", &sign, &oh, &om) == 3 &&
        (sign == '+' || sign == '-')) {
        auto offset = hours{oh} + minutes{om};
        return sign == '+' ? ts - offset : ts + offset;
    }
    throw DataError("malformed timestamp offset '" + text + "'");
}

std::string format_rfc3339(Timestamp ts) {
    using namespace std::chrono;
    year_month_day ymd{date_of(ts)};
    hh_mm_ss tod{time_of_day(ts)};
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()), long(tod.hours().count()),
                  long(tod.minutes().count()), long(tod.seconds().count()));
    return buf;
}

Timestamp parse_cert_timestamp(const std::string& text, int utc_offset_minutes) {
    int mo, d, y, h, mi, s;
    if (std::sscanf(text.c_str(), "%2d/%2d/%4d %2d:%2d:%2d", &mo, &d, &y, &h, &mi, &s) != 6)
        throw DataError("malformed source timestamp '" + text + "'");
    Timestamp ts = make_timestamp(y, mo, d, h, mi, s, text);
    return ts - std::chrono::minutes{utc_offset_minutes};
}

Date parse_iso_date(const std::string& text) {
    int y, mo, d;
    char trailing;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2d%c", &y, &mo, &d, &trailing) != 3)
        throw DataError("malformed date '" + text + "'");
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(mo)},
                                    std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) throw DataError("invalid calendar date '" + text + "'");
    return std::chrono::sys_days{ymd};
}

std::string format_iso_date(Date d) {
    std::chrono::year_month_day ymd{d};
    char buf[12];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

std::chrono::seconds parse_time_of_day(const std::string& text) {
    int h, mi;
    if (std::sscanf(text.c_str(), "%2d:%2d", &h, &mi) != 2 || h < 0 || h > 24 || mi < 0 || mi > 59)
        throw DataError("malformed time of day '" + text + "'");
    return std::chrono::hours{h} + std::chrono::minutes{mi};
}

std::string format_time_of_day(std::chrono::seconds s) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02ld:%02ld", long(s.count() / 3600),
                  long((s.count() % 3600) / 60));
    return buf;
}

}  // namespace dmfi
