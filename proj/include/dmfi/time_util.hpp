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

#pragma once

#include <chrono>
#include <string>

namespace dmfi {

/// All instants live in one configured frame (default UTC) at second
/// precision. Source logs with naive local times are shifted into this
/// frame at ingest via a fixed minute offset.
using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

/// Parses "YYYY-MM-DDTHH:MM:SSZ" or "YYYY-MM-DDTHH:MM:SS+hh:mm".
/// Throws DataError on malformed input. The canonical form written back
/// out is always the Z form, so Z-form inputs round-trip byte-exactly.
Timestamp parse_rfc3339(const std::string& text);

/// Canonical RFC 3339 rendering, always UTC "Z", second precision.
std::string format_rfc3339(Timestamp ts);

/// Parses the "MM/DD/YYYY HH:MM:SS" stamps used by CERT-style sources.
/// `utc_offset_minutes` shifts the naive local time into the configured
/// frame (stored = local - offset).
Timestamp parse_cert_timestamp(const std::string& text, int utc_offset_minutes = 0);

/// Parses "YYYY-MM-DD". Throws DataError on malformed input.
Date parse_iso_date(const std::string& text);
std::string format_iso_date(Date d);

inline Date date_of(Timestamp ts) { return std::chrono::floor<std::chrono::days>(ts); }

inline std::chrono::seconds time_of_day(Timestamp ts) { return ts - date_of(ts); }

inline std::chrono::weekday weekday_of(Date d) { return std::chrono::weekday{d}; }

/// Parses "HH:MM" into seconds since midnight.
std::chrono::seconds parse_time_of_day(const std::string& text);
std::string format_time_of_day(std::chrono::seconds s);

}  // namespace dmfi
