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

#include <optional>
#include <string>
#include <vector>

#include "dmfi/time_util.hpp"

namespace dmfi {

/// Closed enumeration of audit actions. Unknown source activity strings are
/// rejected or mapped at ingest, never stored raw.
enum class Action {
    Logon,
    Logoff,
    DeviceConnect,
    DeviceDisconnect,
    HttpVisit,
    EmailSend,
    FileOpen,
    FileCopy,
};

const char* to_string(Action a);
std::optional<Action> action_from_string(const std::string& name);

/// True for actions that carry no text payload; their content field must be
/// empty.
bool action_is_content_free(Action a);

/// One parsed audit-log entry: the (timestamp, action, object, device,
/// content) event tuple. `object` holds the URL, filename or email
/// recipient list depending on the action; `content` the optional text
/// payload (email body, page text, file text).
struct EventRecord {
    Timestamp timestamp{};
    std::string user;
    Action action = Action::Logon;
    std::string object;
    std::string device;
    std::string content;

    bool operator==(const EventRecord&) const = default;
};

/// Returns every violated EventRecord invariant; empty means ok.
/// Violations are data, not failures.
std::vector<std::string> validate_event(const EventRecord& e);

enum class Label { Normal = 0, Abnormal = 1 };

const char* to_string(Label l);
std::optional<Label> label_from_string(const std::string& name);

/// All events of one user on one calendar day, the unit of labeling and
/// detection. Events are sorted ascending by timestamp, ties keep source
/// order. An absent label means unlabeled.
struct Session {
    std::string user;
    Date day{};
    std::vector<EventRecord> events;
    std::optional<Label> label;

    bool operator==(const Session&) const = default;
};

/// Working-hours window used for the When dimension. Defaults to
/// 08:00-18:00, Monday through Friday; the window is configurable because
/// no universal definition exists.
struct WorkCalendar {
    std::chrono::seconds work_start{std::chrono::hours{8}};
    std::chrono::seconds work_end{std::chrono::hours{18}};
    /// Bit i set = weekday with C encoding i (Sunday = 0) is a workday.
    std::uint8_t workday_mask = 0b0111110;

    bool is_workday(std::chrono::weekday wd) const {
        return (workday_mask >> wd.c_encoding()) & 1u;
    }
    bool valid() const { return work_start < work_end && workday_mask != 0; }
};

enum class TimeSlice { WorkingHours, AfterHours };

/// Total function: WorkingHours iff the instant falls on a workday with
/// work_start <= time-of-day < work_end, AfterHours otherwise.
TimeSlice classify_work_time(Timestamp ts, const WorkCalendar& cal);

/// Narrative vocabulary for the When dimension ("During working hours" /
/// "After working hours").
const char* time_slice_phrase(TimeSlice slice);

}  // namespace dmfi
