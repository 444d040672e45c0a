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

#include "dmfi/domain.hpp"

namespace dmfi {

const char* to_string(Action a) {
    switch (a) {
        case Action::Logon: return "logon";
        case Action::Logoff: return "logoff";
        case Action::DeviceConnect: return "device_connect";
        case Action::DeviceDisconnect: return "device_disconnect";
        case Action::HttpVisit: return "http_visit";
        case Action::EmailSend: return "email_send";
        case Action::FileOpen: return "file_open";
        case Action::FileCopy: return "file_copy";
    }
    return "?";
}

std::optional<Action> action_from_string(const std::string& name) {
    static const struct {
        const char* name;
        Action action;
    } kTable[] = {
        {"logon", Action::Logon},
        {"logoff", Action::Logoff},
        {"device_connect", Action::DeviceConnect},
        {"device_disconnect", Action::DeviceDisconnect},
        {"http_visit", Action::HttpVisit},
        {"email_send", Action::EmailSend},
        {"file_open", Action::FileOpen},
        {"file_copy", Action::FileCopy},
    };
    for (const auto& entry : kTable)
        if (name == entry.name) return entry.action;
    return std::nullopt;
}

bool action_is_content_free(Action a) {
    switch (a) {
        case Action::Logon:
        case Action::Logoff:
        case Action::DeviceConnect:
        case Action::DeviceDisconnect:
            return true;
        default:
            return false;
    }
}

std::vector<std::string> validate_event(const EventRecord& e) {
    std::vector<std::string> violations;
    if (e.user.empty()) violations.push_back("user must be non-empty");
    if (e.device.empty()) violations.push_back("device must be non-empty");
    if (action_is_content_free(e.action) && !e.content.empty())
        violations.push_back(std::string("content must be empty for ") + to_string(e.action));
    return violations;
}

const char* to_string(Label l) { return l == Label::Normal ? "Normal" : "Abnormal"; }

std::optional<Label> label_from_string(const std::string& name) {
    if (name == "Normal" || name == "normal" || name == "0") return Label::Normal;
    if (name == "Abnormal" || name == "abnormal" || name == "1") return Label::Abnormal;
    return std::nullopt;
}

TimeSlice classify_work_time(Timestamp ts, const WorkCalendar& cal) {
    if (!cal.is_workday(weekday_of(date_of(ts)))) return TimeSlice::AfterHours;
    auto tod = time_of_day(ts);
    return (cal.work_start <= tod && tod < cal.work_end) ? TimeSlice::WorkingHours
                                                         : TimeSlice::AfterHours;
}

const char* time_slice_phrase(TimeSlice slice) {
    return slice == TimeSlice::WorkingHours ? "During working hours" : "After working hours";
}

}  // namespace dmfi
