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

#include "dmfi/views.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "dmfi/errors.hpp"

namespace dmfi::views {

namespace {

std::string modal_device(const std::vector<BehavioralEvent>& events) {
    std::map<std::string, std::size_t> counts;
    for (const auto& e : events) counts[e.device]++;
    std::string best;
    std::size_t best_count = 0;
    for (const auto& [device, count] : counts) {
        if (count > best_count) {  // map order makes ties lexicographic
            best = device;
            best_count = count;
        }
    }
    return best;
}

struct RenderState {
    const NarrativeContext& ctx;
    std::string self_pc;  // resolved primary device for the session's user

    std::string where_phrase(const std::string& device) const {
        if (device == self_pc) return "Self-PC";
        return "Shared-PC " + device;
    }

    std::string normalized_object(const BehavioralEvent& e) const {
        switch (e.action) {
            case Action::HttpVisit: return normalize_url(e.object);
            case Action::EmailSend: return classify_recipients(e.object, ctx.corporate_domain);
            case Action::FileOpen:
            case Action::FileCopy: return normalize_filename(e.object);
            default: return {};
        }
    }
};

std::string resolve_self_pc(const std::vector<BehavioralEvent>& events,
                            const NarrativeContext& ctx) {
    if (ctx.profile) {
        if (auto primary = ctx.profile->primary_device(ctx.user)) return *primary;
    }
    return modal_device(events);
}

/// Per-event sentence, the uncompressed vocabulary:
///   "During working hours, login at Self-PC."
///   "After working hours, at Self-PC, opened file (.doc)."
std::string per_event_sentence(const BehavioralEvent& e, const RenderState& st) {
    std::string when = time_slice_phrase(classify_work_time(e.timestamp, st.ctx.calendar));
    std::string where = st.where_phrase(e.device);
    if (e.action == Action::Logon) return when + ", login at " + where + ".";

    std::string phrase;
    switch (e.action) {
        case Action::Logoff: phrase = "logoff"; break;
        case Action::DeviceConnect: phrase = "connected external device"; break;
        case Action::DeviceDisconnect: phrase = "disconnected external device"; break;
        case Action::HttpVisit: {
            std::string obj = st.normalized_object(e);
            phrase = obj.empty() ? "accessed website" : "accessed website " + obj;
            break;
        }
        case Action::EmailSend: {
            std::string obj = st.normalized_object(e);
            phrase = obj.empty() ? "sent email" : "sent email " + obj;
            break;
        }
        case Action::FileOpen: phrase = "opened file " + st.normalized_object(e); break;
        case Action::FileCopy: phrase = "copied file " + st.normalized_object(e); break;
        case Action::Logon: break;  // handled above
    }
    return when + ", at " + where + ", " + phrase + ".";
}

/// A maximal run of consecutive events sharing one action kind.
struct ActionRun {
    Action action;
    std::vector<std::string> objects;  // deduped normalized objects, first-seen order
    std::size_t event_count = 0;
};

std::string join_objects(const std::vector<std::string>& objects) {
    std::string out;
    for (std::size_t i = 0; i < objects.size(); ++i) {
        if (i) out += ", ";
        out += objects[i];
    }
    return out;
}

std::string clause_for_run(const ActionRun& run, const RenderState& st,
                           const std::string& where) {
    switch (run.action) {
        case Action::Logon: return "login at " + where;
        case Action::Logoff: return "logged off";
        case Action::DeviceConnect: return "connected external device";
        case Action::DeviceDisconnect: return "disconnected external device";
        case Action::HttpVisit:
            if (run.objects.size() >= 2)
                return "accessed multiple websites (" + join_objects(run.objects) + ")";
            return run.objects.empty() ? "accessed website"
                                       : "accessed website " + run.objects.front();
        case Action::EmailSend:
            // Email repetition is itself a signal, so plurality follows the
            // event count even when recipient classifications collapse.
            if (run.event_count >= 2)
                return "sent multiple emails (" + join_objects(run.objects) + ")";
            return run.objects.empty() ? "sent email" : "sent email " + run.objects.front();
        case Action::FileOpen:
            if (run.objects.size() >= 2)
                return "opened multiple files (" + join_objects(run.objects) + ")";
            return "opened file " + (run.objects.empty() ? "(file)" : run.objects.front());
        case Action::FileCopy:
            if (run.objects.size() >= 2)
                return "copied multiple files (" + join_objects(run.objects) + ")";
            return "copied file " + (run.objects.empty() ? "(file)" : run.objects.front());
    }
    return {};
}

/// Clause joiners reproduce the narrative cadence: two clauses join with
/// ", and then"; three or more use ", then" between inner clauses and
/// ", and" before the last.
std::string join_clauses(const std::vector<std::string>& clauses) {
    if (clauses.size() == 1) return clauses.front();
    std::string out = clauses.front();
    for (std::size_t i = 1; i < clauses.size(); ++i) {
        if (i + 1 == clauses.size())
            out += clauses.size() == 2 ? ", and then " : ", and ";
        else
            out += ", then ";
        out += clauses[i];
    }
    return out;
}

struct Group {
    TimeSlice slice;
    std::string device;
    std::vector<const BehavioralEvent*> events;
};

std::vector<Group> group_events(const std::vector<BehavioralEvent>& events,
                                const WorkCalendar& cal) {
    std::vector<Group> groups;
    for (const auto& e : events) {
        TimeSlice slice = classify_work_time(e.timestamp, cal);
        if (groups.empty() || groups.back().slice != slice || groups.back().device != e.device) {
            groups.push_back({slice, e.device, {}});
        }
        groups.back().events.push_back(&e);
    }
    return groups;
}

Narrative finalize(std::vector<std::string> sentences, std::size_t event_count) {
    Narrative n;
    n.sentences = std::move(sentences);
    n.source_event_count = event_count;
    n.token_count = count_whitespace_tokens(n.joined());
    return n;
}

}  // namespace

std::string Narrative::joined() const {
    std::string out;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (i) out += ' ';
        out += sentences[i];
    }
    return out;
}

std::optional<std::string> DeviceProfile::primary_device(const std::string& user) const {
    auto it = primary_.find(user);
    if (it == primary_.end()) return std::nullopt;
    return it->second;
}

DeviceProfile build_device_profile(const std::vector<Session>& training_sessions) {
    std::map<std::string, std::map<std::string, std::size_t>> counts;
    for (const auto& s : training_sessions)
        for (const auto& e : s.events) counts[s.user][e.device]++;

    DeviceProfile profile;
    for (const auto& [user, devices] : counts) {
        std::string best;
        std::size_t best_count = 0;
        for (const auto& [device, count] : devices) {
            if (count > best_count) {
                best = device;
                best_count = count;
            }
        }
        profile.set(user, best);
    }
    return profile;
}

std::vector<ContentEntry> semantic_view(const Session& s) {
    std::vector<ContentEntry> entries;
    for (std::size_t i = 0; i < s.events.size(); ++i) {
        const auto& e = s.events[i];
        if (e.content.empty()) continue;
        ContentKind kind = ContentKind::File;
        if (e.action == Action::EmailSend)
            kind = ContentKind::Email;
        else if (e.action == Action::HttpVisit)
            kind = ContentKind::Http;
        entries.push_back({i, kind, e.content});
    }
    return entries;
}

std::vector<BehavioralEvent> behavioral_view(const Session& s) {
    std::vector<BehavioralEvent> out;
    out.reserve(s.events.size());
    for (const auto& e : s.events) out.push_back({e.timestamp, e.action, e.object, e.device});
    return out;
}

Narrative abstract_4w(const std::vector<BehavioralEvent>& events, const NarrativeContext& ctx) {
    if (events.empty()) return {};
    RenderState st{ctx, resolve_self_pc(events, ctx)};
    auto groups = group_events(events, ctx.calendar);

    std::vector<std::string> sentences;
    sentences.reserve(groups.size());
    const std::string* previous_device = nullptr;
    for (const auto& group : groups) {
        if (group.events.size() == 1) {
            sentences.push_back(per_event_sentence(*group.events.front(), st));
            previous_device = &group.device;
            continue;
        }

        std::vector<ActionRun> runs;
        for (const auto* e : group.events) {
            if (runs.empty() || runs.back().action != e->action)
                runs.push_back({e->action, {}, 0});
            auto& run = runs.back();
            run.event_count++;
            std::string obj = st.normalized_object(*e);
            if (!obj.empty() &&
                std::find(run.objects.begin(), run.objects.end(), obj) == run.objects.end())
                run.objects.push_back(obj);
        }

        std::string where = st.where_phrase(group.device);
        bool where_in_logon = std::any_of(runs.begin(), runs.end(), [](const ActionRun& r) {
            return r.action == Action::Logon;
        });
        bool device_changed = previous_device == nullptr || *previous_device != group.device;

        std::vector<std::string> clauses;
        clauses.reserve(runs.size());
        for (const auto& run : runs) clauses.push_back(clause_for_run(run, st, where));

        std::string sentence = std::string(time_slice_phrase(group.slice)) + ", ";
        if (!where_in_logon && device_changed) sentence += "at " + where + ", ";
        sentence += join_clauses(clauses) + ".";
        sentences.push_back(std::move(sentence));
        previous_device = &group.device;
    }
    return finalize(std::move(sentences), events.size());
}

Narrative render_per_event(const std::vector<BehavioralEvent>& events,
                           const NarrativeContext& ctx) {
    if (events.empty()) return {};
    RenderState st{ctx, resolve_self_pc(events, ctx)};
    std::vector<std::string> sentences;
    sentences.reserve(events.size());
    for (const auto& e : events) sentences.push_back(per_event_sentence(e, st));
    return finalize(std::move(sentences), events.size());
}

double compression_ratio(const Narrative& original, const Narrative& compressed) {
    if (original.token_count == 0)
        throw DataError("compression_ratio: original narrative has zero tokens");
    return 1.0 - double(compressed.token_count) / double(original.token_count);
}

std::string normalize_url(const std::string& url) {
    std::string host = url;
    if (auto pos = host.find("://"); pos != std::string::npos) host = host.substr(pos + 3);
    if (auto pos = host.find('/'); pos != std::string::npos) host = host.substr(0, pos);
    if (auto pos = host.find(':'); pos != std::string::npos) host = host.substr(0, pos);
    if (host.rfind("www.", 0) == 0) host = host.substr(4);
    // Registrable-domain heuristic: keep the last two labels.
    std::size_t dots = std::size_t(std::count(host.begin(), host.end(), '.'));
    while (dots >= 2) {
        host = host.substr(host.find('.') + 1);
        --dots;
    }
    return host;
}

std::string normalize_filename(const std::string& filename) {
    std::string base = filename;
    if (auto pos = base.find_last_of("/\\"); pos != std::string::npos) base = base.substr(pos + 1);
    auto dot = base.find_last_of('.');
    if (dot == std::string::npos || dot + 1 == base.size()) return "(file)";
    return "(." + base.substr(dot + 1) + ")";
}

std::string classify_recipients(const std::string& recipients,
                                const std::string& corporate_domain) {
    if (recipients.empty()) return {};
    bool any_outsider = false;
    std::string current;
    auto flush = [&](const std::string& addr) {
        auto at = addr.find('@');
        if (at == std::string::npos) return;
        std::string domain = addr.substr(at + 1);
        while (!domain.empty() && (domain.back() == ' ' || domain.back() == '>'))
            domain.pop_back();
        if (domain != corporate_domain) any_outsider = true;
    };
    for (char c : recipients) {
        if (c == ';' || c == ',') {
            flush(current);
            current.clear();
        } else if (c != ' ') {
            current.push_back(c);
        }
    }
    flush(current);
    return any_outsider ? "from insider address to outsider address" : "to insider address";
}

std::size_t count_whitespace_tokens(const std::string& text) {
    std::istringstream in(text);
    std::string token;
    std::size_t count = 0;
    while (in >> token) ++count;
    return count;
}

}  // namespace dmfi::views
