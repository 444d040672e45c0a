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

#include "dmfi/ingest.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "dmfi/csv.hpp"
#include "dmfi/errors.hpp"
#include "dmfi/rng.hpp"

namespace dmfi::ingest {

namespace {

const std::vector<std::string> kUnifiedHeader = {"timestamp", "user",   "action",
                                                 "object",    "device", "content"};

std::string join_header(const std::vector<std::string>& h) {
    std::string out;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (i) out += ',';
        out += h[i];
    }
    return out;
}

}  // namespace

std::size_t LabeledCorpus::count(Label l) const {
    std::size_t n = 0;
    for (const auto& s : sessions)
        if (s.label == l) ++n;
    return n;
}

std::set<std::string> LabeledCorpus::users() const {
    std::set<std::string> out;
    for (const auto& s : sessions) out.insert(s.user);
    return out;
}

std::vector<EventRecord> parse_unified_csv(std::istream& in) {
    csv::Reader reader(in);
    csv::Record rec;
    if (!reader.next(rec)) throw DataError("empty input: missing unified CSV header");
    if (rec.fields != kUnifiedHeader)
        throw DataError("bad unified CSV header, expected '" + join_header(kUnifiedHeader) + "'");

    std::vector<EventRecord> events;
    while (reader.next(rec)) {
        if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;  // trailing blank line
        if (rec.fields.size() != 6)
            throw DataError("expected 6 fields, got " + std::to_string(rec.fields.size()) +
                            " at line " + std::to_string(rec.line));
        EventRecord e;
        try {
            e.timestamp = parse_rfc3339(rec.fields[0]);
        } catch (const DataError& err) {
            throw DataError(std::string(err.what()) + " at line " + std::to_string(rec.line));
        }
        e.user = rec.fields[1];
        auto action = action_from_string(rec.fields[2]);
        if (!action)
            throw DataError("unknown action '" + rec.fields[2] + "' at line " +
                            std::to_string(rec.line));
        e.action = *action;
        e.object = rec.fields[3];
        e.device = rec.fields[4];
        e.content = rec.fields[5];
        auto violations = validate_event(e);
        if (!violations.empty())
            throw DataError("invalid event at line " + std::to_string(rec.line) + ": " +
                            violations.front());
        events.push_back(std::move(e));
    }
    return events;
}

void write_unified_csv(std::ostream& out, const std::vector<EventRecord>& events) {
    csv::Writer writer(out);
    writer.write_record(kUnifiedHeader);
    for (const auto& e : events)
        writer.write_record({format_rfc3339(e.timestamp), e.user, to_string(e.action), e.object,
                             e.device, e.content});
}

SourceMapping default_mapping(const std::string& source_kind) {
    SourceMapping m;
    m.source_kind = source_kind;
    if (source_kind == "logon") {
        m.column_map = {{"date", "timestamp"}, {"user", "user"}, {"pc", "device"}};
        m.activity_column = "activity";
        m.action_map = {{"Logon", Action::Logon}, {"Logoff", Action::Logoff}};
    } else if (source_kind == "device") {
        m.column_map = {{"date", "timestamp"}, {"user", "user"}, {"pc", "device"}};
        m.activity_column = "activity";
        m.action_map = {{"Connect", Action::DeviceConnect},
                        {"Disconnect", Action::DeviceDisconnect}};
    } else if (source_kind == "http") {
        m.column_map = {{"date", "timestamp"},
                        {"user", "user"},
                        {"pc", "device"},
                        {"url", "object"},
                        {"content", "content"}};
        m.fixed_action = Action::HttpVisit;
    } else if (source_kind == "email") {
        m.column_map = {{"date", "timestamp"},
                        {"user", "user"},
                        {"pc", "device"},
                        {"to", "object"},
                        {"content", "content"}};
        m.fixed_action = Action::EmailSend;
    } else if (source_kind == "file") {
        m.column_map = {{"date", "timestamp"},
                        {"user", "user"},
                        {"pc", "device"},
                        {"filename", "object"},
                        {"content", "content"}};
        m.fixed_action = Action::FileOpen;
    } else {
        throw DataError("unknown source kind '" + source_kind + "'");
    }
    return m;
}

SourceMapping parse_mapping_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad mapping JSON: ") + e.what());
    }
    SourceMapping m;
    m.source_kind = j.value("source_kind", std::string{});
    if (j.contains("column_map"))
        for (auto& [k, v] : j.at("column_map").items()) m.column_map[k] = v.get<std::string>();
    if (j.contains("action_map")) {
        for (auto& [k, v] : j.at("action_map").items()) {
            auto a = action_from_string(v.get<std::string>());
            if (!a) throw DataError("mapping JSON: unknown action '" + v.get<std::string>() + "'");
            m.action_map[k] = *a;
        }
    }
    m.activity_column = j.value("activity_column", std::string{});
    if (j.contains("fixed_action")) {
        auto a = action_from_string(j.at("fixed_action").get<std::string>());
        if (!a)
            throw DataError("mapping JSON: unknown action '" +
                            j.at("fixed_action").get<std::string>() + "'");
        m.fixed_action = *a;
    }
    m.utc_offset_minutes = j.value("utc_offset_minutes", 0);

    // column_map values name event fields; timestamp/user/device are mandatory.
    for (const char* field : {"timestamp", "user", "device"}) {
        bool covered = false;
        for (const auto& [col, ev] : m.column_map)
            if (ev == field) covered = true;
        if (!covered) throw DataError(std::string("mapping JSON: no column mapped to ") + field);
    }
    return m;
}

std::vector<EventRecord> parse_cert_source(std::istream& in, const SourceMapping& mapping) {
    csv::Reader reader(in);
    csv::Record rec;
    if (!reader.next(rec))
        throw DataError("empty input: missing header for source '" + mapping.source_kind + "'");

    // Resolve column indices once from the header row.
    std::map<std::string, std::size_t> index;  // event field -> column index
    std::size_t activity_index = SIZE_MAX;
    for (std::size_t i = 0; i < rec.fields.size(); ++i) {
        auto it = mapping.column_map.find(rec.fields[i]);
        if (it != mapping.column_map.end()) index[it->second] = i;
        if (!mapping.activity_column.empty() && rec.fields[i] == mapping.activity_column)
            activity_index = i;
    }
    for (const char* field : {"timestamp", "user", "device"})
        if (!index.count(field))
            throw DataError("source '" + mapping.source_kind + "': missing mapped column for " +
                            field);
    if (!mapping.activity_column.empty() && activity_index == SIZE_MAX && !mapping.fixed_action)
        throw DataError("source '" + mapping.source_kind + "': missing activity column '" +
                        mapping.activity_column + "'");

    std::vector<EventRecord> events;
    while (reader.next(rec)) {
        if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;
        auto get = [&](const char* field) -> std::string {
            auto it = index.find(field);
            if (it == index.end() || it->second >= rec.fields.size()) return {};
            return rec.fields[it->second];
        };
        EventRecord e;
        try {
            e.timestamp = parse_cert_timestamp(get("timestamp"), mapping.utc_offset_minutes);
        } catch (const DataError& err) {
            throw DataError(std::string(err.what()) + " at line " + std::to_string(rec.line));
        }
        e.user = get("user");
        e.device = get("device");
        e.object = get("object");
        e.content = get("content");

        if (activity_index != SIZE_MAX && activity_index < rec.fields.size()) {
            const std::string& activity = rec.fields[activity_index];
            auto it = mapping.action_map.find(activity);
            if (it == mapping.action_map.end())
                throw DataError("source '" + mapping.source_kind + "': unmapped activity '" +
                                activity + "' at line " + std::to_string(rec.line));
            e.action = it->second;
        } else if (mapping.fixed_action) {
            e.action = *mapping.fixed_action;
        } else {
            throw DataError("source '" + mapping.source_kind +
                            "': no activity column and no fixed action");
        }
        if (action_is_content_free(e.action)) e.content.clear();
        events.push_back(std::move(e));
    }
    return events;
}

std::set<SessionKey> read_labels_csv(std::istream& in) {
    csv::Reader reader(in);
    csv::Record rec;
    std::set<SessionKey> keys;
    bool first = true;
    while (reader.next(rec)) {
        if (rec.fields.size() == 1 && rec.fields[0].empty()) continue;
        if (first && rec.fields == std::vector<std::string>{"user", "date"}) {
            first = false;
            continue;
        }
        first = false;
        if (rec.fields.size() != 2)
            throw DataError("labels CSV: expected 2 fields at line " + std::to_string(rec.line));
        try {
            keys.emplace(rec.fields[0], parse_iso_date(rec.fields[1]));
        } catch (const DataError& err) {
            throw DataError(std::string(err.what()) + " at line " + std::to_string(rec.line));
        }
    }
    return keys;
}

void write_labels_csv(std::ostream& out, const std::set<SessionKey>& keys) {
    csv::Writer writer(out);
    writer.write_record({"user", "date"});
    for (const auto& [user, day] : keys) writer.write_record({user, format_iso_date(day)});
}

std::vector<Session> build_sessions(const std::vector<EventRecord>& events,
                                    const std::set<SessionKey>& abnormal) {
    std::map<SessionKey, std::vector<EventRecord>> buckets;
    for (const auto& e : events) buckets[{e.user, date_of(e.timestamp)}].push_back(e);

    std::vector<Session> sessions;
    sessions.reserve(buckets.size());
    for (auto& [key, bucket] : buckets) {
        std::stable_sort(bucket.begin(), bucket.end(),
                         [](const EventRecord& a, const EventRecord& b) {
                             return a.timestamp < b.timestamp;
                         });
        Session s;
        s.user = key.first;
        s.day = key.second;
        s.events = std::move(bucket);
        s.label = abnormal.count(key) ? Label::Abnormal : Label::Normal;
        sessions.push_back(std::move(s));
    }
    return sessions;
}

std::pair<LabeledCorpus, LabeledCorpus> split_train_test(const LabeledCorpus& corpus,
                                                         const SplitSpec& spec) {
    if (!spec.valid()) throw UsageError("invalid split spec");
    auto user_set = corpus.users();
    if (user_set.size() < 2) throw DataError("cannot split without user overlap: need >= 2 users");

    std::vector<std::string> users(user_set.begin(), user_set.end());
    Rng rng(spec.seed);
    rng.shuffle(users);

    auto train_count = std::size_t(std::ceil(spec.train_fraction * double(users.size())));
    if (train_count == 0) throw DataError("cannot split: train side empty");
    if (train_count >= users.size()) throw DataError("cannot split: test side empty");

    std::set<std::string> train_users(users.begin(), users.begin() + std::ptrdiff_t(train_count));

    LabeledCorpus train, test;
    train.provenance = corpus.provenance + " [train]";
    test.provenance = corpus.provenance + " [test]";
    for (const auto& s : corpus.sessions) {
        auto& side = train_users.count(s.user) ? train : test;
        side.sessions.push_back(s);
        if (s.label == Label::Abnormal) side.abnormal_index.insert({s.user, s.day});
    }
    return {std::move(train), std::move(test)};
}

LabeledCorpus undersample(const LabeledCorpus& train, const SplitSpec& spec, std::uint64_t seed) {
    std::vector<std::size_t> benign_indices;
    std::size_t abnormal_count = 0;
    for (std::size_t i = 0; i < train.sessions.size(); ++i) {
        if (train.sessions[i].label == Label::Abnormal)
            ++abnormal_count;
        else
            benign_indices.push_back(i);
    }

    std::size_t ratio_target = abnormal_count * spec.ratio_benign / spec.ratio_abnormal;
    std::size_t target = std::min(spec.benign_cap, ratio_target);
    if (benign_indices.size() > target) {
        Rng rng(seed);
        rng.shuffle(benign_indices);
        benign_indices.resize(target);
        std::sort(benign_indices.begin(), benign_indices.end());
    }

    std::set<std::size_t> keep_benign(benign_indices.begin(), benign_indices.end());
    LabeledCorpus out;
    out.provenance = train.provenance + " [undersampled]";
    for (std::size_t i = 0; i < train.sessions.size(); ++i) {
        const auto& s = train.sessions[i];
        if (s.label == Label::Abnormal || keep_benign.count(i)) {
            out.sessions.push_back(s);
            if (s.label == Label::Abnormal) out.abnormal_index.insert({s.user, s.day});
        }
    }
    return out;
}

}  // namespace dmfi::ingest
