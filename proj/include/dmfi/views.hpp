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
#include <unordered_map>
#include <vector>

#include "dmfi/domain.hpp"

namespace dmfi::views {

enum class ContentKind { Email, Http, File };

/// One content-bearing entry of a session's semantic view.
struct ContentEntry {
    std::size_t event_index = 0;  // position in the session's event list
    ContentKind kind = ContentKind::Http;
    std::string text;  // non-empty
};

/// An event with its content stripped: the behavioral view keeps only
/// (timestamp, action, object, device).
struct BehavioralEvent {
    Timestamp timestamp{};
    Action action = Action::Logon;
    std::string object;
    std::string device;
};

/// The natural-language behavior summary fed to the behavioral scorer.
/// token_count is the whitespace-token total of the rendered text.
struct Narrative {
    std::vector<std::string> sentences;
    std::size_t token_count = 0;
    std::size_t source_event_count = 0;

    std::string joined() const;  // sentences joined by single spaces
};

/// Per-user primary device ("Self-PC"), the mode of the device field over
/// that user's training events. Ties resolve to the lexicographically
/// smallest device id.
class DeviceProfile {
public:
    void set(const std::string& user, const std::string& device) { primary_[user] = device; }
    std::optional<std::string> primary_device(const std::string& user) const;
    const std::unordered_map<std::string, std::string>& map() const { return primary_; }

private:
    std::unordered_map<std::string, std::string> primary_;
};

DeviceProfile build_device_profile(const std::vector<Session>& training_sessions);

/// Everything sentence rendering needs besides the events themselves.
/// `profile` may be null; users absent from the profile fall back to the
/// session's most frequent device as their Self-PC.
struct NarrativeContext {
    WorkCalendar calendar;
    const DeviceProfile* profile = nullptr;
    std::string user;
    std::string corporate_domain = "dtaa.com";
};

/// Entries for exactly the session's events with non-empty content, in
/// session order.
std::vector<ContentEntry> semantic_view(const Session& s);

/// One BehavioralEvent per session event, same order, content dropped.
std::vector<BehavioralEvent> behavioral_view(const Session& s);

/// Compresses a behavioral sequence into narrative sentences. Events are
/// segmented into maximal consecutive runs sharing the working-hours
/// classification, each run further split into maximal runs sharing the
/// device; one sentence is rendered per (time-slice, device) group with
/// consecutive same-action events merged into a single clause. Groups of a
/// single event render with the uncompressed per-event template, so
/// compression is the identity on singletons.
Narrative abstract_4w(const std::vector<BehavioralEvent>& events, const NarrativeContext& ctx);

/// Uncompressed baseline: one sentence per event with the same phrase
/// vocabulary and no merging. Used for compression metrics.
Narrative render_per_event(const std::vector<BehavioralEvent>& events,
                           const NarrativeContext& ctx);

/// 1 - compressed/original token ratio. Throws DataError when the original
/// has zero tokens.
double compression_ratio(const Narrative& original, const Narrative& compressed);

/// Object normalization used for the Which dimension; exposed for tests.
/// URLs reduce to a registrable domain ("http://www.a.com/x" -> "a.com"),
/// filenames to their extension ("report.doc" -> "(.doc)"), recipient
/// lists to an insider/outsider classification against the corporate
/// domain.
std::string normalize_url(const std::string& url);
std::string normalize_filename(const std::string& filename);
std::string classify_recipients(const std::string& recipients,
                                const std::string& corporate_domain);

std::size_t count_whitespace_tokens(const std::string& text);

}  // namespace dmfi::views
