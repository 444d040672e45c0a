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

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dmfi/domain.hpp"

namespace dmfi::ingest {

/// (user, day) key identifying one session.
using SessionKey = std::pair<std::string, Date>;

/// Adapter description for one CERT-style source CSV. column_map maps
/// source column names onto event fields ("timestamp", "user", "device",
/// "object", "content"); action_map maps source activity strings onto
/// actions and must cover every observed string or parsing fails loudly.
struct SourceMapping {
    std::string source_kind;  // logon | device | http | email | file | unified
    std::map<std::string, std::string> column_map;
    std::map<std::string, Action> action_map;
    /// Source column holding the activity string; empty means every row
    /// gets `fixed_action`.
    std::string activity_column;
    std::optional<Action> fixed_action;
    /// Minutes to shift naive source-local times into the configured frame.
    int utc_offset_minutes = 0;
};

/// Built-in mappings for the stock CERT r4.2-style layouts of logon.csv,
/// device.csv, http.csv, email.csv and file.csv.
SourceMapping default_mapping(const std::string& source_kind);

/// Loads a SourceMapping from its JSON form (see README for the schema).
SourceMapping parse_mapping_json(const std::string& json_text);

/// Train/test split and benign undersampling parameters.
struct SplitSpec {
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
    std::size_t benign_cap = 20000;
    /// Target benign:abnormal ratio; with the default 8:2 the benign
    /// target is 4x the abnormal count.
    unsigned ratio_benign = 8;
    unsigned ratio_abnormal = 2;

    bool valid() const {
        return train_fraction > 0.0 && train_fraction < 1.0 && benign_cap > 0 &&
               ratio_benign > 0 && ratio_abnormal > 0;
    }
};

/// A set of labeled sessions plus the abnormal key index.
struct LabeledCorpus {
    std::vector<Session> sessions;
    std::string provenance;
    std::set<SessionKey> abnormal_index;

    std::size_t count(Label l) const;
    std::set<std::string> users() const;
};

/// Unified event CSV: header `timestamp,user,action,object,device,content`,
/// RFC 4180 quoting, UTF-8, LF line endings. Row order is preserved.
/// Malformed rows and unknown actions raise DataError with the line number.
std::vector<EventRecord> parse_unified_csv(std::istream& in);
void write_unified_csv(std::ostream& out, const std::vector<EventRecord>& events);

/// Parses one CERT-style source CSV through `mapping`. Content is only
/// populated for sources that map a content column (http/email/file).
std::vector<EventRecord> parse_cert_source(std::istream& in, const SourceMapping& mapping);

/// Abnormal session keys file: CSV `user,date` with ISO dates, one key per
/// row. A leading `user,date` header row is written and tolerated on read.
std::set<SessionKey> read_labels_csv(std::istream& in);
void write_labels_csv(std::ostream& out, const std::set<SessionKey>& keys);

/// Groups validated events into one session per distinct (user, day),
/// sorted ascending by timestamp with ties keeping source order. A session
/// is labeled Abnormal iff its key is in `abnormal`. Output sessions are
/// ordered by (user, day).
std::vector<Session> build_sessions(const std::vector<EventRecord>& events,
                                    const std::set<SessionKey>& abnormal);

/// Partitions users (not sessions) by a seeded shuffle; the first
/// ceil(train_fraction * |users|) users go to train, and every session
/// follows its user. Throws DataError when either side would be empty.
std::pair<LabeledCorpus, LabeledCorpus> split_train_test(const LabeledCorpus& corpus,
                                                         const SplitSpec& spec);

/// Keeps every abnormal session and downsamples benign sessions (seeded,
/// without replacement) to min(benign_cap, ratio * |abnormal|). Session
/// order is preserved.
LabeledCorpus undersample(const LabeledCorpus& train, const SplitSpec& spec, std::uint64_t seed);

}  // namespace dmfi::ingest
