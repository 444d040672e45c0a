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
#include <optional>
#include <string>
#include <vector>

#include "dmfi/domain.hpp"
#include "dmfi/ingest.hpp"
#include "dmfi/views.hpp"

namespace dmfi::prompts {

/// DMFI-A scores with one model trained on mixed data; DMFI-B scores with
/// an abnormal-branch / normal-branch model pair and a sigmoid margin.
enum class Strategy { DmfiA, DmfiB };

enum class Modality { Semantic, Behavioral };

const char* to_string(Strategy s);
const char* to_string(Modality m);
std::optional<Strategy> strategy_from_string(const std::string& name);
std::optional<Modality> modality_from_string(const std::string& name);

/// Fixed instruction templates. Prompt construction must use these
/// byte-exactly; SFT consumers and the scoring endpoint see the same text.
const std::string& semantic_instruction();
const std::string& behavioral_instruction();

struct PromptRecord {
    Modality modality = Modality::Semantic;
    std::string instruction;
    std::string input;
    std::optional<std::string> expected_output;

    bool operator==(const PromptRecord&) const = default;
};

/// Instruction prompt for one content entry.
PromptRecord semantic_prompt(const views::ContentEntry& entry);

/// Instruction prompt for a narrative; sentences join with single spaces.
/// Throws DataError on an empty narrative.
PromptRecord behavioral_prompt(const views::Narrative& narrative);

/// Renders the canonical output line, e.g.
/// `Anomaly Score = 0.9, Prediction = "Abnormal"`.
std::string render_output(double score, Label label);

struct ParsedResponse {
    double score = 0.0;  // clamped to [0,1]
    Label prediction = Label::Normal;
    std::optional<std::string> explanation;
    bool score_inferred = false;       // prediction present, score missing
    bool prediction_inferred = false;  // score present, prediction missing
};

/// Tolerant response grammar: case-insensitive keys, ':' or '=', optional
/// quotes, score clamped to [0,1], first match wins; trailing free text is
/// captured as the explanation. A score without a prediction infers the
/// label at threshold 0.5 (flagged); a prediction without a score infers
/// 0.0/1.0 (flagged). Throws DataError when neither is parseable.
ParsedResponse parse_model_response(const std::string& text);

/// Strict template conformance: `Anomaly Score = <num>, Prediction =
/// "Normal"|"Abnormal"` with an optional trailing explanation. Throws
/// DataError on any deviation.
ParsedResponse parse_model_response_strict(const std::string& text);

struct SftOptions {
    /// Soft numeric targets written into SFT outputs; 0/1 would teach
    /// degenerate text patterns.
    double normal_target = 0.1;
    double abnormal_target = 0.9;
    std::uint64_t shuffle_seed = 0;
};

struct SftExportReport {
    std::vector<std::string> files;
    std::size_t records = 0;
    std::size_t skipped_unlabeled = 0;
};

/// Writes instruction/input/output JSONL for external fine-tuning.
/// Semantic modality emits one record per content entry (inheriting the
/// session label); behavioral modality one record per session. DmfiA
/// writes a single seeded-shuffled mixed file at `path`; DmfiB writes the
/// normal-only and abnormal-only pair (`*.norm.jsonl` / `*.abn.jsonl`).
/// Unlabeled sessions are skipped and counted. Byte-deterministic.
SftExportReport export_sft(const ingest::LabeledCorpus& corpus, Strategy strategy,
                           Modality modality, const std::string& path, const SftOptions& options,
                           const WorkCalendar& calendar, const views::DeviceProfile& profile,
                           const std::string& corporate_domain);

}  // namespace dmfi::prompts
