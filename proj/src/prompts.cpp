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

#include "dmfi/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <regex>

#include <nlohmann/json.hpp>

#include "dmfi/errors.hpp"
#include "dmfi/rng.hpp"

namespace dmfi::prompts {

namespace {

std::string format_score(double score) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", score);
    return buf;
}

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return s;
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

std::string trim_explanation(std::string_view tail) {
    std::size_t begin = 0;
    while (begin < tail.size() &&
           (std::isspace(static_cast<unsigned char>(tail[begin])) || tail[begin] == '.' ||
            tail[begin] == ',' || tail[begin] == ';' || tail[begin] == ':' ||
            tail[begin] == '"' || tail[begin] == '\'' || tail[begin] == '`'))
        ++begin;
    std::size_t end = tail.size();
    while (end > begin && std::isspace(static_cast<unsigned char>(tail[end - 1]))) --end;
    return std::string(tail.substr(begin, end - begin));
}

}  // namespace

const char* to_string(Strategy s) { return s == Strategy::DmfiA ? "DMFI_A" : "DMFI_B"; }
const char* to_string(Modality m) { return m == Modality::Semantic ? "semantic" : "behavioral"; }

std::optional<Strategy> strategy_from_string(const std::string& name) {
    std::string n = lowercase(name);
    if (n == "dmfi_a" || n == "dmfi-a" || n == "a") return Strategy::DmfiA;
    if (n == "dmfi_b" || n == "dmfi-b" || n == "b") return Strategy::DmfiB;
    return std::nullopt;
}

std::optional<Modality> modality_from_string(const std::string& name) {
    std::string n = lowercase(name);
    if (n == "semantic") return Modality::Semantic;
    if (n == "behavioral") return Modality::Behavioral;
    return std::nullopt;
}

const std::string& semantic_instruction() {
    static const std::string kInstruction =
        "Please analyze the following content (email or HTTP message) and determine whether it "
        "is semantically abnormal. Respond with both an anomaly score and a classification "
        "result.";
    return kInstruction;
}

const std::string& behavioral_instruction() {
    static const std::string kInstruction =
        "Please analyze the following behavior sequence. Respond with both an anomaly score and "
        "a classification result (\"Normal\" or \"Abnormal\").";
    return kInstruction;
}

PromptRecord semantic_prompt(const views::ContentEntry& entry) {
    return PromptRecord{Modality::Semantic, semantic_instruction(), entry.text, std::nullopt};
}

PromptRecord behavioral_prompt(const views::Narrative& narrative) {
    if (narrative.sentences.empty()) throw DataError("empty behavior input");
    return PromptRecord{Modality::Behavioral, behavioral_instruction(), narrative.joined(),
                        std::nullopt};
}

std::string render_output(double score, Label label) {
    return "Anomaly Score = " + format_score(score) + ", Prediction = \"" +
           std::string(to_string(label)) + "\"";
}

ParsedResponse parse_model_response(const std::string& text) {
    static const std::regex kScoreRe(
        R"(\b(?:anomaly[ _-]?)?score\b\s*[:=]?\s*"?\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))",
        std::regex::icase);
    static const std::regex kPredictionRe(R"(\bprediction\b\s*[:=]?\s*[`'" ]*([A-Za-z]+))",
                                          std::regex::icase);

    std::smatch score_match, pred_match;
    bool has_score = std::regex_search(text, score_match, kScoreRe);
    bool has_pred = false;
    std::optional<Label> pred;
    if (std::regex_search(text, pred_match, kPredictionRe)) {
        pred = label_from_string(lowercase(pred_match[1].str()));
        has_pred = pred.has_value();
    }
    if (!has_score && !has_pred) throw DataError("unparseable response: '" + text + "'");

    ParsedResponse out;
    if (has_score) out.score = clamp01(std::stod(score_match[1].str()));
    if (has_pred) {
        out.prediction = *pred;
        if (!has_score) {
            out.score = out.prediction == Label::Abnormal ? 1.0 : 0.0;
            out.score_inferred = true;
        }
    } else {
        out.prediction = out.score >= 0.5 ? Label::Abnormal : Label::Normal;
        out.prediction_inferred = true;
    }

    // The explanation is whatever trails the last matched construct.
    std::size_t tail_begin = 0;
    if (has_score)
        tail_begin = std::size_t(score_match.position(0) + score_match.length(0));
    if (has_pred)
        tail_begin =
            std::max(tail_begin, std::size_t(pred_match.position(0) + pred_match.length(0)));
    std::string explanation = trim_explanation(std::string_view(text).substr(tail_begin));
    if (!explanation.empty()) out.explanation = std::move(explanation);
    return out;
}

ParsedResponse parse_model_response_strict(const std::string& text) {
    static const std::regex kStrictRe(
        R"(^\s*Anomaly Score = ([0-9]*\.?[0-9]+), Prediction = "(Normal|Abnormal)"\s*(?:\.\s*(.*?))?\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, kStrictRe))
        throw DataError("response does not conform to the output template: '" + text + "'");
    ParsedResponse out;
    out.score = clamp01(std::stod(m[1].str()));
    out.prediction = *label_from_string(m[2].str());
    if (m[3].matched && m[3].length() > 0) out.explanation = m[3].str();
    return out;
}

SftExportReport export_sft(const ingest::LabeledCorpus& corpus, Strategy strategy,
                           Modality modality, const std::string& path, const SftOptions& options,
                           const WorkCalendar& calendar, const views::DeviceProfile& profile,
                           const std::string& corporate_domain) {
    struct Item {
        PromptRecord prompt;
        Label label;
    };
    std::vector<Item> items;
    SftExportReport report;

    for (const auto& session : corpus.sessions) {
        if (!session.label) {
            report.skipped_unlabeled++;
            continue;
        }
        if (modality == Modality::Semantic) {
            for (const auto& entry : views::semantic_view(session))
                items.push_back({semantic_prompt(entry), *session.label});
        } else {
            views::NarrativeContext ctx{calendar, &profile, session.user, corporate_domain};
            auto narrative = views::abstract_4w(views::behavioral_view(session), ctx);
            if (narrative.sentences.empty()) {
                report.skipped_unlabeled++;
                continue;
            }
            items.push_back({behavioral_prompt(narrative), *session.label});
        }
    }

    auto output_for = [&](Label l) {
        double target = l == Label::Abnormal ? options.abnormal_target : options.normal_target;
        return render_output(target, l);
    };
    auto write_file = [&](const std::string& file_path, const std::vector<const Item*>& subset) {
        std::ofstream out(file_path, std::ios::binary);
        if (!out) throw DataError("cannot write SFT file '" + file_path + "'");
        for (const auto* item : subset) {
            nlohmann::ordered_json j;
            j["instruction"] = item->prompt.instruction;
            j["input"] = item->prompt.input;
            j["output"] = output_for(item->label);
            out << j.dump() << '\n';
        }
        report.files.push_back(file_path);
        report.records += subset.size();
    };

    if (strategy == Strategy::DmfiA) {
        std::vector<const Item*> mixed;
        mixed.reserve(items.size());
        for (const auto& item : items) mixed.push_back(&item);
        Rng rng(options.shuffle_seed);
        rng.shuffle(mixed);
        write_file(path, mixed);
    } else {
        std::vector<const Item*> norm, abn;
        for (const auto& item : items)
            (item.label == Label::Normal ? norm : abn).push_back(&item);
        std::string stem = path;
        static const std::string kExt = ".jsonl";
        if (stem.size() >= kExt.size() && stem.compare(stem.size() - kExt.size(), kExt.size(),
                                                       kExt) == 0)
            stem.resize(stem.size() - kExt.size());
        write_file(stem + ".norm.jsonl", norm);
        write_file(stem + ".abn.jsonl", abn);
    }
    return report;
}

}  // namespace dmfi::prompts
