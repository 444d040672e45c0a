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

#include <string>
#include <vector>

#include "dmfi/fusion.hpp"

namespace dmfi::eval {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
};

/// Counts positionally aligned prediction/truth pairs; Abnormal is the
/// positive class. Throws DataError on length mismatch.
ConfusionMatrix confusion(const std::vector<Label>& predictions,
                          const std::vector<Label>& truth);

struct MetricsReport {
    double prec = 0.0;  // tp / (tp + fp)
    double dr = 0.0;    // tp / (tp + fn), detection rate (recall)
    double fpr = 0.0;   // fp / (fp + tn)
    double acc = 0.0;   // (tp + tn) / total
    ConfusionMatrix matrix;
    std::size_t unscored = 0;
    std::vector<std::string> flags;  // degenerate-denominator notes etc.
};

/// Computes the four metrics. Degenerate denominators are defined rather
/// than undefined and always flagged: with no predicted positives,
/// precision is 1.0 when nothing was missed and 0.0 otherwise; a vacuous
/// detection rate reports 1.0 and a vacuous FPR 0.0. Throws DataError on
/// an empty matrix.
MetricsReport metrics(const ConfusionMatrix& m);

/// Metrics over decision bundles; unscored bundles are excluded and
/// counted, unlabeled bundles are excluded with a flag.
MetricsReport metrics_from_bundles(const std::vector<fusion::ScoreBundle>& bundles);

struct AblationRow {
    fusion::AggregationMode mode;
    MetricsReport report;
    double train_loss = 0.0;
};

/// Reruns fusion training per aggregation mode (same seed) on the train
/// rows and evaluates on the test rows: one report row per mode.
std::vector<AblationRow> ablation_report(const std::vector<fusion::SessionScores>& train_rows,
                                         const std::vector<fusion::SessionScores>& test_rows,
                                         const std::vector<fusion::AggregationMode>& modes,
                                         const fusion::FusionHyper& hyper);

/// Published full-scale reference results, embedded in reports as
/// annotations for context. They are never asserted as oracles: they come
/// from fine-tuned 7B models on the licensed CERT corpus and are not
/// reproducible at desk scale.
struct ReferenceRow {
    const char* name;
    const char* dataset;
    double prec, dr, fpr, acc;
};
const std::vector<ReferenceRow>& published_references();

/// Fixed-key JSON rendering: prec, dr, fpr, acc, counts, flags, config.
std::string report_to_json(const MetricsReport& report, const std::string& config_echo_json);

/// Aligned-column text rendering for humans, reference rows included.
std::string report_to_text(const MetricsReport& report);

std::string ablation_to_text(const std::vector<AblationRow>& rows);
std::string ablation_to_json(const std::vector<AblationRow>& rows,
                             const std::string& config_echo_json);

}  // namespace dmfi::eval
