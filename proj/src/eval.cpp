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

#include "dmfi/eval.hpp"

#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dmfi/errors.hpp"

namespace dmfi::eval {

ConfusionMatrix confusion(const std::vector<Label>& predictions,
                          const std::vector<Label>& truth) {
    if (predictions.size() != truth.size())
        throw DataError("confusion: " + std::to_string(predictions.size()) +
                        " predictions vs " + std::to_string(truth.size()) + " truths");
    ConfusionMatrix m;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        bool pred_abn = predictions[i] == Label::Abnormal;
        bool true_abn = truth[i] == Label::Abnormal;
        if (pred_abn && true_abn)
            ++m.tp;
        else if (pred_abn && !true_abn)
            ++m.fp;
        else if (!pred_abn && true_abn)
            ++m.fn;
        else
            ++m.tn;
    }
    return m;
}

MetricsReport metrics(const ConfusionMatrix& m) {
    if (m.total() == 0) throw DataError("metrics over an empty confusion matrix");
    MetricsReport r;
    r.matrix = m;
    if (m.tp + m.fp == 0) {
        r.prec = m.fn == 0 ? 1.0 : 0.0;
        r.flags.push_back("precision undefined (no predicted positives); reported " +
                          std::string(m.fn == 0 ? "1.0" : "0.0"));
    } else {
        r.prec = double(m.tp) / double(m.tp + m.fp);
    }
    if (m.tp + m.fn == 0) {
        r.dr = 1.0;
        r.flags.push_back("detection rate vacuous (no abnormal truth); reported 1.0");
    } else {
        r.dr = double(m.tp) / double(m.tp + m.fn);
    }
    if (m.fp + m.tn == 0) {
        r.fpr = 0.0;
        r.flags.push_back("FPR vacuous (no benign truth); reported 0.0");
    } else {
        r.fpr = double(m.fp) / double(m.fp + m.tn);
    }
    r.acc = double(m.tp + m.tn) / double(m.total());
    return r;
}

MetricsReport metrics_from_bundles(const std::vector<fusion::ScoreBundle>& bundles) {
    std::vector<Label> predictions, truth;
    std::size_t unscored = 0, unlabeled = 0;
    for (const auto& b : bundles) {
        if (b.unscored) {
            ++unscored;
            continue;
        }
        if (!b.truth) {
            ++unlabeled;
            continue;
        }
        predictions.push_back(b.prediction);
        truth.push_back(*b.truth);
    }
    MetricsReport r = metrics(confusion(predictions, truth));
    r.unscored = unscored;
    if (unscored > 0)
        r.flags.push_back(std::to_string(unscored) + " unscored sessions excluded");
    if (unlabeled > 0)
        r.flags.push_back(std::to_string(unlabeled) + " unlabeled sessions excluded");
    return r;
}

std::vector<AblationRow> ablation_report(const std::vector<fusion::SessionScores>& train_rows,
                                         const std::vector<fusion::SessionScores>& test_rows,
                                         const std::vector<fusion::AggregationMode>& modes,
                                         const fusion::FusionHyper& hyper) {
    std::vector<AblationRow> rows;
    rows.reserve(modes.size());
    for (auto mode : modes) {
        fusion::FusionHyper h = hyper;
        h.mode = mode;
        auto dataset = fusion::fuse_features(train_rows, mode);
        auto trained = fusion::train_fusion(dataset, h);
        auto bundles = fusion::infer_bundles(test_rows, trained.params);
        rows.push_back({mode, metrics_from_bundles(bundles), trained.final_loss});
    }
    return rows;
}

const std::vector<ReferenceRow>& published_references() {
    // Two slightly different figures for the dual-branch method on CERT
    // r4.2 circulate in the published tables; both are recorded.
    static const std::vector<ReferenceRow> kRows = {
        {"DMFI-B (headline)", "CERT r4.2", 0.953, 0.929, 0.009, 0.981},
        {"DMFI-B (headline)", "CERT r5.2", 0.945, 0.938, 0.011, 0.981},
        {"DMFI-B (both views)", "CERT r4.2", 0.953, 0.939, 0.009, 0.983},
        {"FullStats aggregation", "CERT r4.2", 0.936, 0.931, 0.012, 0.978},
    };
    return kRows;
}

std::string report_to_json(const MetricsReport& report, const std::string& config_echo_json) {
    nlohmann::ordered_json j;
    j["prec"] = report.prec;
    j["dr"] = report.dr;
    j["fpr"] = report.fpr;
    j["acc"] = report.acc;
    j["counts"] = {{"tp", report.matrix.tp},
                   {"fp", report.matrix.fp},
                   {"fn", report.matrix.fn},
                   {"tn", report.matrix.tn},
                   {"total", report.matrix.total()},
                   {"unscored", report.unscored}};
    j["flags"] = report.flags;
    j["config"] = config_echo_json.empty() ? nlohmann::ordered_json(nullptr)
                                           : nlohmann::ordered_json::parse(config_echo_json);
    nlohmann::ordered_json refs = nlohmann::ordered_json::array();
    for (const auto& row : published_references())
        refs.push_back({{"name", row.name},
                        {"dataset", row.dataset},
                        {"prec", row.prec},
                        {"dr", row.dr},
                        {"fpr", row.fpr},
                        {"acc", row.acc}});
    j["published_reference"] = {{"note",
                                 "full-scale published results; annotations only, "
                                 "not reproducible at desk scale"},
                                {"rows", refs}};
    return j.dump(2);
}

std::string report_to_text(const MetricsReport& report) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-24s %8s %8s %8s %8s\n", "", "prec", "dr", "fpr", "acc");
    out << line;
    std::snprintf(line, sizeof(line), "%-24s %8.3f %8.3f %8.3f %8.3f\n", "this run", report.prec,
                  report.dr, report.fpr, report.acc);
    out << line;
    for (const auto& row : published_references()) {
        std::string name = std::string(row.name) + " " + row.dataset;
        std::snprintf(line, sizeof(line), "%-24s %8.3f %8.3f %8.3f %8.3f  (reference)\n",
                      name.c_str(), row.prec, row.dr, row.fpr, row.acc);
        out << line;
    }
    std::snprintf(line, sizeof(line), "counts: tp=%zu fp=%zu fn=%zu tn=%zu unscored=%zu\n",
                  report.matrix.tp, report.matrix.fp, report.matrix.fn, report.matrix.tn,
                  report.unscored);
    out << line;
    for (const auto& flag : report.flags) out << "flag: " << flag << '\n';
    return out.str();
}

std::string ablation_to_text(const std::vector<AblationRow>& rows) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s %8s %8s %8s %8s %10s\n", "mode", "prec", "dr", "fpr",
                  "acc", "train_loss");
    out << line;
    for (const auto& row : rows) {
        std::snprintf(line, sizeof(line), "%-12s %8.3f %8.3f %8.3f %8.3f %10.4f\n",
                      fusion::to_string(row.mode), row.report.prec, row.report.dr, row.report.fpr,
                      row.report.acc, row.train_loss);
        out << line;
    }
    return out.str();
}

std::string ablation_to_json(const std::vector<AblationRow>& rows,
                             const std::string& config_echo_json) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (const auto& row : rows)
        table.push_back({{"mode", fusion::to_string(row.mode)},
                         {"prec", row.report.prec},
                         {"dr", row.report.dr},
                         {"fpr", row.report.fpr},
                         {"acc", row.report.acc},
                         {"counts",
                          {{"tp", row.report.matrix.tp},
                           {"fp", row.report.matrix.fp},
                           {"fn", row.report.matrix.fn},
                           {"tn", row.report.matrix.tn},
                           {"total", row.report.matrix.total()},
                           {"unscored", row.report.unscored}}},
                         {"flags", row.report.flags},
                         {"train_loss", row.train_loss}});
    j["ablation"] = table;
    j["config"] = config_echo_json.empty() ? nlohmann::ordered_json(nullptr)
                                           : nlohmann::ordered_json::parse(config_echo_json);
    return j.dump(2);
}

}  // namespace dmfi::eval
