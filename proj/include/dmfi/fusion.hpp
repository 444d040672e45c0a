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

#include <Eigen/Dense>

#include "dmfi/scorer.hpp"
#include "dmfi/views.hpp"

namespace dmfi::fusion {

/// Semantic score aggregation strategies. FullStats is the
/// [mean, max, std, min] vector; the others are its ablations.
enum class AggregationMode { MaxOnly, MeanOnly, MeanMax, FullStats };

const char* to_string(AggregationMode mode);
std::optional<AggregationMode> aggregation_mode_from_string(const std::string& name);

/// Width of the aggregated semantic vector for a mode (1, 1, 2 or 4).
int stat_dimension(AggregationMode mode);

struct SemanticStats {
    Eigen::VectorXd v;
    /// Set when the session had no content-bearing events; v is all zero.
    bool no_semantic_content = false;
};

/// Descriptive statistics over per-entry semantic scores. FullStats order
/// is [mean, max, std, min] with the population standard deviation, which
/// stays defined for singletons. An empty input yields the zero vector
/// plus the no-semantic-content flag.
SemanticStats aggregate_semantic(const std::vector<double>& scores, AggregationMode mode);

/// [v_sem, alpha_beh] in fixed order.
Eigen::VectorXd joint_feature(const Eigen::VectorXd& v_sem, double alpha_beh);

/// Fully connected scoring head: affine/rectifier hidden layers and a
/// sigmoid output. Default shape 5 -> 16 -> 8 -> 1.
struct MlpParams {
    std::vector<Eigen::MatrixXd> weights;  // weights[l]: rows = layer l+1 size
    std::vector<Eigen::VectorXd> biases;
    AggregationMode mode = AggregationMode::FullStats;
    double theta = 0.5;

    int input_width() const { return weights.empty() ? 0 : int(weights.front().cols()); }
    std::vector<int> layer_sizes() const;

    std::string to_json(const views::DeviceProfile* profile = nullptr) const;
    /// Loads params (and the optional persisted device profile).
    static MlpParams from_json(const std::string& json_text,
                               views::DeviceProfile* profile_out = nullptr);
};

/// Forward pass; output is always in (0,1). Throws DataError when the
/// input width does not match the first layer.
double mlp_forward(const MlpParams& params, const Eigen::VectorXd& z);

/// Binary cross entropy with the prediction clamped to [1e-7, 1-1e-7].
double bce_loss(double alpha, Label y);

using Example = std::pair<Eigen::VectorXd, Label>;

struct Gradients {
    std::vector<Eigen::MatrixXd> weight_grads;
    std::vector<Eigen::VectorXd> bias_grads;
    double mean_loss = 0.0;
};

/// Mean BCE loss over the batch and its analytic gradients.
Gradients compute_gradients(const MlpParams& params, const std::vector<Example>& batch);

struct FusionHyper {
    double learning_rate = 1e-3;
    unsigned epochs = 200;
    unsigned batch_size = 32;
    std::uint64_t seed = 0;
    double theta = 0.5;
    AggregationMode mode = AggregationMode::FullStats;
    std::vector<int> hidden_sizes = {16, 8};
};

struct TrainResult {
    MlpParams params;
    double final_loss = 0.0;
};

/// Mini-batch gradient descent with adaptive moments (beta1 0.9,
/// beta2 0.999, eps 1e-8) on mean BCE; Glorot-uniform seeded
/// initialization. Deterministic for a fixed seed. Throws DataError when
/// the dataset is empty or single-class.
TrainResult train_fusion(const std::vector<Example>& dataset, const FusionHyper& hyper);

/// Abnormal iff alpha_joint >= theta (inclusive).
Label decide(double alpha_joint, double theta);

/// Everything recorded while scoring one session: raw branch scores plus
/// context for reporting. Produced by score_session / score_sessions.
struct SessionScores {
    std::string user;
    Date day{};
    std::optional<Label> truth;
    std::vector<double> semantic_scores;
    double alpha_beh = 0.0;
    std::optional<std::string> explanation;
    bool unscored = false;  // backend failure; excluded from metrics
    std::string error;
};

/// Per-session decision record with every intermediate retained.
struct ScoreBundle {
    std::string user;
    Date day{};
    std::optional<Label> truth;
    std::vector<double> semantic_scores;
    Eigen::VectorXd v_sem;
    bool no_semantic_content = false;
    double alpha_beh = 0.0;
    double alpha_joint = 0.0;
    Label prediction = Label::Normal;
    std::optional<std::string> explanation;
    bool unscored = false;
    std::string error;
};

/// Scores one session's semantic entries and behavioral narrative through
/// the strategy scorer. Backend failures mark the row unscored instead of
/// propagating.
SessionScores score_session(const Session& session, const scorer::StrategyScorer& model,
                            const views::NarrativeContext& ctx);

std::vector<SessionScores> score_sessions(const std::vector<Session>& sessions,
                                          const scorer::StrategyScorer& model,
                                          const WorkCalendar& calendar,
                                          const views::DeviceProfile& profile,
                                          const std::string& corporate_domain,
                                          unsigned parallelism = 1);

/// Aggregates raw rows into (joint feature, label) training examples,
/// skipping unscored and unlabeled rows.
std::vector<Example> fuse_features(const std::vector<SessionScores>& rows, AggregationMode mode);

/// Pure fusion math from already-scored rows to decision bundles.
ScoreBundle infer_bundle(const SessionScores& row, const MlpParams& params);
std::vector<ScoreBundle> infer_bundles(const std::vector<SessionScores>& rows,
                                       const MlpParams& params);

/// Full per-session inference: semantic scoring, aggregation, behavioral
/// scoring, fusion and threshold decision.
ScoreBundle infer_session(const Session& session, const scorer::StrategyScorer& model,
                          const MlpParams& params, const views::NarrativeContext& ctx);

}  // namespace dmfi::fusion
