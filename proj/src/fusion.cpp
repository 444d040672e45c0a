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

#include "dmfi/fusion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include <nlohmann/json.hpp>

#include "dmfi/errors.hpp"
#include "dmfi/numeric.hpp"
#include "dmfi/rng.hpp"

namespace dmfi::fusion {

namespace {

constexpr double kBceEps = 1e-7;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

Eigen::VectorXd relu(const Eigen::VectorXd& x) { return x.cwiseMax(0.0); }

struct ForwardTrace {
    std::vector<Eigen::VectorXd> pre;   // pre-activation per layer
    std::vector<Eigen::VectorXd> post;  // post-activation per layer (post[0] = input)
    double output = 0.0;
};

ForwardTrace forward_trace(const MlpParams& params, const Eigen::VectorXd& z) {
    ForwardTrace t;
    t.post.push_back(z);
    Eigen::VectorXd h = z;
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        Eigen::VectorXd pre = params.weights[l] * h + params.biases[l];
        t.pre.push_back(pre);
        bool last = l + 1 == params.weights.size();
        h = last ? pre : relu(pre);
        t.post.push_back(h);
    }
    t.output = sigmoid(t.post.back()(0));
    return t;
}

MlpParams zero_like(const MlpParams& params) {
    MlpParams g = params;
    for (auto& w : g.weights) w.setZero();
    for (auto& b : g.biases) b.setZero();
    return g;
}

}  // namespace

const char* to_string(AggregationMode mode) {
    switch (mode) {
        case AggregationMode::MaxOnly: return "MaxOnly";
        case AggregationMode::MeanOnly: return "MeanOnly";
        case AggregationMode::MeanMax: return "MeanMax";
        case AggregationMode::FullStats: return "FullStats";
    }
    return "?";
}

std::optional<AggregationMode> aggregation_mode_from_string(const std::string& name) {
    if (name == "MaxOnly") return AggregationMode::MaxOnly;
    if (name == "MeanOnly") return AggregationMode::MeanOnly;
    if (name == "MeanMax") return AggregationMode::MeanMax;
    if (name == "FullStats") return AggregationMode::FullStats;
    return std::nullopt;
}

int stat_dimension(AggregationMode mode) {
    switch (mode) {
        case AggregationMode::MaxOnly:
        case AggregationMode::MeanOnly: return 1;
        case AggregationMode::MeanMax: return 2;
        case AggregationMode::FullStats: return 4;
    }
    return 0;
}

SemanticStats aggregate_semantic(const std::vector<double>& scores, AggregationMode mode) {
    SemanticStats out;
    out.v = Eigen::VectorXd::Zero(stat_dimension(mode));
    if (scores.empty()) {
        out.no_semantic_content = true;
        return out;
    }
    Eigen::Map<const Eigen::VectorXd> s(scores.data(), Eigen::Index(scores.size()));
    double mean = s.mean();
    double max = s.maxCoeff();
    double min = s.minCoeff();
    double std_dev = std::sqrt((s.array() - mean).square().sum() / double(s.size()));
    switch (mode) {
        case AggregationMode::MaxOnly: out.v << max; break;
        case AggregationMode::MeanOnly: out.v << mean; break;
        case AggregationMode::MeanMax: out.v << mean, max; break;
        case AggregationMode::FullStats: out.v << mean, max, std_dev, min; break;
    }
    return out;
}

Eigen::VectorXd joint_feature(const Eigen::VectorXd& v_sem, double alpha_beh) {
    Eigen::VectorXd z(v_sem.size() + 1);
    z.head(v_sem.size()) = v_sem;
    z(v_sem.size()) = alpha_beh;
    return z;
}

std::vector<int> MlpParams::layer_sizes() const {
    std::vector<int> sizes;
    if (weights.empty()) return sizes;
    sizes.push_back(int(weights.front().cols()));
    for (const auto& w : weights) sizes.push_back(int(w.rows()));
    return sizes;
}

std::string MlpParams::to_json(const views::DeviceProfile* profile) const {
    nlohmann::ordered_json j;
    j["layer_sizes"] = layer_sizes();
    j["aggregation_mode"] = to_string(mode);
    j["theta"] = theta;
    nlohmann::ordered_json w_arrays = nlohmann::ordered_json::array();
    nlohmann::ordered_json b_arrays = nlohmann::ordered_json::array();
    for (const auto& w : weights) {
        std::vector<double> row_major;
        row_major.reserve(std::size_t(w.size()));
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) row_major.push_back(w(r, c));
        w_arrays.push_back(row_major);
    }
    for (const auto& b : biases)
        b_arrays.push_back(std::vector<double>(b.data(), b.data() + b.size()));
    j["weights"] = w_arrays;
    j["biases"] = b_arrays;
    if (profile) {
        nlohmann::ordered_json p = nlohmann::ordered_json::object();
        std::map<std::string, std::string> sorted(profile->map().begin(), profile->map().end());
        for (const auto& [user, device] : sorted) p[user] = device;
        j["device_profile"] = p;
    }
    return j.dump(2);
}

MlpParams MlpParams::from_json(const std::string& json_text, views::DeviceProfile* profile_out) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad fusion params JSON: ") + e.what());
    }
    MlpParams params;
    auto mode = aggregation_mode_from_string(j.at("aggregation_mode").get<std::string>());
    if (!mode) throw DataError("fusion params: unknown aggregation mode");
    params.mode = *mode;
    params.theta = j.at("theta").get<double>();
    auto sizes = j.at("layer_sizes").get<std::vector<int>>();
    if (sizes.size() < 2) throw DataError("fusion params: need at least two layer sizes");
    auto w_arrays = j.at("weights");
    auto b_arrays = j.at("biases");
    if (w_arrays.size() != sizes.size() - 1 || b_arrays.size() != sizes.size() - 1)
        throw DataError("fusion params: layer count mismatch");
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        int rows = sizes[l + 1], cols = sizes[l];
        auto flat = w_arrays[l].get<std::vector<double>>();
        if (int(flat.size()) != rows * cols)
            throw DataError("fusion params: weight array size mismatch");
        Eigen::MatrixXd w(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) w(r, c) = flat[std::size_t(r) * cols + c];
        auto bias = b_arrays[l].get<std::vector<double>>();
        if (int(bias.size()) != rows) throw DataError("fusion params: bias array size mismatch");
        params.weights.push_back(std::move(w));
        params.biases.push_back(Eigen::Map<Eigen::VectorXd>(bias.data(), rows));
    }
    for (const auto& w : params.weights)
        if (!w.allFinite()) throw DataError("fusion params: non-finite weights");
    if (profile_out && j.contains("device_profile"))
        for (auto& [user, device] : j.at("device_profile").items())
            profile_out->set(user, device.get<std::string>());
    return params;
}

double mlp_forward(const MlpParams& params, const Eigen::VectorXd& z) {
    if (params.weights.empty()) throw DataError("fusion params are empty");
    if (z.size() != params.weights.front().cols())
        throw DataError("fusion input width " + std::to_string(z.size()) +
                        " does not match network input " +
                        std::to_string(params.weights.front().cols()));
    return forward_trace(params, z).output;
}

double bce_loss(double alpha, Label y) {
    double a = std::clamp(alpha, kBceEps, 1.0 - kBceEps);
    double yd = y == Label::Abnormal ? 1.0 : 0.0;
    return -(yd * std::log(a) + (1.0 - yd) * std::log(1.0 - a));
}

Gradients compute_gradients(const MlpParams& params, const std::vector<Example>& batch) {
    if (batch.empty()) throw DataError("gradient computation over an empty batch");
    MlpParams grads = zero_like(params);
    double loss_sum = 0.0;
    const double inv_n = 1.0 / double(batch.size());

    for (const auto& [z, y] : batch) {
        ForwardTrace t = forward_trace(params, z);
        double yd = y == Label::Abnormal ? 1.0 : 0.0;
        loss_sum += bce_loss(t.output, y);

        // d(mean BCE)/d(pre-sigmoid logit) = (alpha - y) / n, with the same
        // clamp the loss applies.
        double a = std::clamp(t.output, kBceEps, 1.0 - kBceEps);
        double clamp_gate = (t.output > kBceEps && t.output < 1.0 - kBceEps) ? 1.0 : 0.0;
        Eigen::VectorXd delta(1);
        delta(0) = (a - yd) * clamp_gate * inv_n;

        for (int l = int(params.weights.size()) - 1; l >= 0; --l) {
            grads.weights[std::size_t(l)].noalias() +=
                delta * t.post[std::size_t(l)].transpose();
            grads.biases[std::size_t(l)] += delta;
            if (l > 0) {
                Eigen::VectorXd upstream =
                    params.weights[std::size_t(l)].transpose() * delta;
                Eigen::VectorXd gate =
                    (t.pre[std::size_t(l - 1)].array() > 0.0).cast<double>();
                delta = upstream.cwiseProduct(gate);
            }
        }
    }

    Gradients out;
    out.weight_grads = std::move(grads.weights);
    out.bias_grads = std::move(grads.biases);
    out.mean_loss = loss_sum * inv_n;
    return out;
}

TrainResult train_fusion(const std::vector<Example>& dataset, const FusionHyper& hyper) {
    if (dataset.empty()) throw DataError("degenerate training set: empty");
    bool has_normal = false, has_abnormal = false;
    for (const auto& [z, y] : dataset)
        (y == Label::Normal ? has_normal : has_abnormal) = true;
    if (!has_normal || !has_abnormal)
        throw DataError("degenerate training set: both classes required");

    std::vector<int> sizes;
    sizes.push_back(int(dataset.front().first.size()));
    for (int h : hyper.hidden_sizes) sizes.push_back(h);
    sizes.push_back(1);

    Rng rng(hyper.seed);
    MlpParams params;
    params.mode = hyper.mode;
    params.theta = hyper.theta;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        int fan_in = sizes[l], fan_out = sizes[l + 1];
        double bound = std::sqrt(6.0 / double(fan_in + fan_out));
        Eigen::MatrixXd w(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r)
            for (int c = 0; c < fan_in; ++c) w(r, c) = rng.uniform(-bound, bound);
        params.weights.push_back(std::move(w));
        params.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }

    MlpParams m = zero_like(params);  // first moment
    MlpParams v = zero_like(params);  // second moment
    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    double last_loss = 0.0;
    std::size_t step = 0;
    for (unsigned epoch = 0; epoch < hyper.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += hyper.batch_size) {
            std::size_t end = std::min(order.size(), begin + hyper.batch_size);
            std::vector<Example> batch;
            batch.reserve(end - begin);
            for (std::size_t i = begin; i < end; ++i) batch.push_back(dataset[order[i]]);

            Gradients g = compute_gradients(params, batch);
            ++step;
            double bias1 = 1.0 - std::pow(kAdamBeta1, double(step));
            double bias2 = 1.0 - std::pow(kAdamBeta2, double(step));
            auto update = [&](auto& p, auto& m1, auto& m2, const auto& grad) {
                m1 = kAdamBeta1 * m1 + (1.0 - kAdamBeta1) * grad;
                m2 = kAdamBeta2 * m2 + (1.0 - kAdamBeta2) * grad.cwiseProduct(grad);
                p.array() -= hyper.learning_rate * (m1 / bias1).array() /
                             ((m2 / bias2).array().sqrt() + kAdamEps);
            };
            for (std::size_t l = 0; l < params.weights.size(); ++l) {
                update(params.weights[l], m.weights[l], v.weights[l], g.weight_grads[l]);
                update(params.biases[l], m.biases[l], v.biases[l], g.bias_grads[l]);
            }
            epoch_loss += g.mean_loss;
            ++batches;
        }
        last_loss = epoch_loss / double(batches);
    }
    return {std::move(params), last_loss};
}

Label decide(double alpha_joint, double theta) {
    return alpha_joint >= theta ? Label::Abnormal : Label::Normal;
}

SessionScores score_session(const Session& session, const scorer::StrategyScorer& model,
                            const views::NarrativeContext& ctx) {
    SessionScores row;
    row.user = session.user;
    row.day = session.day;
    row.truth = session.label;
    try {
        for (const auto& entry : views::semantic_view(session))
            row.semantic_scores.push_back(model.apply(prompts::semantic_prompt(entry)).score);
        auto narrative = views::abstract_4w(views::behavioral_view(session), ctx);
        auto behavioral = model.apply(prompts::behavioral_prompt(narrative));
        row.alpha_beh = behavioral.score;
        row.explanation = behavioral.explanation;
    } catch (const BackendError& e) {
        row.unscored = true;
        row.error = e.what();
    } catch (const DataError& e) {
        row.unscored = true;
        row.error = e.what();
    }
    return row;
}

std::vector<SessionScores> score_sessions(const std::vector<Session>& sessions,
                                          const scorer::StrategyScorer& model,
                                          const WorkCalendar& calendar,
                                          const views::DeviceProfile& profile,
                                          const std::string& corporate_domain,
                                          unsigned parallelism) {
    std::vector<SessionScores> rows(sessions.size());
    auto score_one = [&](std::size_t i) {
        views::NarrativeContext ctx{calendar, &profile, sessions[i].user, corporate_domain};
        rows[i] = score_session(sessions[i], model, ctx);
    };
    if (parallelism <= 1 || sessions.size() < 2) {
        for (std::size_t i = 0; i < sessions.size(); ++i) score_one(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= sessions.size()) return;
            score_one(i);
        }
    };
    std::vector<std::thread> threads;
    unsigned thread_count = unsigned(std::min<std::size_t>(parallelism, sessions.size()));
    threads.reserve(thread_count);
    for (unsigned t = 0; t < thread_count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    return rows;
}

std::vector<Example> fuse_features(const std::vector<SessionScores>& rows, AggregationMode mode) {
    std::vector<Example> examples;
    for (const auto& row : rows) {
        if (row.unscored || !row.truth) continue;
        auto stats = aggregate_semantic(row.semantic_scores, mode);
        examples.emplace_back(joint_feature(stats.v, row.alpha_beh), *row.truth);
    }
    return examples;
}

ScoreBundle infer_bundle(const SessionScores& row, const MlpParams& params) {
    ScoreBundle b;
    b.user = row.user;
    b.day = row.day;
    b.truth = row.truth;
    b.semantic_scores = row.semantic_scores;
    b.explanation = row.explanation;
    b.unscored = row.unscored;
    b.error = row.error;
    if (row.unscored) return b;

    auto stats = aggregate_semantic(row.semantic_scores, params.mode);
    b.v_sem = stats.v;
    b.no_semantic_content = stats.no_semantic_content;
    b.alpha_beh = row.alpha_beh;
    b.alpha_joint = mlp_forward(params, joint_feature(stats.v, row.alpha_beh));
    b.prediction = decide(b.alpha_joint, params.theta);
    return b;
}

std::vector<ScoreBundle> infer_bundles(const std::vector<SessionScores>& rows,
                                       const MlpParams& params) {
    std::vector<ScoreBundle> bundles;
    bundles.reserve(rows.size());
    for (const auto& row : rows) bundles.push_back(infer_bundle(row, params));
    return bundles;
}

ScoreBundle infer_session(const Session& session, const scorer::StrategyScorer& model,
                          const MlpParams& params, const views::NarrativeContext& ctx) {
    return infer_bundle(score_session(session, model, ctx), params);
}

}  // namespace dmfi::fusion
