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

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dmfi/prompts.hpp"

namespace dmfi::scorer {

struct ScoreResult {
    double score = 0.0;  // always in [0,1]
    std::optional<Label> prediction;
    std::optional<std::string> explanation;
};

/// Anomaly-scoring oracle standing in for a fine-tuned model. Backends
/// must be safe to share across concurrent scoring workers. call_count()
/// counts score() invocations and instruments cache soundness checks.
class ScorerBackend {
public:
    virtual ~ScorerBackend() = default;

    const std::string& id() const { return id_; }
    std::uint64_t call_count() const { return calls_.load(); }

    ScoreResult score(const prompts::PromptRecord& prompt) {
        calls_.fetch_add(1);
        ScoreResult r = do_score(prompt);
        r.score = clamp01_score(r.score);
        return r;
    }

protected:
    explicit ScorerBackend(std::string id) : id_(std::move(id)) {}
    virtual ScoreResult do_score(const prompts::PromptRecord& prompt) = 0;

private:
    static double clamp01_score(double s);

    std::string id_;
    std::atomic<std::uint64_t> calls_{0};
};

using BackendPtr = std::shared_ptr<ScorerBackend>;

/// Ordered substring rules evaluated against the prompt input; matching
/// deltas are summed onto the base and the result clamped into [0,1]. The
/// special pattern "AFTER_HOURS" matches the canonical after-hours
/// narrative phrase.
struct MockRuleTable {
    struct Rule {
        std::string pattern;  // substring, or the AFTER_HOURS marker
        double delta = 0.0;
    };
    double base = 0.1;
    std::vector<Rule> rules;

    double evaluate(const std::string& input) const;

    /// Default table tuned to the synthetic fixture's planted markers;
    /// scores rise on anomaly signals.
    static MockRuleTable default_anomaly();
    /// Inverted profile for the normal branch of the dual-branch strategy;
    /// scores fall on anomaly signals.
    static MockRuleTable default_normality();

    static MockRuleTable from_json(const std::string& json_text);
};

class MockBackend : public ScorerBackend {
public:
    MockBackend(std::string id, MockRuleTable table)
        : ScorerBackend(std::move(id)), table_(std::move(table)) {}

    const MockRuleTable& table() const { return table_; }

protected:
    ScoreResult do_score(const prompts::PromptRecord& prompt) override;

private:
    MockRuleTable table_;
};

struct HttpOptions {
    int timeout_seconds = 30;
    int retries = 3;                 // retry attempts after the first try
    int backoff_initial_ms = 1000;   // doubles per retry: 1 s, 2 s, 4 s
    bool strict_parse = false;
    std::string api_key;             // sent as a bearer token when set
};

/// Remote scorer speaking the POST /v1/score JSON protocol: request
/// {"model","instruction","input"}, response either structured
/// {"score","prediction","explanation"} or {"text"} which is fed through
/// the response grammar. Transport failures and 5xx replies are retried
/// with exponential backoff; exhaustion raises BackendError.
class HttpBackend : public ScorerBackend {
public:
    HttpBackend(std::string id, std::string endpoint, HttpOptions options = {});

protected:
    ScoreResult do_score(const prompts::PromptRecord& prompt) override;

private:
    std::string host_;
    int port_ = 80;
    HttpOptions options_;
};

/// SHA-256 of (backend id || 0x00 || instruction || 0x00 || input), the
/// cache key; switching models never serves stale scores.
std::string cache_key(const std::string& backend_id, const prompts::PromptRecord& prompt);

struct CacheEntry {
    double score = 0.0;
    std::optional<Label> prediction;
};

/// Append-only JSONL score cache shared by every backend of a run. The log
/// is replayed on construction with last-write-wins; appends are
/// serialized through one writer.
class CacheStore {
public:
    explicit CacheStore(std::string path);

    std::optional<CacheEntry> lookup(const std::string& key) const;
    /// Inserts and appends to the log; if the key raced in first, the
    /// existing entry wins and nothing is appended.
    CacheEntry insert(const std::string& key, const CacheEntry& entry);
    std::size_t size() const;
    const std::string& path() const { return path_; }

private:
    std::string path_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, CacheEntry> entries_;
};

/// Write-through cache over an inner backend: the inner backend is
/// consulted only on a miss, so a re-run over an unchanged corpus issues
/// zero inner calls.
class CachedBackend : public ScorerBackend {
public:
    CachedBackend(BackendPtr inner, std::shared_ptr<CacheStore> store);

    std::uint64_t inner_calls() const { return inner_->call_count(); }

protected:
    ScoreResult do_score(const prompts::PromptRecord& prompt) override;

private:
    BackendPtr inner_;
    std::shared_ptr<CacheStore> store_;
};

/// Direct anomaly confidence of the unified strategy.
double score_dmfi_a(ScorerBackend& mix, const prompts::PromptRecord& prompt);

/// Margin formulation of the dual-branch strategy:
/// sigmoid(scale * (abnormal-branch score - normal-branch score)). With
/// branch scores in [0,1] and scale 1 the output lies in
/// [sigmoid(-1), sigmoid(1)].
double score_dmfi_b(ScorerBackend& abnormal, ScorerBackend& normal,
                    const prompts::PromptRecord& prompt, double margin_scale = 1.0);

struct ScoreOutcome {
    std::optional<double> score;
    std::string error;  // set when scoring this element failed
};

/// Scores prompts with bounded parallelism; results are positionally
/// aligned with the input and element failures are recorded per element
/// rather than failing the batch.
std::vector<ScoreOutcome> batch_score(ScorerBackend& backend,
                                      const std::vector<prompts::PromptRecord>& prompt_list,
                                      unsigned parallelism);

/// Strategy selection made explicit: one backend for DmfiA, an
/// (abnormal, normal) pair for DmfiB.
class StrategyScorer {
public:
    static StrategyScorer unified(BackendPtr mix);
    static StrategyScorer dual(BackendPtr abnormal, BackendPtr normal, double margin_scale = 1.0);

    prompts::Strategy strategy() const { return strategy_; }
    ScoreResult apply(const prompts::PromptRecord& prompt) const;

    const BackendPtr& primary() const { return primary_; }
    const BackendPtr& normal_branch() const { return normal_; }

private:
    prompts::Strategy strategy_ = prompts::Strategy::DmfiA;
    BackendPtr primary_;  // mix model, or the abnormal branch
    BackendPtr normal_;
    double margin_scale_ = 1.0;
};

}  // namespace dmfi::scorer
