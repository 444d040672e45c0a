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

#include "dmfi/scorer.hpp"

#include <chrono>
#include <fstream>
#include <thread>

#include <openssl/evp.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "dmfi/errors.hpp"
#include "dmfi/numeric.hpp"
#include "dmfi/synth.hpp"

namespace dmfi::scorer {

namespace {

constexpr const char* kAfterHoursPattern = "AFTER_HOURS";
constexpr const char* kAfterHoursPhrase = "After working hours";

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
        throw BackendError("SHA-256 computation failed");
    static const char* kHex = "0123456789abcdef";
    std::string hex;
    hex.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        hex.push_back(kHex[digest[i] >> 4]);
        hex.push_back(kHex[digest[i] & 0xF]);
    }
    return hex;
}

Label threshold_label(double score) {
    return score >= 0.5 ? Label::Abnormal : Label::Normal;
}

}  // namespace

double ScorerBackend::clamp01_score(double s) { return clamp01(s); }

double MockRuleTable::evaluate(const std::string& input) const {
    double total = base;
    for (const auto& rule : rules) {
        bool hit = rule.pattern == kAfterHoursPattern
                       ? input.find(kAfterHoursPhrase) != std::string::npos
                       : input.find(rule.pattern) != std::string::npos;
        if (hit) total += rule.delta;
    }
    return clamp01(total);
}

MockRuleTable MockRuleTable::default_anomaly() {
    MockRuleTable t;
    t.base = 0.1;
    t.rules = {
        {kAfterHoursPattern, 0.4},
        {"outsider address", 0.4},
        {synth::kPlantedContentMarker, 0.6},
        {"(.zip", 0.2},
        {"connected external device", 0.2},
        {"Shared-PC", 0.3},
    };
    return t;
}

MockRuleTable MockRuleTable::default_normality() {
    MockRuleTable t = default_anomaly();
    t.base = 0.9;
    for (auto& rule : t.rules) rule.delta = -rule.delta;
    return t;
}

MockRuleTable MockRuleTable::from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad mock rules JSON: ") + e.what());
    }
    if (!j.is_array()) throw DataError("mock rules JSON must be an array");
    MockRuleTable t;
    t.rules.clear();
    for (const auto& item : j) {
        if (item.contains("base")) {
            t.base = item.at("base").get<double>();
        } else {
            t.rules.push_back(
                {item.at("pattern").get<std::string>(), item.at("delta").get<double>()});
        }
    }
    return t;
}

ScoreResult MockBackend::do_score(const prompts::PromptRecord& prompt) {
    double s = table_.evaluate(prompt.input);
    return {s, threshold_label(s), std::nullopt};
}

HttpBackend::HttpBackend(std::string id, std::string endpoint, HttpOptions options)
    : ScorerBackend(std::move(id)), options_(std::move(options)) {
    std::string rest = endpoint;
    if (auto pos = rest.find("://"); pos != std::string::npos) rest = rest.substr(pos + 3);
    if (auto slash = rest.find('/'); slash != std::string::npos) rest = rest.substr(0, slash);
    if (auto colon = rest.find(':'); colon != std::string::npos) {
        host_ = rest.substr(0, colon);
        port_ = std::stoi(rest.substr(colon + 1));
    } else {
        host_ = rest;
        port_ = 80;
    }
    if (host_.empty()) throw UsageError("empty scoring endpoint");
}

ScoreResult HttpBackend::do_score(const prompts::PromptRecord& prompt) {
    nlohmann::json request = {
        {"model", id()}, {"instruction", prompt.instruction}, {"input", prompt.input}};
    const std::string body = request.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= options_.retries; ++attempt) {
        if (attempt > 0) {
            auto delay = std::chrono::milliseconds(options_.backoff_initial_ms) * (1 << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
        httplib::Client client(host_, port_);
        client.set_connection_timeout(options_.timeout_seconds, 0);
        client.set_read_timeout(options_.timeout_seconds, 0);
        if (!options_.api_key.empty())
            client.set_default_headers({{"Authorization", "Bearer " + options_.api_key}});

        auto response = client.Post("/v1/score", body, "application/json");
        if (!response) {
            last_error = "transport error (" + httplib::to_string(response.error()) + ")";
            continue;
        }
        if (response->status >= 500) {
            last_error = "server error " + std::to_string(response->status);
            continue;
        }
        if (response->status != 200)
            throw BackendError("scoring endpoint rejected request with status " +
                               std::to_string(response->status));

        nlohmann::json reply;
        try {
            reply = nlohmann::json::parse(response->body);
        } catch (const nlohmann::json::exception&) {
            throw BackendError("scoring endpoint returned malformed JSON");
        }

        ScoreResult result;
        if (reply.contains("score")) {
            result.score = clamp01(reply.at("score").get<double>());
            if (reply.contains("prediction")) {
                auto label = label_from_string(reply.at("prediction").get<std::string>());
                if (!label) throw BackendError("scoring endpoint returned unknown prediction");
                result.prediction = *label;
            } else {
                result.prediction = threshold_label(result.score);
            }
            if (reply.contains("explanation") && reply.at("explanation").is_string())
                result.explanation = reply.at("explanation").get<std::string>();
        } else if (reply.contains("text")) {
            try {
                auto parsed = options_.strict_parse
                                  ? prompts::parse_model_response_strict(
                                        reply.at("text").get<std::string>())
                                  : prompts::parse_model_response(
                                        reply.at("text").get<std::string>());
                result.score = parsed.score;
                result.prediction = parsed.prediction;
                result.explanation = parsed.explanation;
            } catch (const DataError& e) {
                throw BackendError(std::string("unparseable model reply: ") + e.what());
            }
        } else {
            throw BackendError("scoring endpoint reply carries neither score nor text");
        }
        return result;
    }
    throw BackendError("backend unavailable: " + last_error);
}

std::string cache_key(const std::string& backend_id, const prompts::PromptRecord& prompt) {
    std::string bytes;
    bytes.reserve(backend_id.size() + prompt.instruction.size() + prompt.input.size() + 2);
    bytes += backend_id;
    bytes.push_back('\0');
    bytes += prompt.instruction;
    bytes.push_back('\0');
    bytes += prompt.input;
    return sha256_hex(bytes);
}

CacheStore::CacheStore(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            throw DataError("corrupt cache line in '" + path_ + "'");
        }
        CacheEntry entry{j.at("score").get<double>(), std::nullopt};
        if (j.contains("prediction"))
            entry.prediction = label_from_string(j.at("prediction").get<std::string>());
        entries_[j.at("key").get<std::string>()] = entry;  // last write wins
    }
}

std::optional<CacheEntry> CacheStore::lookup(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

CacheEntry CacheStore::insert(const std::string& key, const CacheEntry& entry) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto [it, inserted] = entries_.emplace(key, entry);
    if (!inserted) return it->second;
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw DataError("cannot append to score cache '" + path_ + "'");
    nlohmann::ordered_json j;
    j["key"] = key;
    j["score"] = entry.score;
    if (entry.prediction) j["prediction"] = to_string(*entry.prediction);
    j["created_at"] = format_rfc3339(
        std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()));
    out << j.dump() << '\n';
    return entry;
}

std::size_t CacheStore::size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
}

CachedBackend::CachedBackend(BackendPtr inner, std::shared_ptr<CacheStore> store)
    : ScorerBackend(inner->id()), inner_(std::move(inner)), store_(std::move(store)) {}

ScoreResult CachedBackend::do_score(const prompts::PromptRecord& prompt) {
    const std::string key = cache_key(id(), prompt);
    if (auto hit = store_->lookup(key)) return {hit->score, hit->prediction, std::nullopt};
    ScoreResult result = inner_->score(prompt);
    CacheEntry stored = store_->insert(key, {result.score, result.prediction});
    return {stored.score, stored.prediction, result.explanation};
}

double score_dmfi_a(ScorerBackend& mix, const prompts::PromptRecord& prompt) {
    return mix.score(prompt).score;
}

double score_dmfi_b(ScorerBackend& abnormal, ScorerBackend& normal,
                    const prompts::PromptRecord& prompt, double margin_scale) {
    double s_abn = abnormal.score(prompt).score;
    double s_norm = normal.score(prompt).score;
    return sigmoid(margin_scale * (s_abn - s_norm));
}

std::vector<ScoreOutcome> batch_score(ScorerBackend& backend,
                                      const std::vector<prompts::PromptRecord>& prompt_list,
                                      unsigned parallelism) {
    if (parallelism < 1) throw UsageError("batch_score: parallelism must be >= 1");
    std::vector<ScoreOutcome> outcomes(prompt_list.size());

    auto worker = [&](std::atomic<std::size_t>& next) {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= prompt_list.size()) return;
            try {
                outcomes[i].score = backend.score(prompt_list[i]).score;
            } catch (const std::exception& e) {
                outcomes[i].error = e.what();
            }
        }
    };

    std::atomic<std::size_t> next{0};
    unsigned thread_count = unsigned(std::min<std::size_t>(parallelism, prompt_list.size()));
    if (thread_count <= 1) {
        worker(next);
        return outcomes;
    }
    std::vector<std::thread> threads;
    threads.reserve(thread_count);
    for (unsigned t = 0; t < thread_count; ++t) threads.emplace_back([&] { worker(next); });
    for (auto& t : threads) t.join();
    return outcomes;
}

StrategyScorer StrategyScorer::unified(BackendPtr mix) {
    StrategyScorer s;
    s.strategy_ = prompts::Strategy::DmfiA;
    s.primary_ = std::move(mix);
    return s;
}

StrategyScorer StrategyScorer::dual(BackendPtr abnormal, BackendPtr normal, double margin_scale) {
    StrategyScorer s;
    s.strategy_ = prompts::Strategy::DmfiB;
    s.primary_ = std::move(abnormal);
    s.normal_ = std::move(normal);
    s.margin_scale_ = margin_scale;
    return s;
}

ScoreResult StrategyScorer::apply(const prompts::PromptRecord& prompt) const {
    if (strategy_ == prompts::Strategy::DmfiA) return primary_->score(prompt);
    ScoreResult abn = primary_->score(prompt);
    ScoreResult norm = normal_->score(prompt);
    ScoreResult out;
    out.score = sigmoid(margin_scale_ * (abn.score - norm.score));
    out.explanation = abn.explanation ? abn.explanation : norm.explanation;
    return out;
}

}  // namespace dmfi::scorer
