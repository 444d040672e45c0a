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

#include <map>
#include <string>
#include <vector>

#include "dmfi/fusion.hpp"
#include "dmfi/ingest.hpp"
#include "dmfi/prompts.hpp"

namespace dmfi::config {

struct ScorerConfig {
    prompts::Strategy strategy = prompts::Strategy::DmfiB;
    std::string backend_kind = "mock";  // mock | http
    std::string endpoint;               // http backend; DMFI_ENDPOINT env fills it when empty
    /// DmfiA expects one id (the mixed model); DmfiB expects two in
    /// (abnormal-branch, normal-branch) order.
    std::vector<std::string> model_ids = {"mock-abn", "mock-norm"};
    unsigned parallelism = 1;
    int timeout_seconds = 30;
    int retries = 3;
    int backoff_initial_ms = 1000;
    bool strict_parse = false;
    double margin_scale = 1.0;
    std::string cache_file;  // empty disables caching
    /// Optional per-model mock rules JSON files.
    std::map<std::string, std::string> rules_files;
};

/// One config object drives every subcommand; all randomness funnels
/// through `seed` so full-pipeline runs reproduce exactly.
struct PipelineConfig {
    std::uint64_t seed = 0;
    std::string corporate_domain = "dtaa.com";
    int utc_offset_minutes = 0;
    WorkCalendar calendar;
    ingest::SplitSpec split;
    bool undersample_train = true;
    fusion::FusionHyper fusion_hyper;
    prompts::SftOptions sft;
    ScorerConfig scorer;

    /// Propagates `seed` into every seeded sub-config.
    void apply_seed(std::uint64_t s);

    /// Throws UsageError on inconsistent settings (e.g. a DmfiB strategy
    /// with one model id).
    void validate() const;

    std::string to_json() const;
    static PipelineConfig from_json(const std::string& json_text);
    static PipelineConfig load_file(const std::string& path);
};

}  // namespace dmfi::config
