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
#include <string>

#include "dmfi/ingest.hpp"

namespace dmfi::synth {

/// Marker planted in the email bodies of injected mass-mail scenarios.
/// The default mock scorer rule table keys on the same phrase; the pair is
/// a deliberate test fixture that makes end-to-end detection quality a
/// property of the pipeline wiring rather than of any real model.
inline constexpr const char* kPlantedContentMarker = "confidential";

struct ScenarioMix {
    double exfil_device = 1.0;
    double mass_external_email = 1.0;
    double offhour_access = 1.0;
};

struct SynthConfig {
    unsigned users = 10;
    unsigned days = 5;
    std::uint64_t seed = 0;
    /// Fraction of (user, day) pairs that receive an injected scenario.
    double scenario_rate = 0.1;
    std::string corporate_domain = "dtaa.com";
    ScenarioMix scenario_mix;

    bool valid() const {
        return users > 0 && days > 0 && scenario_rate >= 0.0 && scenario_rate <= 0.5 &&
               scenario_mix.exfil_device >= 0.0 && scenario_mix.mass_external_email >= 0.0 &&
               scenario_mix.offhour_access >= 0.0 &&
               (scenario_mix.exfil_device + scenario_mix.mass_external_email +
                scenario_mix.offhour_access) > 0.0;
    }
};

/// Generates users x days sessions on consecutive workdays. Benign
/// sessions follow a templated weekday pattern (logon, browsing in a fixed
/// benign domain pool, occasional internal email, logoff, all within work
/// hours); injected sessions overlay one scenario: after-hours device
/// exfiltration, mass external email with the planted content marker, or
/// after-hours access on another user's device. Labels equal the injection
/// set exactly. Byte-deterministic for a fixed seed.
ingest::LabeledCorpus generate_corpus(const SynthConfig& cfg);

}  // namespace dmfi::synth
