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

#include "dmfi/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dmfi/errors.hpp"
#include "dmfi/rng.hpp"

namespace dmfi::synth {

namespace {

using namespace std::chrono;

// Fixed pools keep token statistics stable across seeds.
const char* kBenignDomains[] = {
    "weather.com",   "cnn.com",        "espn.com",      "wikipedia.org", "stackoverflow.com",
    "github.com",    "linkedin.com",   "nytimes.com",   "bbc.co.uk",     "reuters.com",
    "amazon.com",    "maps.google.com", "docs.org",     "arstechnica.com", "slashdot.org",
    "accuweather.com", "webmd.com",    "investopedia.com", "baseball.com", "cooking.com",
};

const char* kBenignSentences[] = {
    "Checking the quarterly report numbers before the afternoon sync.",
    "Here are the meeting notes from this morning, please review.",
    "The build pipeline is green again after the dependency update.",
    "Reminder that the team lunch is moved to Thursday at noon.",
    "Draft agenda for the project kickoff is attached for comments.",
    "Can you confirm the vendor invoice was approved last week?",
    "Weekly status update: all milestones are on track.",
    "The conference room booking for Friday has been confirmed.",
};

const char* kBenignFiles[] = {
    "status_report.docx", "meeting_notes.txt", "budget_summary.xlsx", "roadmap.pptx",
};

const char* kExfilFiles[] = {
    "client_database.zip", "product_designs.doc", "source_archive.zip", "contracts_backup.zip",
};

const char* kSensitiveBodies[] = {
    "Attached is the confidential client list you asked about.",
    "Sending the confidential pricing sheet to your personal address.",
    "Here is the confidential merger summary, keep it between us.",
};

const char* kExternalRecipients[] = {
    "dropbox481@gmail.com", "jmiller.backup@yahoo.com", "trade.contact@hotmail.com",
};

enum class Scenario { ExfilDevice, MassExternalEmail, OffhourAccess };

std::string user_id(unsigned i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "U%04u", i + 1);
    return buf;
}

std::string device_id(unsigned i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "PC-%04u", i + 1);
    return buf;
}

/// Consecutive workdays starting Monday 2010-01-04, so benign template
/// sessions always fall inside the default work calendar.
Date workday(unsigned index) {
    Date base = sys_days{year{2010} / January / 4};
    unsigned weeks = index / 5;
    unsigned within = index % 5;
    return base + days{weeks * 7 + within};
}

Timestamp at(Date day, int hour, int minute, int second = 0) {
    return day + hours{hour} + minutes{minute} + seconds{second};
}

struct Generator {
    const SynthConfig& cfg;
    Rng rng;

    EventRecord event(Timestamp ts, const std::string& user, Action action, std::string object,
                      std::string device, std::string content = {}) {
        return EventRecord{ts, user, action, std::move(object), std::move(device),
                           std::move(content)};
    }

    std::string benign_sentence() {
        return kBenignSentences[rng.bounded(std::size(kBenignSentences))];
    }

    void benign_day(std::vector<EventRecord>& out, const std::string& user,
                    const std::string& pc, Date day) {
        int logon_min = int(rng.bounded(60));
        out.push_back(event(at(day, 8, 30 + logon_min / 2), user, Action::Logon, "", pc));

        // Browsing stays within 09:00-16:59 so benign sessions never leave
        // working hours.
        int visits = 2 + int(rng.bounded(5));
        int minute = 40 + logon_min / 2;
        for (int v = 0; v < visits; ++v) {
            minute += 20 + int(rng.bounded(40));
            const char* domain = kBenignDomains[rng.bounded(std::size(kBenignDomains))];
            std::string url = std::string("http://www.") + domain + "/page" +
                              std::to_string(rng.bounded(90) + 10);
            out.push_back(event(at(day, 9 + minute / 60, minute % 60), user, Action::HttpVisit,
                                url, pc, benign_sentence()));
        }

        if (rng.bounded(100) < 60) {
            std::string to = "colleague" + std::to_string(rng.bounded(40) + 1) + "@" +
                             cfg.corporate_domain;
            out.push_back(event(at(day, 13, int(rng.bounded(50))), user, Action::EmailSend, to,
                                pc, benign_sentence()));
        }
        if (rng.bounded(100) < 30) {
            out.push_back(event(at(day, 14, int(rng.bounded(50))), user, Action::FileOpen,
                                kBenignFiles[rng.bounded(std::size(kBenignFiles))], pc,
                                benign_sentence()));
        }
        out.push_back(event(at(day, 17, 10 + int(rng.bounded(45))), user, Action::Logoff, "", pc));
    }

    void inject(std::vector<EventRecord>& out, Scenario scenario, const std::string& user,
                const std::string& pc, Date day, const std::string& other_pc) {
        switch (scenario) {
            case Scenario::ExfilDevice: {
                int h = 20 + int(rng.bounded(3));
                out.push_back(event(at(day, h, 0), user, Action::Logon, "", pc));
                out.push_back(event(at(day, h, 5), user, Action::DeviceConnect, "", pc));
                int copies = 1 + int(rng.bounded(3));
                for (int i = 0; i < copies; ++i)
                    out.push_back(event(at(day, h, 10 + 5 * i), user, Action::FileCopy,
                                        kExfilFiles[rng.bounded(std::size(kExfilFiles))], pc));
                out.push_back(
                    event(at(day, h, 30), user, Action::DeviceDisconnect, "", pc));
                out.push_back(event(at(day, h, 35), user, Action::Logoff, "", pc));
                break;
            }
            case Scenario::MassExternalEmail: {
                int sends = 3 + int(rng.bounded(3));
                for (int i = 0; i < sends; ++i) {
                    const char* to = kExternalRecipients[rng.bounded(std::size(kExternalRecipients))];
                    const char* body = kSensitiveBodies[rng.bounded(std::size(kSensitiveBodies))];
                    out.push_back(event(at(day, 15, 5 + 7 * i), user, Action::EmailSend, to, pc,
                                        body));
                }
                break;
            }
            case Scenario::OffhourAccess: {
                int h = 21 + int(rng.bounded(2));
                out.push_back(event(at(day, h, 0), user, Action::Logon, "", other_pc));
                int opens = 1 + int(rng.bounded(2));
                for (int i = 0; i < opens; ++i)
                    out.push_back(event(at(day, h, 8 + 6 * i), user, Action::FileOpen,
                                        "personnel_review.doc", other_pc));
                out.push_back(event(at(day, h, 25), user, Action::Logoff, "", other_pc));
                break;
            }
        }
    }
};

}  // namespace

ingest::LabeledCorpus generate_corpus(const SynthConfig& cfg) {
    if (!cfg.valid()) throw UsageError("invalid synth config");

    Generator gen{cfg, Rng(cfg.seed)};

    // Pick the injected (user, day) pairs and their scenarios up front so
    // the benign template draws stay aligned across configurations.
    std::size_t total = std::size_t(cfg.users) * cfg.days;
    std::vector<std::size_t> pair_indices(total);
    for (std::size_t i = 0; i < total; ++i) pair_indices[i] = i;
    gen.rng.shuffle(pair_indices);
    std::size_t inject_count = std::size_t(std::llround(cfg.scenario_rate * double(total)));
    pair_indices.resize(inject_count);

    std::map<std::size_t, Scenario> injected;
    std::vector<double> weights = {cfg.scenario_mix.exfil_device,
                                   cfg.scenario_mix.mass_external_email,
                                   cfg.scenario_mix.offhour_access};
    for (std::size_t idx : pair_indices)
        injected[idx] = Scenario(gen.rng.weighted(weights));

    ingest::LabeledCorpus corpus;
    corpus.provenance = "synth(users=" + std::to_string(cfg.users) +
                        ",days=" + std::to_string(cfg.days) + ",seed=" + std::to_string(cfg.seed) +
                        ",rate=" + std::to_string(cfg.scenario_rate) + ")";

    for (unsigned u = 0; u < cfg.users; ++u) {
        std::string user = user_id(u);
        std::string pc = device_id(u);
        std::string other_pc = device_id((u + 1) % cfg.users);
        for (unsigned d = 0; d < cfg.days; ++d) {
            Date day = workday(d);
            std::vector<EventRecord> events;
            gen.benign_day(events, user, pc, day);

            auto it = injected.find(std::size_t(u) * cfg.days + d);
            if (it != injected.end()) gen.inject(events, it->second, user, pc, day, other_pc);

            std::stable_sort(events.begin(), events.end(),
                             [](const EventRecord& a, const EventRecord& b) {
                                 return a.timestamp < b.timestamp;
                             });
            Session s;
            s.user = user;
            s.day = day;
            s.events = std::move(events);
            s.label = it != injected.end() ? Label::Abnormal : Label::Normal;
            if (s.label == Label::Abnormal) corpus.abnormal_index.insert({user, day});
            corpus.sessions.push_back(std::move(s));
        }
    }
    return corpus;
}

}  // namespace dmfi::synth
