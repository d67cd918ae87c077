// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Declarative simulation runs. A scenario file describes the world
// (parameters, actors, balances), a script of timed actions, and a set of
// expectations checked after the run. The same scenario with the same
// seed always produces the same trace.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "parp/simnet.hpp"

namespace parp {

struct ScenarioClient {
    std::string name;
    uint64_t balance = 10000;
    uint64_t budget = 100;
    uint64_t probe_every = 8;
    uint64_t hs_timeout = 50;
    uint64_t response_timeout = 30;
};

struct ScenarioNode {
    std::string name;
    uint64_t balance = 5000;
    uint64_t deposit = 3000;
    uint64_t consent_ttl = 64;
    FeeSchedule fees;
    BehaviorPolicy policy;
};

struct ScriptAction {
    uint64_t at = 0;
    uint64_t every = 0;  // 0: fire once at `at`
    uint64_t until = 0;  // 0: open-ended
    std::string op;      // handshake | call | close | node_close | spam
    std::string client;
    std::string node;
    std::string method;  // for call
    std::string of;      // account name for get_balance
    uint64_t bytes = 100;
    uint64_t count = 1;
};

struct Scenario {
    std::string name;
    uint64_t seed = 1;
    uint64_t horizon = 600;
    uint64_t block_interval = 10;
    uint64_t delay_min = 1;
    uint64_t delay_max = 3;
    ChainParams params;
    uint64_t witness_balance = 100;
    std::vector<ScenarioClient> clients;
    std::vector<ScenarioNode> nodes;
    std::vector<ScriptAction> script;
    nlohmann::json expect;
};

struct Overrides {
    std::optional<uint64_t> seed;
    std::optional<uint64_t> horizon;
    std::optional<uint64_t> dispute_window;
    std::optional<uint64_t> block_interval;
};

struct RunOutcome {
    bool ok = true;
    std::vector<std::string> failures;
    nlohmann::json summary;
};

// Parses a scenario document. Returns an error message on malformed input.
Result<Scenario, std::string> parse_scenario(const nlohmann::json& doc);
Result<Scenario, std::string> load_scenario_file(const std::string& path);

RunOutcome run_scenario(const Scenario& scenario, const Overrides& overrides, TraceSink sink);

}  // namespace parp
