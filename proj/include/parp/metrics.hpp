// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Post-hoc analysis of a run trace. The report is computed purely from
// the JSONL records a run emits, so it can be produced from a trace file
// long after the simulation finished.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace parp {

nlohmann::json build_report(const std::vector<nlohmann::json>& trace);

std::string format_report(const nlohmann::json& report);

}  // namespace parp
