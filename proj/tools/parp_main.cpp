// Copyright 2026 The PARP Simulator Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command line front end. `run` executes one scenario file and checks its
// expectations, `report` summarizes a previously written trace, `suite`
// runs every scenario in a directory. Exit codes: 0 success, 1 expectation
// failure, 2 usage or input errors.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "parp/metrics.hpp"
#include "parp/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunFlags {
    std::optional<uint64_t> seed;
    std::optional<uint64_t> horizon;
    std::optional<uint64_t> dispute_window;
    std::optional<double> blocks_per_tick;
    std::string out;
    bool with_report = false;
    bool as_json = false;
};

parp::Overrides to_overrides(const RunFlags& f) {
    parp::Overrides o;
    o.seed = f.seed;
    o.horizon = f.horizon;
    o.dispute_window = f.dispute_window;
    if (f.blocks_per_tick) {
        // The engine steps in ticks; a rate below one block per tick maps
        // to the nearest whole number of ticks between blocks.
        auto interval = std::llround(1.0 / *f.blocks_per_tick);
        o.block_interval = static_cast<uint64_t>(std::max<long long>(1, interval));
    }
    return o;
}

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--seed", f.seed, "Override the scenario seed");
    cmd->add_option("--horizon", f.horizon, "Override the tick horizon");
    cmd->add_option("--dispute-window", f.dispute_window, "Override the dispute window (blocks)");
    cmd->add_option("--blocks-per-tick", f.blocks_per_tick, "Block production rate")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", f.out, "Write the trace as JSONL to this path");
}

int run_one(const std::string& path, const RunFlags& flags, bool print_detail) {
    auto loaded = parp::load_scenario_file(path);
    if (!loaded.ok()) {
        std::cerr << "error: " << loaded.error() << "\n";
        return 2;
    }

    std::ofstream out;
    std::vector<json> collected;
    if (!flags.out.empty()) {
        out.open(flags.out);
        if (!out) {
            std::cerr << "error: cannot write trace file: " << flags.out << "\n";
            return 2;
        }
    }
    parp::TraceSink sink = [&](const json& rec) {
        if (out.is_open()) out << rec.dump() << "\n";
        if (flags.with_report) collected.push_back(rec);
    };

    parp::RunOutcome outcome = parp::run_scenario(loaded.value(), to_overrides(flags), sink);

    const std::string name = outcome.summary.value("scenario", path);
    if (print_detail) {
        if (flags.as_json) {
            json doc = {{"scenario", name},
                        {"ok", outcome.ok},
                        {"failures", outcome.failures},
                        {"summary", outcome.summary}};
            std::cout << doc.dump(2) << "\n";
        } else {
            std::cout << "scenario " << name << ": " << (outcome.ok ? "PASS" : "FAIL") << "\n";
            std::cout << "  height " << outcome.summary.value("height", uint64_t{0})
                      << ", treasury " << outcome.summary.value("treasury", uint64_t{0})
                      << ", conservation "
                      << (outcome.summary.value("conservation", false) ? "OK" : "VIOLATED")
                      << "\n";
            for (const auto& f : outcome.failures) std::cout << "  " << f << "\n";
            if (flags.with_report) {
                std::cout << "\n" << parp::format_report(parp::build_report(collected));
            }
        }
    } else {
        std::cout << (outcome.ok ? "PASS " : "FAIL ") << name << "\n";
        for (const auto& f : outcome.failures) std::cout << "    " << f << "\n";
    }
    return outcome.ok ? 0 : 1;
}

int report_main(const std::string& path, bool as_json) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open trace file: " << path << "\n";
        return 2;
    }
    std::vector<json> trace;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded()) {
            std::cerr << "error: " << path << ":" << lineno << ": invalid JSON record\n";
            return 2;
        }
        trace.push_back(std::move(rec));
    }
    json report = parp::build_report(trace);
    if (as_json)
        std::cout << report.dump(2) << "\n";
    else
        std::cout << parp::format_report(report);
    return 0;
}

int suite_main(const std::string& dir, const RunFlags& flags, const std::string& trace_dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        std::cerr << "error: not a directory: " << dir << "\n";
        return 2;
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cerr << "error: no scenario files in " << dir << "\n";
        return 2;
    }
    if (!trace_dir.empty()) {
        fs::create_directories(trace_dir, ec);
        if (ec) {
            std::cerr << "error: cannot create " << trace_dir << "\n";
            return 2;
        }
    }
    int worst = 0;
    for (const auto& f : files) {
        RunFlags per = flags;
        if (!trace_dir.empty())
            per.out = (fs::path(trace_dir) / f.stem()).string() + ".jsonl";
        int rc = run_one(f.string(), per, false);
        worst = std::max(worst, rc);
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PARP protocol simulator"};
    app.require_subcommand(1);

    RunFlags run_flags;
    std::string scenario_path;
    CLI::App* run = app.add_subcommand("run", "Run one scenario and check its expectations");
    run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    add_run_flags(run, run_flags);
    run->add_flag("--report", run_flags.with_report, "Print the metrics report after the run");
    run->add_flag("--json", run_flags.as_json, "Emit the outcome as JSON");

    std::string trace_path;
    bool report_json = false;
    CLI::App* report = app.add_subcommand("report", "Summarize a trace file");
    report->add_option("trace", trace_path, "Trace JSONL file")->required();
    report->add_flag("--json", report_json, "Emit the report as JSON");

    RunFlags suite_flags;
    std::string suite_dir;
    std::string suite_trace_dir;
    CLI::App* suite = app.add_subcommand("suite", "Run every scenario in a directory");
    suite->add_option("dir", suite_dir, "Directory of scenario JSON files")->required();
    add_run_flags(suite, suite_flags);
    suite->add_option("--trace-dir", suite_trace_dir, "Write one trace per scenario here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (run->parsed()) return run_one(scenario_path, run_flags, true);
    if (report->parsed()) return report_main(trace_path, report_json);
    return suite_main(suite_dir, suite_flags, suite_trace_dir);
}
