// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "duallane/simnet.hpp"

namespace fs = std::filesystem;
using namespace duallane;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSafetyViolation = 1;
constexpr int kExitUsage = 2;

std::string default_out_dir() {
    const char* env = std::getenv("DUALLANE_OUT");
    return env != nullptr ? env : "out";
}

void write_report(const RunReport& report, const fs::path& dir) {
    fs::create_directories(dir);
    report.trace.write_file((dir / "trace.jsonl").string());
    nlohmann::json j;
    for (const auto& [k, v] : report.metrics.to_kv()) j["metrics"][k] = v;
    for (const auto& c : report.checks) {
        j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    j["safety_ok"] = report.safety_ok;
    std::ofstream out(dir / "report.json");
    out << j.dump(2) << "\n";
}

void print_checks(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks) {
        std::cout << (c.passed ? "[pass] " : "[FAIL] ") << c.name;
        if (!c.detail.empty()) std::cout << " - " << c.detail;
        std::cout << "\n";
    }
}

int cmd_run_scenario(const std::string& path, std::optional<std::uint64_t> seed,
                     const std::string& out_dir, bool quiet) {
    auto scenario = load_scenario_file(path);
    if (!scenario.ok()) {
        std::cerr << "bad scenario: " << scenario.error().detail << "\n";
        return kExitUsage;
    }
    Scenario sc = scenario.value();
    if (seed.has_value()) sc.seed = *seed;
    RunReport report = run_scenario(sc);
    write_report(report, out_dir);
    if (!quiet) {
        for (const auto& [k, v] : report.metrics.to_kv()) {
            std::cout << k << " = " << v << "\n";
        }
        print_checks(report.checks);
        std::cout << "trace: " << (fs::path(out_dir) / "trace.jsonl").string() << "\n";
    }
    return report.safety_ok ? kExitOk : kExitSafetyViolation;
}

int cmd_verify_trace(const std::string& path) {
    TraceLog log;
    try {
        log = TraceLog::read_file(path);
    } catch (const std::exception& e) {
        std::cerr << "corrupt trace: " << e.what() << "\n";
        return kExitUsage;
    }
    // Run metadata embedded by the harness names the caught-up validators
    // and the quorum threshold.
    std::vector<std::string> correct;
    Stake quorum = 0;
    for (const auto& ev : log.events()) {
        if (ev.kind != "run_meta") continue;
        std::istringstream names(ev.field("correct"));
        std::string name;
        correct.clear();
        while (std::getline(names, name, ',')) {
            if (!name.empty()) correct.push_back(name);
        }
        quorum = ev.field_u64("quorum");
    }
    if (quorum == 0) {
        std::cerr << "corrupt trace: missing run metadata\n";
        return kExitUsage;
    }
    auto checks = run_safety_checks(log.events(), correct, quorum);
    print_checks(checks);
    return all_passed(checks) ? kExitOk : kExitSafetyViolation;
}

int cmd_bench(const std::string& path, const std::string& loads_csv, const std::string& out_dir) {
    auto scenario = load_scenario_file(path);
    if (!scenario.ok()) {
        std::cerr << "bad scenario: " << scenario.error().detail << "\n";
        return kExitUsage;
    }
    std::vector<std::uint32_t> loads;
    std::istringstream in(loads_csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) loads.push_back(static_cast<std::uint32_t>(std::stoul(item)));
    }
    if (loads.empty()) {
        std::cerr << "no loads given\n";
        return kExitUsage;
    }
    std::cout << "clients  settled  cert/ktick  ops/ktick  fin_p50  fin_p90  set_p50  set_p90\n";
    nlohmann::json rows = nlohmann::json::array();
    for (std::uint32_t load : loads) {
        Scenario sc = scenario.value();
        sc.workload.clients = load;
        RunReport report = run_scenario(sc);
        const Metrics& m = report.metrics;
        const bool shared_lane = sc.workload.kind == WorkloadKind::shared ||
                                 sc.workload.kind == WorkloadKind::shared_read;
        auto fin = m.latencies(shared_lane, false);
        auto set = m.latencies(shared_lane, true);
        const double ops_rate = m.end_time > 0 ? static_cast<double>(m.settled_ops) * 1000.0 /
                                                     static_cast<double>(m.end_time)
                                               : 0.0;
        std::printf("%7u  %7llu  %10.2f  %9.2f  %7.0f  %7.0f  %7.0f  %7.0f\n", load,
                    static_cast<unsigned long long>(m.distinct_effcerts), m.certs_per_kilotick(),
                    ops_rate, Metrics::percentile(fin, 0.5), Metrics::percentile(fin, 0.9),
                    Metrics::percentile(set, 0.5), Metrics::percentile(set, 0.9));
        rows.push_back({{"clients", load},
                        {"settled", m.distinct_effcerts},
                        {"certs_per_kilotick", m.certs_per_kilotick()},
                        {"ops_per_kilotick", ops_rate},
                        {"finality_p50", Metrics::percentile(fin, 0.5)},
                        {"settlement_p50", Metrics::percentile(set, 0.5)}});
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream out(fs::path(out_dir) / "bench.json");
        out << rows.dump(2) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid broadcast/consensus settlement simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = default_out_dir();
    std::optional<std::uint64_t> seed;
    bool quiet = false;

    auto* run = app.add_subcommand("run-scenario", "run a scenario and check safety invariants");
    run->add_option("--scenario", scenario_path, "scenario config (JSON)")->required();
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--out", out_dir, "output directory (default $DUALLANE_OUT or ./out)");
    run->add_flag("--quiet", quiet, "suppress the metrics dump");

    std::string trace_path;
    auto* verify = app.add_subcommand("verify-trace", "re-run safety checks on a stored trace");
    verify->add_option("--trace", trace_path, "trace file (JSONL)")->required();

    std::string loads = "1,2,4";
    auto* bench = app.add_subcommand("bench", "sweep offered load and tabulate latency");
    bench->add_option("--scenario", scenario_path, "scenario config (JSON)")->required();
    bench->add_option("--loads", loads, "comma-separated client counts");
    bench->add_option("--out", out_dir, "output directory for bench.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run_scenario(scenario_path, seed, out_dir, quiet);
        if (verify->parsed()) return cmd_verify_trace(trace_path);
        if (bench->parsed()) return cmd_bench(scenario_path, loads, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
