// Copyright 2026 the duallane project contributors. Licensed under the
// Apache License, Version 2.0. See the LICENSE file at the root of this
// distribution or at http://www.apache.org/licenses/LICENSE-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "duallane/simnet.hpp"

namespace py = pybind11;
using namespace duallane;

namespace {

Scenario parse_scenario(const std::string& config_json) {
    auto sc = scenario_from_json(config_json);
    if (!sc.ok()) throw std::invalid_argument("bad scenario: " + sc.error().detail);
    return sc.value();
}

py::dict report_to_dict(const RunReport& report) {
    py::dict out;
    py::dict metrics;
    for (const auto& [k, v] : report.metrics.to_kv()) metrics[py::str(k)] = v;
    out["metrics"] = metrics;
    py::list checks;
    for (const auto& c : report.checks) {
        py::dict item;
        item["name"] = c.name;
        item["passed"] = c.passed;
        item["detail"] = c.detail;
        checks.append(item);
    }
    out["checks"] = checks;
    out["safety_ok"] = report.safety_ok;
    py::list txs;
    for (const auto& tx : report.metrics.txs) {
        py::dict item;
        item["client"] = tx.client;
        item["digest"] = tx.digest;
        item["epoch"] = tx.epoch;
        item["submit_time"] = tx.submit_time;
        item["finality"] = tx.finality ? py::object(py::cast(*tx.finality)) : py::none();
        item["settlement"] = tx.settlement ? py::object(py::cast(*tx.settlement)) : py::none();
        item["waves"] = tx.waves;
        item["shared"] = tx.shared;
        item["ops"] = tx.ops;
        item["note"] = tx.note;
        txs.append(item);
    }
    out["txs"] = txs;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "hybrid broadcast/consensus settlement simulator (native core)";

    m.def(
        "run_scenario",
        [](const std::string& config_json, py::object seed, py::object trace_path) {
            Scenario sc = parse_scenario(config_json);
            if (!seed.is_none()) sc.seed = seed.cast<std::uint64_t>();
            RunReport report = run_scenario(sc);
            py::dict out = report_to_dict(report);
            if (!trace_path.is_none()) {
                report.trace.write_file(trace_path.cast<std::string>());
                out["trace_path"] = trace_path;
            }
            return out;
        },
        py::arg("config_json"), py::arg("seed") = py::none(), py::arg("trace_path") = py::none(),
        "Run a scenario given its JSON config; returns metrics, safety checks "
        "and per-transaction records.");

    m.def(
        "verify_trace",
        [](const std::string& path) {
            TraceLog log = TraceLog::read_file(path);
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
            if (quorum == 0) throw std::runtime_error("corrupt trace: missing run metadata");
            py::list out;
            for (const auto& c : run_safety_checks(log.events(), correct, quorum)) {
                py::dict item;
                item["name"] = c.name;
                item["passed"] = c.passed;
                item["detail"] = c.detail;
                out.append(item);
            }
            return out;
        },
        py::arg("path"), "Re-run the safety checks on a stored trace file.");

    m.def("default_scenario", [] {
        return scenario_to_json(Scenario{});
    });

    m.def(
        "lamport_version",
        [](const std::vector<Version>& versions) { return lamport_version(versions); },
        py::arg("input_versions"));

    m.def(
        "derive_object_id",
        [](const std::string& tx_digest_hex, std::uint64_t counter) {
            return derive_object_id(TxDigest{Digest::from_hex(tx_digest_hex)}, counter).hex();
        },
        py::arg("tx_digest_hex"), py::arg("counter"));

    m.def(
        "quorum_threshold",
        [](std::uint64_t total_stake) {
            return Committee::make(0, {{0, total_stake}}).quorum_threshold();
        },
        py::arg("total_stake"));

    m.def(
        "validity_threshold",
        [](std::uint64_t total_stake) {
            return Committee::make(0, {{0, total_stake}}).validity_threshold();
        },
        py::arg("total_stake"));

    m.def(
        "sha256_hex",
        [](py::bytes data) {
            const std::string raw = data;
            return sha256(std::span<const std::uint8_t>(
                              reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()))
                .hex();
        },
        py::arg("data"));
}
