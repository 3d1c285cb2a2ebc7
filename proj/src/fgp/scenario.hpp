// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fleet.hpp"
#include "program.hpp"
#include "scheduler.hpp"
#include "units.hpp"

namespace fgp {

struct RuntimeParams {
    double init_time = 0.0;     // chip init + program load/compile, seconds
    double compile_time = 0.0;  // part of init_time skipped by aot_compile on a cached program
    std::int64_t checkpoint_interval = 1;  // steps
    double checkpoint_write_time = 0.0;
    bool async_checkpoint = false;
    bool aot_compile = false;
    double restore_time = 0.0;
    std::int64_t shards = 1;          // bulk inference only
    double shard_barrier_wait = 0.0;  // bulk inference only, seconds per shard
};

struct JobSpec {
    JobRequest request;
    int tasks = 1;
    std::string graph;
    StepProfile profile;
    RuntimeParams runtime;
};

struct ScheduledPass {
    Micros time = 0;
    CompilerPass pass;
    std::vector<std::string> jobs;  // empty: every job
};

struct InjectedFailure {
    Micros time = 0;
    std::string pod;
    std::vector<int> chip;
};

struct FailureModel {
    bool enabled = false;  // random per-chip failures from chip-kind MTBF
    std::vector<InjectedFailure> injected;
};

struct SchedulerConfig {
    EvictionPolicy policy;
    Micros task_startup_stagger = 0;  // delay between consecutive task start-ups of one job
    VictimSearchLimits limits;
};

// Section digests used to decide whether two runs differ only in one factor.
struct SectionHashes {
    std::string fleet, workload, program, runtime, scheduler, failures, run;
    std::map<std::string, std::string> as_map() const;
};

struct Scenario {
    std::string name;
    Fleet fleet;
    std::vector<OpGraph> graphs;
    std::vector<JobSpec> jobs;
    SchedulerConfig scheduler;
    std::vector<ScheduledPass> passes;
    FailureModel failures;
    Micros horizon = 0;
    std::uint64_t seed = 0;

    nlohmann::json canonical;  // fully resolved form, defaults filled in
    std::string hash;
    SectionHashes sections;

    const OpGraph& graph(const std::string& label) const;
};

// Validates the document; unknown keys and dangling references are rejected
// with a ConfigError naming the field path.
Scenario parse_scenario(const nlohmann::json& document);

// IoError when unreadable, ConfigError when malformed or invalid.
nlohmann::json read_json_file(const std::string& path);
Scenario load_scenario_file(const std::string& path);

// Overwrites the numeric or boolean field at `path` (e.g.
// "jobs[0].runtime.checkpoint_interval", "jobs[*].runtime.async_checkpoint").
// Throws ConfigError when the path does not address such a field or the value
// does not parse as its type.
void set_param(nlohmann::json& document, const std::string& path, const std::string& value);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace fgp
