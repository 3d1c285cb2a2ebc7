// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fleet.hpp"
#include "interval_set.hpp"
#include "program.hpp"
#include "scheduler.hpp"
#include "units.hpp"

namespace fgp {

enum class EventKind {
    job_submitted,
    tasks_allocated,
    task_up,
    task_down,
    all_up_begin,
    all_up_end,
    step_committed,
    checkpoint_begin,
    checkpoint_committed,
    failure,
    preemption,
    restore_begin,
    restore_end,
    job_completed,
    unschedulable,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

// Static description of a job, carried by its job_submitted event so metrics
// can be computed from the trace alone.
struct JobInfo {
    int tasks = 1;
    Phase phase = Phase::training;
    std::string chip_kind;
    std::string generation_tag;
    SizeClass size_class = SizeClass::small;
    std::string framework_tag;
    std::string runtime_tag;
    int priority = 0;
    std::int64_t work = 0;
    std::string graph;
    std::int64_t flops_per_step = 0;
    double ideal_step_seconds = 0.0;  // flops / (peak x chips)

    friend bool operator==(const JobInfo&, const JobInfo&) = default;
};

// `steps` consecutive steps of equal duration starting at `start`.
struct StepRun {
    Micros start = 0;
    std::int64_t steps = 0;
    Micros step_us = 0;
    Boundedness bound = Boundedness::device;

    Micros end() const { return start + steps * step_us; }
    friend bool operator==(const StepRun&, const StepRun&) = default;
};

enum class CheckpointMode { sync, async, shard_barrier };
std::string_view to_string(CheckpointMode mode);

struct Event {
    std::int64_t seq = 0;
    Micros time = 0;
    EventKind kind = EventKind::job_submitted;
    std::string job_id;
    std::int64_t chips = 0;  // chips of the job, or of the task for task_up/task_down

    std::optional<JobInfo> job;              // job_submitted
    std::string pod;                         // tasks_allocated, failure
    std::vector<int> origin;                 // tasks_allocated
    std::vector<int> shape;                  // tasks_allocated
    int incarnation = 0;                     // tasks_allocated
    int task = -1;                           // task_up, task_down
    std::optional<StepRun> run;              // step_committed
    std::int64_t step = 0;                   // checkpoint_begin target, checkpoint_committed cumulative count
    CheckpointMode mode = CheckpointMode::sync;  // checkpoint_begin
    Micros write_us = 0;                     // checkpoint_begin
    bool implicit_commit = false;            // checkpoint_committed at completion without a write
    std::vector<Interval> lost;              // all_up_end: executed but never committed stepping time
    std::string reason;                      // all_up_end, unschedulable
    std::vector<int> chip;                   // failure
    std::string by;                          // preemption

    friend bool operator==(const Event&, const Event&) = default;
};

struct TraceHeader {
    std::string scenario_name;
    std::string scenario_hash;
    std::map<std::string, std::string> sections;
    std::uint64_t seed = 0;
    Micros horizon = 0;
    nlohmann::json fleet;  // chip kinds, pods, thresholds

    friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct Trace {
    TraceHeader header;
    Fleet fleet;
    std::vector<Event> events;
};

inline constexpr std::string_view kTraceFormat = "fgp-trace/1";

nlohmann::json fleet_to_json(const Fleet& fleet);
Fleet fleet_from_json(const nlohmann::json& fleet);

void write_trace(const Trace& trace, std::ostream& out);
std::string serialize_trace(const Trace& trace);
// Throws TraceCorruption with the 1-based line number of the first bad line.
Trace read_trace(std::istream& in);
Trace parse_trace(const std::string& text);

void save_trace_file(const Trace& trace, const std::string& path);
Trace load_trace_file(const std::string& path);

}  // namespace fgp
