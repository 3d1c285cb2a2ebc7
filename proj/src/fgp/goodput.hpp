// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "interval_set.hpp"
#include "trace.hpp"
#include "units.hpp"

namespace fgp {

// One up or down transition of a single task.
struct TaskTransition {
    std::int64_t seq = 0;
    Micros time = 0;
    int task = 0;
    bool up = true;
};

// Intersection of every task's up time for one incarnation. Tasks still up
// at the end are closed at `horizon`. A task that never comes up makes the
// result empty. Bad pairing (up twice, down while down, task out of range)
// throws TraceCorruption naming the event sequence number.
IntervalSet all_allocated_intervals(const std::vector<TaskTransition>& transitions, int tasks, Micros horizon);
// Per-task up sets, same pairing rules.
std::vector<IntervalSet> task_up_intervals(const std::vector<TaskTransition>& transitions, int tasks, Micros horizon);

// Everything the metrics need about one job, replayed from a trace.
struct JobRecord {
    std::string job_id;
    JobInfo info;
    std::int64_t chips = 0;
    Micros submitted = 0;
    std::optional<Micros> completed;
    IntervalSet all_allocated;              // union over incarnations
    std::vector<std::pair<std::int64_t, IntervalSet>> task_up;  // (chips per task, up set) per task and incarnation
    std::vector<StepRun> committed;
    IntervalSet busy;  // committed stepping, lost stepping, blocking checkpoint writes
    std::int64_t committed_steps = 0;
};

class TraceIndex {
public:
    explicit TraceIndex(const Trace& trace);

    const Fleet& fleet() const { return fleet_; }
    Micros horizon() const { return horizon_; }
    const std::vector<JobRecord>& jobs() const { return jobs_; }

private:
    Fleet fleet_;
    Micros horizon_ = 0;
    std::vector<JobRecord> jobs_;  // sorted by job id
};

enum class SegmentDimension { chip_kind, generation_tag, size_class, phase, framework_tag, runtime_tag };

std::string_view to_string(SegmentDimension d);
std::optional<SegmentDimension> parse_segment_dimension(std::string_view text);
std::string segment_value(const JobInfo& info, SegmentDimension d);

struct Scope {
    enum class Kind { fleet, segment, job };
    Kind kind = Kind::fleet;
    SegmentDimension dimension = SegmentDimension::chip_kind;
    std::string value;  // segment value or job id

    static Scope whole_fleet() { return {}; }
    static Scope segment(SegmentDimension d, std::string v) { return {Kind::segment, d, std::move(v)}; }
    static Scope job(std::string id) { return {Kind::job, SegmentDimension::chip_kind, std::move(id)}; }

    bool includes(const JobRecord& job) const;
    std::string label() const;
};

struct Ratio {
    double value = 0.0;
    double num = 0.0;
    double den = 0.0;
};

// Chip-time quantities are in chip-microseconds internally; Ratio carries
// them as chip-seconds.
Ratio scheduling_goodput(const TraceIndex& index, TimeWindow window, const Scope& scope);
Ratio runtime_goodput(const TraceIndex& index, TimeWindow window, const Scope& scope);
Ratio program_goodput(const TraceIndex& index, TimeWindow window, const Scope& scope);
double mpg(std::optional<double> sg, std::optional<double> rg, std::optional<double> pg);

// Exact integer sums behind the ratios.
struct ScopeTotals {
    ChipMicros allocated = 0;  // SG numerator
    ChipMicros demand = 0;     // segment/job SG denominator
    ChipMicros capacity = 0;   // fleet SG denominator
    ChipMicros committed = 0;  // RG numerator
    double ideal = 0.0;        // PG numerator, chip-microseconds
    ChipMicros occupied = 0;   // per-task allocated chip-time
    ChipMicros busy = 0;       // per-chip busy time
    bool zero_flops = false;   // some committed work has no ideal FLOPs
    int jobs = 0;
};

ScopeTotals scope_totals(const TraceIndex& index, TimeWindow window, const Scope& scope);

struct LegacyMetrics {
    double capacity_chip_seconds = 0.0;
    double occupancy = 0.0;
    std::optional<double> duty_cycle;  // undefined when nothing was allocated
};

LegacyMetrics legacy_metrics(const TraceIndex& index, TimeWindow window);

struct GoodputReport {
    std::string scope;
    TimeWindow window;
    double sg_num = 0, sg_den = 0, rg_num = 0, rg_den = 0, pg_num = 0, pg_den = 0;  // chip-seconds
    std::optional<double> sg, rg, pg, mpg;
    std::vector<std::string> flags;
};

// Never throws for undefined components; they are left empty and flagged.
GoodputReport make_report(const TraceIndex& index, TimeWindow window, const Scope& scope);

std::string report_csv_header();
std::string report_csv_row(const GoodputReport& report);
std::string reports_csv(const std::vector<GoodputReport>& reports);

}  // namespace fgp
