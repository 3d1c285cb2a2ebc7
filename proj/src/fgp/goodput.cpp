// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#include "goodput.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "errors.hpp"

namespace fgp {

std::vector<IntervalSet> task_up_intervals(const std::vector<TaskTransition>& transitions, int tasks, Micros horizon) {
    std::vector<IntervalSet> up(static_cast<std::size_t>(std::max(tasks, 0)));
    std::vector<std::optional<Micros>> open(up.size());
    for (const auto& tr : transitions) {
        if (tr.task < 0 || tr.task >= tasks) {
            throw TraceCorruption(fmt::format("task {} out of range for {} tasks", tr.task, tasks), 0, tr.seq);
        }
        auto& slot = open[static_cast<std::size_t>(tr.task)];
        if (tr.up) {
            if (slot) throw TraceCorruption(fmt::format("task {} up twice", tr.task), 0, tr.seq);
            slot = tr.time;
        } else {
            if (!slot) throw TraceCorruption(fmt::format("task {} down while not up", tr.task), 0, tr.seq);
            if (tr.time < *slot) throw TraceCorruption(fmt::format("task {} down before up", tr.task), 0, tr.seq);
            up[static_cast<std::size_t>(tr.task)].add({*slot, tr.time});
            slot.reset();
        }
    }
    for (std::size_t k = 0; k < open.size(); ++k) {
        if (open[k] && *open[k] < horizon) up[k].add({*open[k], horizon});
    }
    return up;
}

IntervalSet all_allocated_intervals(const std::vector<TaskTransition>& transitions, int tasks, Micros horizon) {
    const auto up = task_up_intervals(transitions, tasks, horizon);
    if (up.empty()) return {};
    return intersect_all(up);
}

namespace {

struct Building {
    JobRecord record;
    std::vector<TaskTransition> transitions;  // current incarnation
    bool live = false;
    std::int64_t last_checkpoint = 0;
    bool seen_completion = false;
};

void close_incarnation(Building& b, Micros horizon) {
    if (!b.live) return;
    const int tasks = b.record.info.tasks;
    const auto up = task_up_intervals(b.transitions, tasks, horizon);
    const std::int64_t per_task = b.record.chips / tasks;
    for (const auto& s : up) b.record.task_up.emplace_back(per_task, s);
    b.record.all_allocated = b.record.all_allocated.unite(intersect_all(up));
    b.transitions.clear();
    b.live = false;
}

}  // namespace

TraceIndex::TraceIndex(const Trace& trace) : fleet_(trace.fleet), horizon_(trace.header.horizon) {
    std::map<std::string, Building> jobs;
    std::vector<Interval> blocking_writes;
    for (const auto& e : trace.events) {
        auto it = jobs.find(e.job_id);
        if (e.kind == EventKind::job_submitted) {
            if (it != jobs.end()) throw TraceCorruption("job '" + e.job_id + "' submitted twice", 0, e.seq);
            if (!e.job) throw TraceCorruption("job_submitted without job info", 0, e.seq);
            if (e.job->tasks < 1 || e.chips < 1 || e.chips % e.job->tasks != 0) {
                throw TraceCorruption("job '" + e.job_id + "' has inconsistent chip and task counts", 0, e.seq);
            }
            Building b;
            b.record.job_id = e.job_id;
            b.record.info = *e.job;
            b.record.chips = e.chips;
            b.record.submitted = e.time;
            jobs.emplace(e.job_id, std::move(b));
            continue;
        }
        if (it == jobs.end()) throw TraceCorruption("event for unknown job '" + e.job_id + "'", 0, e.seq);
        Building& b = it->second;
        if (b.seen_completion) throw TraceCorruption("event after job_completed for '" + e.job_id + "'", 0, e.seq);
        switch (e.kind) {
            case EventKind::tasks_allocated:
                if (b.live) {
                    int balance = 0;
                    for (const auto& t : b.transitions) balance += t.up ? 1 : -1;
                    if (balance != 0) throw TraceCorruption("allocation while tasks are still up", 0, e.seq);
                    close_incarnation(b, horizon_);
                }
                b.live = true;
                break;
            case EventKind::task_up:
            case EventKind::task_down:
                if (!b.live) throw TraceCorruption("task transition without allocation", 0, e.seq);
                b.transitions.push_back({e.seq, e.time, e.task, e.kind == EventKind::task_up});
                break;
            case EventKind::step_committed: {
                if (!e.run || e.run->steps < 1 || e.run->step_us < 1) {
                    throw TraceCorruption("malformed step run", 0, e.seq);
                }
                b.record.committed.push_back(*e.run);
                b.record.committed_steps += e.run->steps;
                b.record.busy.add({e.run->start, e.run->end()});
                break;
            }
            case EventKind::checkpoint_begin:
                if (e.mode == CheckpointMode::sync && e.write_us > 0) {
                    b.record.busy = b.record.busy.unite(IntervalSet{{e.time, e.time + e.write_us}});
                }
                break;
            case EventKind::checkpoint_committed:
                if (e.step < b.last_checkpoint) throw TraceCorruption("committed step count decreased", 0, e.seq);
                b.last_checkpoint = e.step;
                break;
            case EventKind::all_up_end:
                for (const auto& lost : e.lost) {
                    if (lost.end > lost.begin) b.record.busy = b.record.busy.unite(IntervalSet{lost});
                }
                break;
            case EventKind::job_completed:
                b.record.completed = e.time;
                b.seen_completion = true;
                break;
            default:
                break;
        }
    }
    jobs_.reserve(jobs.size());
    for (auto& [id, b] : jobs) {
        close_incarnation(b, horizon_);
        // A write cut short by a kill only counts while the job held its chips.
        b.record.busy = b.record.busy.intersect(b.record.all_allocated);
        jobs_.push_back(std::move(b.record));
    }
}

std::string_view to_string(SegmentDimension d) {
    switch (d) {
        case SegmentDimension::chip_kind: return "chip_kind";
        case SegmentDimension::generation_tag: return "generation_tag";
        case SegmentDimension::size_class: return "size_class";
        case SegmentDimension::phase: return "phase";
        case SegmentDimension::framework_tag: return "framework_tag";
        case SegmentDimension::runtime_tag: return "runtime_tag";
    }
    return "?";
}

std::optional<SegmentDimension> parse_segment_dimension(std::string_view text) {
    for (auto d : {SegmentDimension::chip_kind, SegmentDimension::generation_tag, SegmentDimension::size_class,
                   SegmentDimension::phase, SegmentDimension::framework_tag, SegmentDimension::runtime_tag}) {
        if (to_string(d) == text) return d;
    }
    return std::nullopt;
}

std::string segment_value(const JobInfo& info, SegmentDimension d) {
    switch (d) {
        case SegmentDimension::chip_kind: return info.chip_kind;
        case SegmentDimension::generation_tag: return info.generation_tag;
        case SegmentDimension::size_class: return std::string(to_string(info.size_class));
        case SegmentDimension::phase: return std::string(to_string(info.phase));
        case SegmentDimension::framework_tag: return info.framework_tag;
        case SegmentDimension::runtime_tag: return info.runtime_tag;
    }
    return {};
}

bool Scope::includes(const JobRecord& job) const {
    switch (kind) {
        case Kind::fleet: return true;
        case Kind::segment: return segment_value(job.info, dimension) == value;
        case Kind::job: return job.job_id == value;
    }
    return false;
}

std::string Scope::label() const {
    switch (kind) {
        case Kind::fleet: return "fleet";
        case Kind::segment: return std::string(to_string(dimension)) + "=" + value;
        case Kind::job: return "job=" + value;
    }
    return {};
}

namespace {

Micros overlap(Interval a, TimeWindow w) {
    return std::max<Micros>(0, std::min(a.end, w.end) - std::max(a.begin, w.begin));
}

ChipMicros checked_mul(std::int64_t a, std::int64_t b) {
    ChipMicros out = 0;
    if (__builtin_mul_overflow(a, b, &out)) throw ArithmeticError("chip-time overflow");
    return out;
}

double chip_seconds(ChipMicros v) { return micros_to_seconds(v); }

}  // namespace

ScopeTotals scope_totals(const TraceIndex& index, TimeWindow window, const Scope& scope) {
    ScopeTotals t;
    t.capacity = fleet_capacity(index.fleet(), window);
    for (const auto& job : index.jobs()) {
        if (!scope.includes(job)) continue;
        ++t.jobs;
        t.allocated += checked_mul(job.chips, job.all_allocated.measure_within(window));
        const Micros demand_end = job.completed.value_or(index.horizon());
        t.demand += checked_mul(job.chips, overlap({job.submitted, demand_end}, window));
        const double ideal_us = job.info.ideal_step_seconds * static_cast<double>(kMicrosPerSecond);
        for (const auto& r : job.committed) {
            const Micros in = overlap({r.start, r.end()}, window);
            if (in == 0) continue;
            t.committed += checked_mul(job.chips, in);
            t.ideal += static_cast<double>(job.chips) * ideal_us * static_cast<double>(in) / static_cast<double>(r.step_us);
            if (job.info.flops_per_step == 0) t.zero_flops = true;
        }
        for (const auto& [chips, up] : job.task_up) t.occupied += checked_mul(chips, up.measure_within(window));
        t.busy += checked_mul(job.chips, job.busy.measure_within(window));
    }
    return t;
}

namespace {

ChipMicros sg_denominator(const ScopeTotals& t, const Scope& scope) {
    return scope.kind == Scope::Kind::fleet ? t.capacity : t.demand;
}

}  // namespace

Ratio scheduling_goodput(const TraceIndex& index, TimeWindow window, const Scope& scope) {
    const auto t = scope_totals(index, window, scope);
    const ChipMicros den = sg_denominator(t, scope);
    if (den == 0) throw UndefinedMetric("scheduling goodput undefined for " + scope.label() + ": zero denominator");
    return {static_cast<double>(t.allocated) / static_cast<double>(den), chip_seconds(t.allocated), chip_seconds(den)};
}

Ratio runtime_goodput(const TraceIndex& index, TimeWindow window, const Scope& scope) {
    const auto t = scope_totals(index, window, scope);
    if (t.allocated == 0) throw UndefinedMetric("runtime goodput undefined for " + scope.label() + ": nothing allocated");
    return {static_cast<double>(t.committed) / static_cast<double>(t.allocated), chip_seconds(t.committed),
            chip_seconds(t.allocated)};
}

Ratio program_goodput(const TraceIndex& index, TimeWindow window, const Scope& scope) {
    const auto t = scope_totals(index, window, scope);
    if (t.committed == 0) throw UndefinedMetric("program goodput undefined for " + scope.label() + ": nothing committed");
    return {t.ideal / static_cast<double>(t.committed), t.ideal / static_cast<double>(kMicrosPerSecond),
            chip_seconds(t.committed)};
}

double mpg(std::optional<double> sg, std::optional<double> rg, std::optional<double> pg) {
    if (!sg || !rg || !pg) throw UndefinedMetric("mpg undefined: a component is undefined");
    return *sg * *rg * *pg;
}

LegacyMetrics legacy_metrics(const TraceIndex& index, TimeWindow window) {
    const auto t = scope_totals(index, window, Scope::whole_fleet());
    if (t.capacity == 0) throw UndefinedMetric("occupancy undefined: zero capacity");
    LegacyMetrics m;
    m.capacity_chip_seconds = chip_seconds(t.capacity);
    m.occupancy = static_cast<double>(t.occupied) / static_cast<double>(t.capacity);
    if (t.occupied > 0) m.duty_cycle = static_cast<double>(t.busy) / static_cast<double>(t.occupied);
    return m;
}

GoodputReport make_report(const TraceIndex& index, TimeWindow window, const Scope& scope) {
    const auto t = scope_totals(index, window, scope);
    GoodputReport r;
    r.scope = scope.label();
    r.window = window;
    const ChipMicros sg_den = sg_denominator(t, scope);
    r.sg_num = chip_seconds(t.allocated);
    r.sg_den = chip_seconds(sg_den);
    r.rg_num = chip_seconds(t.committed);
    r.rg_den = chip_seconds(t.allocated);
    r.pg_num = t.ideal / static_cast<double>(kMicrosPerSecond);
    r.pg_den = chip_seconds(t.committed);
    if (sg_den > 0) r.sg = static_cast<double>(t.allocated) / static_cast<double>(sg_den);
    else r.flags.push_back("sg_undefined");
    if (t.allocated > 0) r.rg = static_cast<double>(t.committed) / static_cast<double>(t.allocated);
    else r.flags.push_back("rg_undefined");
    if (t.committed > 0) r.pg = t.ideal / static_cast<double>(t.committed);
    else r.flags.push_back("pg_undefined");
    if (t.zero_flops) r.flags.push_back("zero_flops");
    if (r.pg && *r.pg > 1.0) r.flags.push_back("pg_exceeds_one");
    if (r.sg && *r.sg > 1.0) r.flags.push_back("sg_exceeds_one");
    if (r.sg && r.rg && r.pg) r.mpg = mpg(r.sg, r.rg, r.pg);
    return r;
}

std::string report_csv_header() { return "scope,window,sg_num,sg_den,sg,rg_num,rg_den,rg,pg_num,pg_den,pg,mpg,flags"; }

namespace {

std::string fraction(const std::optional<double>& v) { return v ? fmt::format("{:.9f}", *v) : std::string(); }

}  // namespace

std::string report_csv_row(const GoodputReport& r) {
    std::string flags;
    for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
    return fmt::format("{},{:.6f}:{:.6f},{:.6f},{:.6f},{},{:.6f},{:.6f},{},{:.6f},{:.6f},{},{},{}", r.scope,
                       micros_to_seconds(r.window.begin), micros_to_seconds(r.window.end), r.sg_num, r.sg_den,
                       fraction(r.sg), r.rg_num, r.rg_den, fraction(r.rg), r.pg_num, r.pg_den, fraction(r.pg),
                       fraction(r.mpg), flags);
}

std::string reports_csv(const std::vector<GoodputReport>& reports) {
    std::string out = report_csv_header() + "\n";
    for (const auto& r : reports) out += report_csv_row(r) + "\n";
    return out;
}

}  // namespace fgp
