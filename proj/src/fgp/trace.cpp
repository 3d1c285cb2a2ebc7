// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#include "trace.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace fgp {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 15> kEventNames{{
    {EventKind::job_submitted, "job_submitted"},
    {EventKind::tasks_allocated, "tasks_allocated"},
    {EventKind::task_up, "task_up"},
    {EventKind::task_down, "task_down"},
    {EventKind::all_up_begin, "all_up_begin"},
    {EventKind::all_up_end, "all_up_end"},
    {EventKind::step_committed, "step_committed"},
    {EventKind::checkpoint_begin, "checkpoint_begin"},
    {EventKind::checkpoint_committed, "checkpoint_committed"},
    {EventKind::failure, "failure"},
    {EventKind::preemption, "preemption"},
    {EventKind::restore_begin, "restore_begin"},
    {EventKind::restore_end, "restore_end"},
    {EventKind::job_completed, "job_completed"},
    {EventKind::unschedulable, "unschedulable"},
}};

json job_info_to_json(const JobInfo& j) {
    return json{{"tasks", j.tasks},
                {"phase", to_string(j.phase)},
                {"chip_kind", j.chip_kind},
                {"generation_tag", j.generation_tag},
                {"size_class", to_string(j.size_class)},
                {"framework_tag", j.framework_tag},
                {"runtime_tag", j.runtime_tag},
                {"priority", j.priority},
                {"work", j.work},
                {"graph", j.graph},
                {"flops_per_step", j.flops_per_step},
                {"ideal_step_s", j.ideal_step_seconds}};
}

JobInfo job_info_from_json(const json& j) {
    JobInfo info;
    info.tasks = j.at("tasks").get<int>();
    auto phase = parse_phase(j.at("phase").get<std::string>());
    if (!phase) throw std::runtime_error("bad phase");
    info.phase = *phase;
    info.chip_kind = j.at("chip_kind").get<std::string>();
    info.generation_tag = j.at("generation_tag").get<std::string>();
    auto size = parse_size_class(j.at("size_class").get<std::string>());
    if (!size) throw std::runtime_error("bad size_class");
    info.size_class = *size;
    info.framework_tag = j.at("framework_tag").get<std::string>();
    info.runtime_tag = j.at("runtime_tag").get<std::string>();
    info.priority = j.at("priority").get<int>();
    info.work = j.at("work").get<std::int64_t>();
    info.graph = j.at("graph").get<std::string>();
    info.flops_per_step = j.at("flops_per_step").get<std::int64_t>();
    info.ideal_step_seconds = j.at("ideal_step_s").get<double>();
    if (info.tasks < 1) throw std::runtime_error("tasks must be >= 1");
    return info;
}

std::optional<CheckpointMode> parse_mode(std::string_view text) {
    for (CheckpointMode m : {CheckpointMode::sync, CheckpointMode::async, CheckpointMode::shard_barrier}) {
        if (to_string(m) == text) return m;
    }
    return std::nullopt;
}

json event_to_json(const Event& e) {
    json j{{"seq", e.seq}, {"t", e.time}, {"kind", to_string(e.kind)}, {"job", e.job_id}, {"chips", e.chips}};
    switch (e.kind) {
        case EventKind::job_submitted: j["info"] = job_info_to_json(*e.job); break;
        case EventKind::tasks_allocated:
            j["pod"] = e.pod;
            j["origin"] = e.origin;
            j["shape"] = e.shape;
            j["incarnation"] = e.incarnation;
            break;
        case EventKind::task_up:
        case EventKind::task_down: j["task"] = e.task; break;
        case EventKind::step_committed:
            j["start"] = e.run->start;
            j["steps"] = e.run->steps;
            j["step_us"] = e.run->step_us;
            j["bound"] = to_string(e.run->bound);
            break;
        case EventKind::checkpoint_begin:
            j["step"] = e.step;
            j["mode"] = to_string(e.mode);
            j["write_us"] = e.write_us;
            break;
        case EventKind::checkpoint_committed:
            j["step"] = e.step;
            j["implicit"] = e.implicit_commit;
            break;
        case EventKind::all_up_end: {
            json lost = json::array();
            for (const auto& i : e.lost) lost.push_back({i.begin, i.end});
            j["lost"] = lost;
            j["reason"] = e.reason;
            break;
        }
        case EventKind::failure:
            j["pod"] = e.pod;
            j["chip"] = e.chip;
            break;
        case EventKind::preemption: j["by"] = e.by; break;
        case EventKind::unschedulable: j["reason"] = e.reason; break;
        default: break;
    }
    return j;
}

Event event_from_json(const json& j) {
    Event e;
    e.seq = j.at("seq").get<std::int64_t>();
    e.time = j.at("t").get<Micros>();
    auto kind = parse_event_kind(j.at("kind").get<std::string>());
    if (!kind) throw std::runtime_error("unknown event kind");
    e.kind = *kind;
    e.job_id = j.at("job").get<std::string>();
    e.chips = j.at("chips").get<std::int64_t>();
    switch (e.kind) {
        case EventKind::job_submitted: e.job = job_info_from_json(j.at("info")); break;
        case EventKind::tasks_allocated:
            e.pod = j.at("pod").get<std::string>();
            e.origin = j.at("origin").get<std::vector<int>>();
            e.shape = j.at("shape").get<std::vector<int>>();
            e.incarnation = j.at("incarnation").get<int>();
            break;
        case EventKind::task_up:
        case EventKind::task_down: e.task = j.at("task").get<int>(); break;
        case EventKind::step_committed: {
            StepRun r;
            r.start = j.at("start").get<Micros>();
            r.steps = j.at("steps").get<std::int64_t>();
            r.step_us = j.at("step_us").get<Micros>();
            const auto bound = j.at("bound").get<std::string>();
            if (bound != "device" && bound != "host") throw std::runtime_error("bad bound");
            r.bound = bound == "device" ? Boundedness::device : Boundedness::host;
            if (r.steps < 1 || r.step_us < 1) throw std::runtime_error("empty step run");
            e.run = r;
            break;
        }
        case EventKind::checkpoint_begin: {
            e.step = j.at("step").get<std::int64_t>();
            auto mode = parse_mode(j.at("mode").get<std::string>());
            if (!mode) throw std::runtime_error("bad checkpoint mode");
            e.mode = *mode;
            e.write_us = j.at("write_us").get<Micros>();
            break;
        }
        case EventKind::checkpoint_committed:
            e.step = j.at("step").get<std::int64_t>();
            e.implicit_commit = j.at("implicit").get<bool>();
            break;
        case EventKind::all_up_end:
            for (const auto& i : j.at("lost")) {
                const auto pair = i.get<std::vector<Micros>>();
                if (pair.size() != 2 || pair[1] < pair[0]) throw std::runtime_error("bad lost interval");
                e.lost.push_back({pair[0], pair[1]});
            }
            e.reason = j.at("reason").get<std::string>();
            break;
        case EventKind::failure:
            e.pod = j.at("pod").get<std::string>();
            e.chip = j.at("chip").get<std::vector<int>>();
            break;
        case EventKind::preemption: e.by = j.at("by").get<std::string>(); break;
        case EventKind::unschedulable: e.reason = j.at("reason").get<std::string>(); break;
        default: break;
    }
    return e;
}

}  // namespace

std::string_view to_string(EventKind kind) {
    for (const auto& [k, name] : kEventNames) {
        if (k == kind) return name;
    }
    return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
    for (const auto& [k, name] : kEventNames) {
        if (name == text) return k;
    }
    return std::nullopt;
}

std::string_view to_string(CheckpointMode mode) {
    switch (mode) {
        case CheckpointMode::sync: return "sync";
        case CheckpointMode::async: return "async";
        case CheckpointMode::shard_barrier: return "shard_barrier";
    }
    return "?";
}

json fleet_to_json(const Fleet& fleet) {
    json j{{"chip_kinds", json::array()}, {"pods", json::array()}};
    for (const auto& k : fleet.chip_kinds()) {
        j["chip_kinds"].push_back(
            {{"name", k.name}, {"peak_flops", k.peak_flops}, {"mtbf", k.mtbf}, {"generation_tag", k.generation_tag}});
    }
    for (const auto& p : fleet.pods()) {
        j["pods"].push_back({{"id", p.id}, {"chip_kind", p.chip_kind}, {"shape", p.shape.dims()}, {"cell", p.cell}});
    }
    const auto& t = fleet.thresholds();
    j["size_thresholds"] = {t.small_max, t.medium_max, t.large_max};
    return j;
}

Fleet fleet_from_json(const json& j) {
    FleetConfig fc;
    for (const auto& k : j.at("chip_kinds")) {
        fc.chip_kinds.push_back(ChipKind{k.at("name").get<std::string>(), k.at("peak_flops").get<double>(),
                                         k.at("mtbf").get<double>(), k.at("generation_tag").get<std::string>()});
    }
    for (const auto& p : j.at("pods")) {
        fc.pods.push_back({p.at("id").get<std::string>(), p.at("chip_kind").get<std::string>(),
                           p.at("shape").get<std::vector<int>>(), p.at("cell").get<std::string>()});
    }
    fc.size_thresholds = j.at("size_thresholds").get<std::vector<std::int64_t>>();
    return build_fleet(fc);
}

void write_trace(const Trace& trace, std::ostream& out) {
    const auto& h = trace.header;
    json header{{"format", kTraceFormat},
                {"scenario", h.scenario_name},
                {"scenario_hash", h.scenario_hash},
                {"sections", h.sections},
                {"seed", h.seed},
                {"horizon_us", h.horizon},
                {"fleet", h.fleet}};
    out << header.dump() << '\n';
    for (const auto& e : trace.events) out << event_to_json(e).dump() << '\n';
    out << json{{"end", true}, {"events", trace.events.size()}}.dump() << '\n';
}

std::string serialize_trace(const Trace& trace) {
    std::ostringstream out;
    write_trace(trace, out);
    return out.str();
}

Trace read_trace(std::istream& in) {
    Trace trace;
    std::string line;
    std::int64_t line_no = 0;
    bool have_header = false;
    bool have_footer = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (have_footer) throw TraceCorruption("content after end record", line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error&) {
            throw TraceCorruption("malformed record", line_no);
        }
        try {
            if (!have_header) {
                if (j.value("format", std::string{}) != kTraceFormat) throw TraceCorruption("missing or unknown trace header", line_no);
                auto& h = trace.header;
                h.scenario_name = j.at("scenario").get<std::string>();
                h.scenario_hash = j.at("scenario_hash").get<std::string>();
                h.sections = j.at("sections").get<std::map<std::string, std::string>>();
                h.seed = j.at("seed").get<std::uint64_t>();
                h.horizon = j.at("horizon_us").get<Micros>();
                h.fleet = j.at("fleet");
                trace.fleet = fleet_from_json(h.fleet);
                if (h.horizon <= 0) throw TraceCorruption("non-positive horizon", line_no);
                have_header = true;
                continue;
            }
            if (j.contains("end")) {
                if (j.at("events").get<std::size_t>() != trace.events.size()) {
                    throw TraceCorruption("end record event count does not match", line_no);
                }
                have_footer = true;
                continue;
            }
            Event e = event_from_json(j);
            if (e.seq != static_cast<std::int64_t>(trace.events.size())) throw TraceCorruption("sequence gap", line_no, e.seq);
            if (!trace.events.empty() && e.time < trace.events.back().time) {
                throw TraceCorruption("event time goes backwards", line_no, e.seq);
            }
            trace.events.push_back(std::move(e));
        } catch (const TraceCorruption&) {
            throw;
        } catch (const std::exception& ex) {
            throw TraceCorruption(std::string("invalid record: ") + ex.what(), line_no);
        }
    }
    if (!have_header) throw TraceCorruption("empty trace", line_no + 1);
    if (!have_footer) throw TraceCorruption("truncated trace: no end record", line_no + 1);
    return trace;
}

Trace parse_trace(const std::string& text) {
    std::istringstream in(text);
    return read_trace(in);
}

void save_trace_file(const Trace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_trace(trace, out);
    out.flush();
    if (!out) throw IoError("error writing '" + path + "'");
}

Trace load_trace_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    return read_trace(in);
}

}  // namespace fgp
