// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "errors.hpp"

namespace fgp {

using nlohmann::json;

namespace {

// Typed, path-aware access to one JSON object. finish() rejects keys that were
// never read.
class ObjectReader {
public:
    ObjectReader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_.empty() ? "(root)" : path_, "expected an object");
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) const { return node_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        auto it = node_.find(key);
        if (it == node_.end()) throw ConfigError(child(key), "required field missing");
        return *it;
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        if (!has(key)) {
            seen_.insert(key);
            if (fallback) return *fallback;
            throw ConfigError(child(key), "required field missing");
        }
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(child(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(child(key), "must be finite");
        return d;
    }

    double non_negative(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const double d = number(key, fallback);
        if (d < 0.0) throw ConfigError(child(key), "must be >= 0");
        return d;
    }

    std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = std::nullopt) {
        if (!has(key)) {
            seen_.insert(key);
            if (fallback) return *fallback;
            throw ConfigError(child(key), "required field missing");
        }
        const json& v = raw(key);
        if (v.is_number_integer()) return v.get<std::int64_t>();
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9.0e15) return static_cast<std::int64_t>(d);
        }
        throw ConfigError(child(key), "expected an integer");
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) {
            seen_.insert(key);
            return fallback;
        }
        const json& v = raw(key);
        if (!v.is_boolean()) throw ConfigError(child(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        if (!has(key)) {
            seen_.insert(key);
            if (fallback) return *fallback;
            throw ConfigError(child(key), "required field missing");
        }
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(child(key), "expected a string");
        return v.get<std::string>();
    }

    const json& array(const std::string& key, bool required = true) {
        static const json empty = json::array();
        if (!has(key)) {
            seen_.insert(key);
            if (required) throw ConfigError(child(key), "required field missing");
            return empty;
        }
        const json& v = raw(key);
        if (!v.is_array()) throw ConfigError(child(key), "expected an array");
        return v;
    }

    std::vector<int> int_list(const std::string& key) {
        const json& arr = array(key);
        std::vector<int> out;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            if (!arr[i].is_number_integer()) throw ConfigError(fmt::format("{}[{}]", child(key), i), "expected an integer");
            const auto v = arr[i].get<std::int64_t>();
            if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
                throw ConfigError(fmt::format("{}[{}]", child(key), i), "out of range");
            }
            out.push_back(static_cast<int>(v));
        }
        return out;
    }

    void finish() const {
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError(child(it.key()), "unknown key");
        }
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string indexed(const std::string& path, std::size_t i) { return fmt::format("{}[{}]", path, i); }

// Re-labels a ConfigError raised inside a nested validator with the parent path.
template <typename F>
auto with_prefix(const std::string& prefix, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError& e) {
        const std::string field = e.field().empty() ? prefix : prefix + "." + e.field();
        std::string message = e.what();
        const std::string strip = e.field() + ": ";
        if (!e.field().empty() && message.rfind(strip, 0) == 0) message = message.substr(strip.size());
        throw ConfigError(field, message);
    }
}

void read_runtime(ObjectReader& r, RuntimeParams& rt) {
    rt.init_time = r.non_negative("init_time", rt.init_time);
    rt.compile_time = r.non_negative("compile_time", rt.compile_time);
    rt.checkpoint_interval = r.integer("checkpoint_interval", rt.checkpoint_interval);
    if (rt.checkpoint_interval < 1) throw ConfigError(r.child("checkpoint_interval"), "must be >= 1");
    rt.checkpoint_write_time = r.non_negative("checkpoint_write_time", rt.checkpoint_write_time);
    rt.async_checkpoint = r.boolean("async_checkpoint", rt.async_checkpoint);
    rt.aot_compile = r.boolean("aot_compile", rt.aot_compile);
    rt.restore_time = r.non_negative("restore_time", rt.restore_time);
    rt.shards = r.integer("shards", rt.shards);
    if (rt.shards < 1) throw ConfigError(r.child("shards"), "must be >= 1");
    rt.shard_barrier_wait = r.non_negative("shard_barrier_wait", rt.shard_barrier_wait);
    r.finish();
}

json runtime_to_json(const RuntimeParams& rt) {
    return json{{"init_time", rt.init_time},
                {"compile_time", rt.compile_time},
                {"checkpoint_interval", rt.checkpoint_interval},
                {"checkpoint_write_time", rt.checkpoint_write_time},
                {"async_checkpoint", rt.async_checkpoint},
                {"aot_compile", rt.aot_compile},
                {"restore_time", rt.restore_time},
                {"shards", rt.shards},
                {"shard_barrier_wait", rt.shard_barrier_wait}};
}

json profile_to_json(const StepProfile& p) {
    return json{{"device_compute_time", p.device_compute_time},
                {"comm_time", p.comm_time},
                {"host_time", p.host_time},
                {"overlap_fraction", p.overlap_fraction}};
}

}  // namespace

std::map<std::string, std::string> SectionHashes::as_map() const {
    return {{"fleet", fleet},         {"workload", workload},   {"program", program}, {"runtime", runtime},
            {"scheduler", scheduler}, {"failures", failures}, {"run", run}};
}

const OpGraph& Scenario::graph(const std::string& label) const {
    for (const auto& g : graphs) {
        if (g.label() == label) return g;
    }
    throw ConfigError("op_graphs", "unknown graph '" + label + "'");
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

Scenario parse_scenario(const json& document) {
    ObjectReader root(document, "");
    Scenario sc;
    sc.name = root.string("name", std::string{});

    // Fleet.
    FleetConfig fc;
    const json& kinds = root.array("chip_kinds");
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        ObjectReader r(kinds[i], indexed("chip_kinds", i));
        ChipKind k;
        k.name = r.string("name");
        k.peak_flops = r.number("peak_flops");
        k.mtbf = r.number("mtbf");
        k.generation_tag = r.string("generation_tag", std::string{});
        r.finish();
        fc.chip_kinds.push_back(k);
    }
    {
        ObjectReader fr(root.raw("fleet"), "fleet");
        const json& pods = fr.array("pods");
        for (std::size_t i = 0; i < pods.size(); ++i) {
            ObjectReader r(pods[i], indexed("fleet.pods", i));
            FleetConfig::PodConfig p;
            p.id = r.string("id");
            p.chip_kind = r.string("chip_kind");
            p.dims = r.int_list("shape");
            p.cell = r.string("cell", std::string{});
            r.finish();
            fc.pods.push_back(p);
        }
        if (fr.has("size_thresholds")) {
            const json& t = fr.array("size_thresholds");
            fc.size_thresholds.clear();
            for (std::size_t i = 0; i < t.size(); ++i) {
                if (!t[i].is_number_integer()) throw ConfigError(indexed("fleet.size_thresholds", i), "expected an integer");
                fc.size_thresholds.push_back(t[i].get<std::int64_t>());
            }
        }
        fr.finish();
    }
    sc.fleet = build_fleet(fc);

    // Graphs.
    const json& graphs = root.array("op_graphs");
    std::set<std::string> labels;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        const std::string path = indexed("op_graphs", i);
        ObjectReader r(graphs[i], path);
        const std::string label = r.string("label");
        if (!labels.insert(label).second) throw ConfigError(path + ".label", "duplicate graph label '" + label + "'");
        std::vector<OpNode> nodes;
        const json& arr = r.array("nodes");
        for (std::size_t n = 0; n < arr.size(); ++n) {
            ObjectReader nr(arr[n], indexed(path + ".nodes", n));
            OpNode node;
            node.id = nr.string("id");
            const std::string kind = nr.string("kind");
            auto parsed = parse_op_kind(kind);
            if (!parsed) throw ConfigError(nr.child("kind"), "unknown op kind '" + kind + "'");
            node.kind = *parsed;
            const json& dims = nr.array("dims");
            for (std::size_t d = 0; d < dims.size(); ++d) {
                if (!dims[d].is_number_integer()) throw ConfigError(indexed(nr.child("dims"), d), "expected an integer");
                node.dims.push_back(dims[d].get<std::int64_t>());
            }
            const json& preds = nr.array("predecessors", false);
            for (std::size_t p = 0; p < preds.size(); ++p) {
                if (!preds[p].is_string()) throw ConfigError(indexed(nr.child("predecessors"), p), "expected a string");
                node.predecessors.push_back(preds[p].get<std::string>());
            }
            nr.finish();
            nodes.push_back(std::move(node));
        }
        r.finish();
        sc.graphs.push_back(with_prefix(path, [&] { return OpGraph(label, std::move(nodes)); }));
    }

    // Runtime presets, keyed by runtime_tag.
    std::map<std::string, json> presets;
    if (root.has("runtime_presets")) {
        const json& p = root.raw("runtime_presets");
        if (!p.is_object()) throw ConfigError("runtime_presets", "expected an object");
        for (auto it = p.begin(); it != p.end(); ++it) {
            RuntimeParams probe;
            ObjectReader r(it.value(), "runtime_presets." + it.key());
            read_runtime(r, probe);
            presets[it.key()] = it.value();
        }
    }

    // Jobs.
    const json& jobs = root.array("jobs");
    std::set<std::string> job_ids;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const std::string path = indexed("jobs", i);
        ObjectReader r(jobs[i], path);
        JobSpec job;
        JobRequest& req = job.request;
        req.job_id = r.string("id");
        if (!job_ids.insert(req.job_id).second) throw ConfigError(path + ".id", "duplicate job id '" + req.job_id + "'");
        req.priority = static_cast<int>(r.integer("priority", 0));
        req.chip_kind = r.string("chip_kind");
        if (!sc.fleet.find_chip_kind(req.chip_kind)) throw ConfigError(path + ".chip_kind", "unknown chip kind '" + req.chip_kind + "'");
        const auto dims = r.int_list("shape");
        if (dims.empty() || dims.size() > 3) throw ConfigError(path + ".shape", "must have 1 to 3 axes");
        for (std::size_t d = 0; d < dims.size(); ++d) {
            if (dims[d] < 1) throw ConfigError(indexed(path + ".shape", d), "must be >= 1");
        }
        req.shape = MeshShape(dims);
        job.tasks = static_cast<int>(r.integer("tasks", 1));
        if (job.tasks < 1 || job.tasks > req.shape.chip_count() || req.shape.chip_count() % job.tasks != 0) {
            throw ConfigError(path + ".tasks", "must be >= 1 and divide the chip count");
        }
        const double arrival = r.non_negative("arrival", 0.0);
        req.arrival = seconds_to_micros(arrival);
        req.work = r.integer("work");
        if (req.work < 1) throw ConfigError(path + ".work", "must be >= 1");
        const std::string phase = r.string("phase", std::string{"training"});
        auto parsed_phase = parse_phase(phase);
        if (!parsed_phase) throw ConfigError(path + ".phase", "unknown phase '" + phase + "'");
        req.phase = *parsed_phase;
        req.runtime_tag = r.string("runtime_tag", std::string{"default"});
        req.framework_tag = r.string("framework_tag", std::string{"default"});
        req.cell = r.string("cell", std::string{});
        job.graph = r.string("graph");
        if (!labels.count(job.graph)) throw ConfigError(path + ".graph", "unknown graph '" + job.graph + "'");

        {
            ObjectReader pr(r.raw("profile"), path + ".profile");
            StepProfile& p = job.profile;
            p.device_compute_time = pr.non_negative("device_compute_time", 0.0);
            p.comm_time = pr.non_negative("comm_time", 0.0);
            p.host_time = pr.non_negative("host_time", 0.0);
            p.overlap_fraction = pr.number("overlap_fraction", 0.0);
            if (p.overlap_fraction < 0.0 || p.overlap_fraction > 1.0) throw ConfigError(pr.child("overlap_fraction"), "must be in [0,1]");
            pr.finish();
            if (seconds_to_micros(actual_step_time(p).seconds) < 1) {
                throw ConfigError(path + ".profile", "step time must be at least one microsecond");
            }
        }

        auto preset = presets.find(req.runtime_tag);
        if (preset != presets.end()) {
            ObjectReader pr(preset->second, "runtime_presets." + req.runtime_tag);
            read_runtime(pr, job.runtime);
        }
        if (r.has("runtime")) {
            ObjectReader rr(r.raw("runtime"), path + ".runtime");
            read_runtime(rr, job.runtime);
        }
        if (job.runtime.compile_time > job.runtime.init_time) {
            throw ConfigError(path + ".runtime.compile_time", "must not exceed init_time");
        }
        if (req.phase == Phase::bulk_inference && job.runtime.shards > req.work) {
            throw ConfigError(path + ".runtime.shards", "must not exceed work");
        }
        r.finish();
        sc.jobs.push_back(std::move(job));
    }

    // Scheduler.
    if (root.has("scheduler")) {
        ObjectReader r(root.raw("scheduler"), "scheduler");
        if (r.has("size_preference")) {
            const json& pref = r.raw("size_preference");
            if (pref.is_string() && pref.get<std::string>() == "uniform") {
                sc.scheduler.policy = EvictionPolicy::uniform();
            } else if (pref.is_array()) {
                std::vector<SizeClass> order;
                for (std::size_t i = 0; i < pref.size(); ++i) {
                    auto s = pref[i].is_string() ? parse_size_class(pref[i].get<std::string>()) : std::nullopt;
                    if (!s) throw ConfigError(indexed("scheduler.size_preference", i), "expected small|medium|large|xl");
                    order.push_back(*s);
                }
                sc.scheduler.policy = with_prefix("scheduler", [&] { return EvictionPolicy::from_order(order); });
            } else {
                throw ConfigError("scheduler.size_preference", "expected a list of size classes or \"uniform\"");
            }
        }
        sc.scheduler.task_startup_stagger = seconds_to_micros(r.non_negative("task_startup_stagger", 0.0));
        sc.scheduler.limits.exhaustive_budget = r.integer("victim_search_budget", sc.scheduler.limits.exhaustive_budget);
        if (sc.scheduler.limits.exhaustive_budget < 0) throw ConfigError("scheduler.victim_search_budget", "must be >= 0");
        r.finish();
    }

    // Compiler pass schedule.
    const json& passes = root.array("passes", false);
    for (std::size_t i = 0; i < passes.size(); ++i) {
        const std::string path = indexed("passes", i);
        ObjectReader r(passes[i], path);
        ScheduledPass sp;
        sp.time = seconds_to_micros(r.non_negative("time"));
        sp.pass.name = r.string("name", std::string{"pass"});
        const std::string effect = r.string("effect");
        auto e = parse_pass_effect(effect);
        if (!e) throw ConfigError(path + ".effect", "unknown effect '" + effect + "'");
        sp.pass.effect = *e;
        sp.pass.value = r.number("value");
        with_prefix(path, [&] { validate(sp.pass); });
        const json& targets = r.array("jobs", false);
        for (std::size_t t = 0; t < targets.size(); ++t) {
            if (!targets[t].is_string() || !job_ids.count(targets[t].get<std::string>())) {
                throw ConfigError(indexed(path + ".jobs", t), "unknown job");
            }
            sp.jobs.push_back(targets[t].get<std::string>());
        }
        r.finish();
        sc.passes.push_back(std::move(sp));
    }
    std::stable_sort(sc.passes.begin(), sc.passes.end(),
                     [](const ScheduledPass& a, const ScheduledPass& b) { return a.time < b.time; });

    // Failure model.
    if (root.has("failures")) {
        ObjectReader r(root.raw("failures"), "failures");
        sc.failures.enabled = r.boolean("enabled", false);
        const json& inj = r.array("injected", false);
        for (std::size_t i = 0; i < inj.size(); ++i) {
            const std::string path = indexed("failures.injected", i);
            ObjectReader fr(inj[i], path);
            InjectedFailure f;
            f.time = seconds_to_micros(fr.non_negative("time"));
            f.pod = fr.string("pod");
            const Pod* pod = sc.fleet.find_pod(f.pod);
            if (!pod) throw ConfigError(path + ".pod", "unknown pod '" + f.pod + "'");
            f.chip = fr.int_list("chip");
            if (f.chip.size() != pod->shape.rank()) throw ConfigError(path + ".chip", "coordinate rank does not match pod");
            for (std::size_t d = 0; d < f.chip.size(); ++d) {
                if (f.chip[d] < 0 || f.chip[d] >= pod->shape.dims()[d]) throw ConfigError(indexed(path + ".chip", d), "outside pod");
            }
            fr.finish();
            sc.failures.injected.push_back(std::move(f));
        }
        r.finish();
    }

    const double horizon = root.number("horizon");
    if (!(horizon > 0.0)) throw ConfigError("horizon", "must be > 0");
    sc.horizon = seconds_to_micros(horizon);
    if (sc.horizon < 1) throw ConfigError("horizon", "must be at least one microsecond");
    {
        const json& seed = root.raw("seed");
        if (!seed.is_number_integer()) throw ConfigError("seed", "expected a non-negative integer");
        if (seed.is_number_unsigned()) {
            sc.seed = seed.get<std::uint64_t>();
        } else {
            const auto s = seed.get<std::int64_t>();
            if (s < 0) throw ConfigError("seed", "expected a non-negative integer");
            sc.seed = static_cast<std::uint64_t>(s);
        }
    }
    root.finish();

    // Canonical, fully resolved form and its section digests.
    json fleet_j{{"chip_kinds", json::array()}, {"pods", json::array()}};
    for (const auto& k : sc.fleet.chip_kinds()) {
        fleet_j["chip_kinds"].push_back(
            {{"name", k.name}, {"peak_flops", k.peak_flops}, {"mtbf", k.mtbf}, {"generation_tag", k.generation_tag}});
    }
    for (const auto& p : sc.fleet.pods()) {
        fleet_j["pods"].push_back({{"id", p.id}, {"chip_kind", p.chip_kind}, {"shape", p.shape.dims()}, {"cell", p.cell}});
    }
    const auto& th = sc.fleet.thresholds();
    fleet_j["size_thresholds"] = {th.small_max, th.medium_max, th.large_max};

    json workload_j = json::array(), program_j{{"graphs", json::array()}, {"profiles", json::object()}, {"passes", json::array()}};
    json runtime_j = json::object();
    for (const auto& g : sc.graphs) {
        json nodes = json::array();
        for (const auto& n : g.nodes()) {
            nodes.push_back({{"id", n.id}, {"kind", to_string(n.kind)}, {"dims", n.dims}, {"predecessors", n.predecessors}});
        }
        program_j["graphs"].push_back({{"label", g.label()}, {"nodes", nodes}});
    }
    for (const auto& j : sc.jobs) {
        const auto& r = j.request;
        workload_j.push_back({{"id", r.job_id},
                              {"priority", r.priority},
                              {"chip_kind", r.chip_kind},
                              {"shape", r.shape.dims()},
                              {"tasks", j.tasks},
                              {"arrival_us", r.arrival},
                              {"work", r.work},
                              {"phase", to_string(r.phase)},
                              {"runtime_tag", r.runtime_tag},
                              {"framework_tag", r.framework_tag},
                              {"cell", r.cell},
                              {"graph", j.graph}});
        program_j["profiles"][r.job_id] = profile_to_json(j.profile);
        runtime_j[r.job_id] = runtime_to_json(j.runtime);
    }
    for (const auto& p : sc.passes) {
        program_j["passes"].push_back({{"time_us", p.time},
                                       {"name", p.pass.name},
                                       {"effect", to_string(p.pass.effect)},
                                       {"value", p.pass.value},
                                       {"jobs", p.jobs}});
    }
    json sched_j = json::array();
    for (int r : sc.scheduler.policy.rank) sched_j.push_back(r);
    sched_j = {{"size_rank", sched_j},
               {"task_startup_stagger_us", sc.scheduler.task_startup_stagger},
               {"victim_search_budget", sc.scheduler.limits.exhaustive_budget}};
    json fail_j{{"enabled", sc.failures.enabled}, {"injected", json::array()}};
    for (const auto& f : sc.failures.injected) {
        fail_j["injected"].push_back({{"time_us", f.time}, {"pod", f.pod}, {"chip", f.chip}});
    }
    json run_j{{"horizon_us", sc.horizon}, {"seed", sc.seed}};

    sc.canonical = {{"fleet", fleet_j},   {"workload", workload_j}, {"program", program_j}, {"runtime", runtime_j},
                    {"scheduler", sched_j}, {"failures", fail_j},   {"run", run_j}};
    sc.sections.fleet = fnv1a_hex(fleet_j.dump());
    sc.sections.workload = fnv1a_hex(workload_j.dump());
    sc.sections.program = fnv1a_hex(program_j.dump());
    sc.sections.runtime = fnv1a_hex(runtime_j.dump());
    sc.sections.scheduler = fnv1a_hex(sched_j.dump());
    sc.sections.failures = fnv1a_hex(fail_j.dump());
    sc.sections.run = fnv1a_hex(run_j.dump());
    sc.hash = fnv1a_hex(sc.canonical.dump());
    return sc;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("error reading '" + path + "'");
    try {
        return json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
}

Scenario load_scenario_file(const std::string& path) { return parse_scenario(read_json_file(path)); }

namespace {

struct PathToken {
    std::string key;
    bool is_index = false;
    bool wildcard = false;
    std::size_t index = 0;
};

std::vector<PathToken> tokenize(const std::string& path) {
    std::vector<PathToken> out;
    std::size_t i = 0;
    while (i < path.size()) {
        if (path[i] == '.') {
            ++i;
            continue;
        }
        if (path[i] == '[') {
            const auto close = path.find(']', i);
            if (close == std::string::npos) throw ConfigError(path, "unbalanced '['");
            const std::string inner = path.substr(i + 1, close - i - 1);
            PathToken t;
            t.is_index = true;
            if (inner == "*") {
                t.wildcard = true;
            } else {
                if (inner.empty() || inner.find_first_not_of("0123456789") != std::string::npos) {
                    throw ConfigError(path, "bad index '" + inner + "'");
                }
                t.index = static_cast<std::size_t>(std::stoull(inner));
            }
            out.push_back(t);
            i = close + 1;
            continue;
        }
        const auto end = path.find_first_of(".[", i);
        PathToken t;
        t.key = path.substr(i, end == std::string::npos ? std::string::npos : end - i);
        out.push_back(t);
        i = end == std::string::npos ? path.size() : end;
    }
    if (out.empty()) throw ConfigError(path, "empty parameter path");
    return out;
}

void assign_leaf(json& leaf, const std::string& path, const std::string& value) {
    if (leaf.is_boolean()) {
        if (value == "true") {
            leaf = true;
        } else if (value == "false") {
            leaf = false;
        } else {
            throw ConfigError(path, "expected true or false, got '" + value + "'");
        }
        return;
    }
    if (!leaf.is_number()) throw ConfigError(path, "not a numeric or boolean field");
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError(path, "expected a number, got '" + value + "'");
    }
    if (used != value.size() || !std::isfinite(d)) throw ConfigError(path, "expected a number, got '" + value + "'");
    if (leaf.is_number_integer() && d == std::floor(d) && std::fabs(d) < 9.0e15) {
        leaf = static_cast<std::int64_t>(d);
    } else {
        leaf = d;
    }
}

void walk(json& node, const std::vector<PathToken>& tokens, std::size_t at, const std::string& path,
          const std::string& value) {
    if (at == tokens.size()) {
        assign_leaf(node, path, value);
        return;
    }
    const PathToken& t = tokens[at];
    if (t.is_index) {
        if (!node.is_array()) throw ConfigError(path, "not an array where an index was given");
        if (t.wildcard) {
            if (node.empty()) throw ConfigError(path, "wildcard over an empty array");
            for (auto& child : node) walk(child, tokens, at + 1, path, value);
            return;
        }
        if (t.index >= node.size()) throw ConfigError(path, "index out of range");
        walk(node[t.index], tokens, at + 1, path, value);
        return;
    }
    if (!node.is_object() || !node.contains(t.key)) throw ConfigError(path, "no field '" + t.key + "'");
    walk(node[t.key], tokens, at + 1, path, value);
}

}  // namespace

void set_param(json& document, const std::string& path, const std::string& value) {
    walk(document, tokenize(path), 0, path, value);
}

}  // namespace fgp
