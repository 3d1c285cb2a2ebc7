// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

// Shared fixtures for the unit and acceptance suites.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fgp/fleet.hpp"
#include "fgp/goodput.hpp"
#include "fgp/interval_set.hpp"
#include "fgp/scenario.hpp"
#include "fgp/scheduler.hpp"
#include "fgp/trace.hpp"

namespace fgp::testing {

inline std::string scenario_path(const std::string& name) {
    return std::string(FGP_SCENARIO_DIR) + "/" + name + ".json";
}

inline const std::vector<std::string>& bundled_scenarios() {
    static const std::vector<std::string> names{
        "checkpoint_economics", "chip_lifecycle",        "fig11_eviction",        "fig11_eviction_uniform",
        "minimal",              "overlap_commbound",     "simpson",               "simpson_control",
        "table2_device_bound_a", "table2_device_bound_b", "table2_host_bound_a",  "table2_host_bound_b",
        "table2_runtime_a",     "table2_runtime_b",      "table2_scheduler_a",    "table2_scheduler_b"};
    return names;
}

// One training job on a 2x2 pod: 1 s steps, 5 s init, checkpoint every 5
// steps at 1 s per write.
inline nlohmann::json single_job_document() {
    return nlohmann::json::parse(R"({
      "name": "unit",
      "chip_kinds": [{"name": "tpu-a", "peak_flops": 1e12, "mtbf": 1e9, "generation_tag": "gen1"}],
      "fleet": {"pods": [{"id": "p0", "chip_kind": "tpu-a", "shape": [2, 2]}]},
      "op_graphs": [{"label": "g", "nodes": [{"id": "mm", "kind": "matmul", "dims": [1000, 1000, 1000000]}]}],
      "jobs": [{
        "id": "train", "priority": 1, "chip_kind": "tpu-a", "shape": [2, 2], "tasks": 1,
        "arrival": 0, "work": 10, "phase": "training", "graph": "g",
        "profile": {"device_compute_time": 1.0, "comm_time": 0.0, "host_time": 0.0, "overlap_fraction": 0.0},
        "runtime": {"init_time": 5, "checkpoint_interval": 5, "checkpoint_write_time": 1}
      }],
      "horizon": 30,
      "seed": 7
    })");
}

// A task's up/down history plus the chips it holds.
struct SyntheticTask {
    std::vector<Interval> up;  // disjoint, sorted
};

struct SyntheticJob {
    std::string id;
    std::int64_t chips_per_task = 1;
    std::vector<SyntheticTask> tasks;
};

// Random job: up to `max_tasks` tasks and `max_events` transitions in total,
// all inside [0, horizon). Some tasks stay up to the horizon.
inline SyntheticJob random_job(std::mt19937_64& rng, const std::string& id, int max_tasks, int max_events,
                               Micros horizon) {
    SyntheticJob job;
    job.id = id;
    const int tasks = std::uniform_int_distribution<int>(1, max_tasks)(rng);
    job.chips_per_task = std::uniform_int_distribution<int>(1, 4)(rng);
    job.tasks.resize(static_cast<std::size_t>(tasks));
    int budget = std::uniform_int_distribution<int>(tasks, max_events)(rng);
    // Split the event budget across tasks, at least one transition each.
    std::vector<int> per_task(static_cast<std::size_t>(tasks), 1);
    for (int extra = budget - tasks; extra > 0; --extra) {
        ++per_task[std::uniform_int_distribution<std::size_t>(0, per_task.size() - 1)(rng)];
    }
    for (std::size_t t = 0; t < job.tasks.size(); ++t) {
        const int n = per_task[t];
        std::vector<Micros> points;
        std::uniform_int_distribution<Micros> when(0, horizon - 1);
        while (static_cast<int>(points.size()) < n) points.push_back(when(rng));
        std::sort(points.begin(), points.end());
        points.erase(std::unique(points.begin(), points.end()), points.end());
        for (std::size_t k = 0; k < points.size(); k += 2) {
            const Micros end = k + 1 < points.size() ? points[k + 1] : horizon;
            job.tasks[t].up.push_back({points[k], end});
        }
    }
    return job;
}

// Transitions of one job in time order; down before up at equal instants.
inline std::vector<TaskTransition> transitions_of(const SyntheticJob& job, Micros horizon) {
    std::vector<TaskTransition> out;
    for (std::size_t t = 0; t < job.tasks.size(); ++t) {
        for (const auto& iv : job.tasks[t].up) {
            out.push_back({0, iv.begin, static_cast<int>(t), true});
            if (iv.end < horizon) out.push_back({0, iv.end, static_cast<int>(t), false});
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const TaskTransition& a, const TaskTransition& b) {
        if (a.time != b.time) return a.time < b.time;
        return !a.up && b.up;
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].seq = static_cast<std::int64_t>(i);
    return out;
}

// Per-tick reference: the instants where every task is up.
inline IntervalSet brute_force_all_up(const SyntheticJob& job, Micros horizon) {
    std::vector<char> up_all(static_cast<std::size_t>(horizon), 1);
    for (const auto& task : job.tasks) {
        std::vector<char> up(static_cast<std::size_t>(horizon), 0);
        for (const auto& iv : task.up) {
            for (Micros t = iv.begin; t < iv.end; ++t) up[static_cast<std::size_t>(t)] = 1;
        }
        for (Micros t = 0; t < horizon; ++t) up_all[static_cast<std::size_t>(t)] &= up[static_cast<std::size_t>(t)];
    }
    IntervalSet out;
    for (Micros t = 0; t < horizon; ++t) {
        if (up_all[static_cast<std::size_t>(t)]) out.add({t, t + 1});
    }
    return out;
}

inline Fleet single_pod_fleet(int side) {
    FleetConfig cfg;
    cfg.chip_kinds.push_back({"tpu-a", 1e12, 1e9, "gen1"});
    cfg.pods.push_back({"p0", "tpu-a", {side, side}, ""});
    return build_fleet(cfg);
}

// A trace holding only submission, allocation and task transitions for the
// given jobs, each submitted at time zero.
inline Trace synthetic_trace(const std::vector<SyntheticJob>& jobs, const Fleet& fleet, Micros horizon) {
    Trace trace;
    trace.fleet = fleet;
    trace.header.horizon = horizon;
    trace.header.fleet = fleet_to_json(fleet);
    std::int64_t seq = 0;
    struct Timed {
        Micros time;
        int order;
        Event event;
    };
    std::vector<Timed> timed;
    for (const auto& job : jobs) {
        const int tasks = static_cast<int>(job.tasks.size());
        Event sub;
        sub.kind = EventKind::job_submitted;
        sub.job_id = job.id;
        sub.chips = job.chips_per_task * tasks;
        JobInfo info;
        info.tasks = tasks;
        info.chip_kind = "tpu-a";
        info.generation_tag = "gen1";
        info.framework_tag = "default";
        info.runtime_tag = "default";
        info.work = 1;
        info.graph = "g";
        sub.job = info;
        timed.push_back({0, 0, sub});
        Event alloc;
        alloc.kind = EventKind::tasks_allocated;
        alloc.job_id = job.id;
        alloc.chips = sub.chips;
        alloc.pod = "p0";
        alloc.incarnation = 1;
        timed.push_back({0, 1, alloc});
        for (const auto& tr : transitions_of(job, horizon)) {
            Event e;
            e.kind = tr.up ? EventKind::task_up : EventKind::task_down;
            e.job_id = job.id;
            e.chips = job.chips_per_task;
            e.task = tr.task;
            e.time = tr.time;
            timed.push_back({tr.time, tr.up ? 3 : 2, e});
        }
    }
    std::stable_sort(timed.begin(), timed.end(), [](const Timed& a, const Timed& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.order < b.order;
    });
    for (auto& t : timed) {
        t.event.seq = seq++;
        t.event.time = t.time;
        trace.events.push_back(std::move(t.event));
    }
    return trace;
}

// Two tasks that are never up together: every chip is occupied half the
// time, yet the job is never fully allocated.
inline SyntheticJob alternating_job(Micros horizon) {
    SyntheticJob job;
    job.id = "alt";
    job.chips_per_task = 2;
    job.tasks.resize(2);
    const Micros half = horizon / 2;
    job.tasks[0].up.push_back({0, half});
    job.tasks[1].up.push_back({half, horizon});
    return job;
}

// Random instance: up to `max_jobs` live jobs packed first-fit onto a small
// fleet, plus one request that may need evictions.
struct VictimInstance {
    Fleet fleet;
    ClusterState state;
    JobRequest request;
};

inline VictimInstance random_victim_instance(std::mt19937_64& rng, int max_jobs) {
    FleetConfig cfg;
    cfg.chip_kinds.push_back({"tpu-a", 1e12, 1e9, "gen1"});
    const int pods = std::uniform_int_distribution<int>(1, 2)(rng);
    for (int p = 0; p < pods; ++p) {
        cfg.pods.push_back({"p" + std::to_string(p), "tpu-a", {4, 4}, ""});
    }
    VictimInstance inst{build_fleet(cfg), ClusterState(inst.fleet), {}};
    inst.state = ClusterState(inst.fleet);
    const int jobs = std::uniform_int_distribution<int>(1, max_jobs)(rng);
    std::uniform_int_distribution<int> side(1, 4);
    for (int j = 0; j < jobs; ++j) {
        JobRequest r;
        r.job_id = "j" + std::to_string(j);
        r.chip_kind = "tpu-a";
        r.shape = MeshShape({side(rng), std::uniform_int_distribution<int>(1, 2)(rng)});
        for (const auto& pod : inst.fleet.pods()) {
            auto placement = find_placement(r, pod, inst.state.allocations_on(pod.id));
            if (!placement) continue;
            Allocation a{r.job_id, pod.id, placement->origin, placement->shape, 0};
            inst.state.place(a, std::uniform_int_distribution<int>(0, 3)(rng));
            break;
        }
    }
    inst.request.job_id = "incoming";
    inst.request.chip_kind = "tpu-a";
    inst.request.priority = std::uniform_int_distribution<int>(1, 4)(rng);
    inst.request.shape = MeshShape({side(rng), side(rng)});
    return inst;
}

// True when `request` fits somewhere once `evicted` are gone.
inline bool fits_without(const VictimInstance& inst, const std::vector<std::string>& evicted) {
    ClusterState s = inst.state;
    for (const auto& id : evicted) s.release(id);
    for (const auto& pod : inst.fleet.pods()) {
        if (find_placement(inst.request, pod, s.allocations_on(pod.id))) return true;
    }
    return false;
}

// Smallest number of strictly lower-priority jobs whose eviction makes room,
// by trying every subset.
inline std::optional<std::size_t> exhaustive_min_victims(const VictimInstance& inst) {
    std::vector<std::string> eligible;
    for (const auto& [id, live] : inst.state.live()) {
        if (live.priority < inst.request.priority) eligible.push_back(id);
    }
    std::optional<std::size_t> best;
    const std::uint32_t n = static_cast<std::uint32_t>(eligible.size());
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<std::string> subset;
        for (std::uint32_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) subset.push_back(eligible[i]);
        }
        if (best && subset.size() >= *best) continue;
        if (fits_without(inst, subset)) best = subset.size();
    }
    return best;
}

// Pod-local chip coordinates of an allocation.
inline std::vector<std::vector<int>> chips_of(const std::vector<int>& origin, const std::vector<int>& shape) {
    std::vector<std::vector<int>> out{{}};
    for (std::size_t d = 0; d < shape.size(); ++d) {
        std::vector<std::vector<int>> next;
        for (const auto& prefix : out) {
            for (int k = 0; k < shape[d]; ++k) {
                auto c = prefix;
                c.push_back(origin[d] + k);
                next.push_back(std::move(c));
            }
        }
        out = std::move(next);
    }
    return out;
}

// Replays allocations and their release points (last task down, preemption,
// failure, completion) and counts chips claimed by two jobs at once or placed
// outside their pod.
inline std::int64_t coordinate_conflicts(const Trace& trace) {
    std::map<std::pair<std::string, std::vector<int>>, std::string> owner;
    std::map<std::string, std::vector<std::pair<std::string, std::vector<int>>>> held;
    std::map<std::string, int> up;
    std::int64_t conflicts = 0;
    auto release = [&](const std::string& job) {
        for (const auto& key : held[job]) owner.erase(key);
        held.erase(job);
    };
    for (const auto& e : trace.events) {
        if (e.kind == EventKind::tasks_allocated) {
            release(e.job_id);
            up[e.job_id] = 0;
            const Pod* pod = trace.fleet.find_pod(e.pod);
            if (!pod) {
                ++conflicts;
                continue;
            }
            for (const auto& c : chips_of(e.origin, e.shape)) {
                for (std::size_t d = 0; d < c.size(); ++d) {
                    if (c[d] < 0 || c[d] >= pod->shape.dims()[d]) ++conflicts;
                }
                auto key = std::make_pair(e.pod, c);
                if (!owner.emplace(key, e.job_id).second) ++conflicts;
                held[e.job_id].push_back(key);
            }
        } else if (e.kind == EventKind::task_up) {
            ++up[e.job_id];
        } else if (e.kind == EventKind::task_down) {
            if (--up[e.job_id] == 0) release(e.job_id);
        } else if (e.kind == EventKind::job_completed || e.kind == EventKind::preemption ||
                   e.kind == EventKind::failure) {
            release(e.job_id);
            up[e.job_id] = 0;
        }
    }
    return conflicts;
}

}  // namespace fgp::testing
