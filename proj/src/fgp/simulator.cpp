// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#include "simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>

#include "errors.hpp"
#include "failures.hpp"

namespace fgp {

Micros step_micros(const StepProfile& profile) {
    return std::max<Micros>(1, seconds_to_micros(actual_step_time(profile).seconds));
}

namespace {

// Processing order for simultaneous internal events: commits land before new
// boundaries, lifecycle progress before passes, failures after work that
// finished at the same instant, arrivals last.
enum class Pending : int {
    checkpoint_done = 0,
    inflight_commit = 1,
    step_boundary = 2,
    task_up = 3,
    init_done = 4,
    restore_done = 5,
    pass_apply = 6,
    failure = 7,
    arrival = 8,
};

struct Internal {
    Micros time = 0;
    Pending kind = Pending::arrival;
    int job_rank = 0;
    std::int64_t seq = 0;
    std::size_t job = 0;
    int incarnation = 0;
    std::int64_t token = 0;
    std::int64_t aux = 0;  // task index, checkpoint step, pass index or flat chip index

    auto key() const { return std::make_tuple(time, static_cast<int>(kind), job_rank, seq); }
    bool operator>(const Internal& o) const { return key() > o.key(); }
};

enum class State { not_arrived, pending, starting, initializing, restoring, stepping, writing, done, unschedulable };

struct InFlight {
    std::int64_t step = 0;
    Micros commits_at = 0;
};

struct JobSim {
    const JobSpec* spec = nullptr;
    int rank = 0;
    State state = State::not_arrived;
    int incarnation = 0;
    std::int64_t token = 0;
    std::optional<Allocation> alloc;
    int tasks_up = 0;
    std::int64_t committed = 0;
    StepProfile profile;

    // Current stepping run.
    Micros run_start = 0;
    std::int64_t run_base = 0;
    Micros step_us = 1;
    Boundedness bound = Boundedness::device;
    std::int64_t boundary = 0;

    std::vector<StepRun> uncommitted;
    std::deque<InFlight> inflight;
};

class Simulation {
public:
    explicit Simulation(const Scenario& sc) : sc_(sc), cluster_(sc.fleet) {
        jobs_.resize(sc.jobs.size());
        std::vector<std::size_t> by_id(sc.jobs.size());
        for (std::size_t i = 0; i < by_id.size(); ++i) by_id[i] = i;
        std::sort(by_id.begin(), by_id.end(),
                  [&](std::size_t a, std::size_t b) { return sc.jobs[a].request.job_id < sc.jobs[b].request.job_id; });
        for (std::size_t r = 0; r < by_id.size(); ++r) jobs_[by_id[r]].rank = static_cast<int>(r);
        for (std::size_t i = 0; i < jobs_.size(); ++i) {
            jobs_[i].spec = &sc.jobs[i];
            jobs_[i].profile = sc.jobs[i].profile;
            index_[sc.jobs[i].request.job_id] = i;
        }
        std::int64_t offset = 0;
        for (const auto& pod : sc.fleet.pods()) {
            pod_offset_[pod.id] = offset;
            owners_[pod.id].assign(static_cast<std::size_t>(pod.shape.chip_count()), -1);
            offset += pod.shape.chip_count();
        }
    }

    Trace execute() {
        for (std::size_t i = 0; i < jobs_.size(); ++i) {
            push(sc_.jobs[i].request.arrival, Pending::arrival, i, 0, 0, 0);
        }
        for (std::size_t p = 0; p < sc_.passes.size(); ++p) {
            push(sc_.passes[p].time, Pending::pass_apply, 0, 0, 0, static_cast<std::int64_t>(p));
        }
        schedule_failures();

        while (!queue_.empty() && queue_.top().time <= sc_.horizon) {
            const Micros t = queue_.top().time;
            while (!queue_.empty() && queue_.top().time == t) {
                Internal ev = queue_.top();
                queue_.pop();
                now_ = t;
                handle(ev);
            }
            now_ = t;
            if (dirty_ && t < sc_.horizon) {
                dirty_ = false;
                schedule();
            }
        }
        now_ = sc_.horizon;
        for (std::size_t i : by_rank()) {
            JobSim& j = jobs_[i];
            if (is_live(j.state)) end_incarnation(i, "horizon", /*release=*/false);
        }

        Trace trace;
        trace.header.scenario_name = sc_.name;
        trace.header.scenario_hash = sc_.hash;
        trace.header.sections = sc_.sections.as_map();
        trace.header.seed = sc_.seed;
        trace.header.horizon = sc_.horizon;
        trace.header.fleet = fleet_to_json(sc_.fleet);
        trace.fleet = sc_.fleet;
        trace.events = std::move(events_);
        return trace;
    }

private:
    static bool is_live(State s) {
        return s == State::starting || s == State::initializing || s == State::restoring || s == State::stepping ||
               s == State::writing;
    }

    std::vector<std::size_t> by_rank() const {
        std::vector<std::size_t> order(jobs_.size());
        for (std::size_t i = 0; i < jobs_.size(); ++i) order[static_cast<std::size_t>(jobs_[i].rank)] = i;
        return order;
    }

    void push(Micros time, Pending kind, std::size_t job, int incarnation, std::int64_t token, std::int64_t aux) {
        Internal ev;
        ev.time = time;
        ev.kind = kind;
        ev.job = job;
        ev.job_rank = (kind == Pending::pass_apply || kind == Pending::failure) ? -1 : jobs_[job].rank;
        ev.seq = next_internal_++;
        ev.incarnation = incarnation;
        ev.token = token;
        ev.aux = aux;
        queue_.push(ev);
    }

    Event& emit(EventKind kind, std::size_t job) {
        Event e;
        e.seq = static_cast<std::int64_t>(events_.size());
        e.time = now_;
        e.kind = kind;
        e.job_id = sc_.jobs[job].request.job_id;
        e.chips = sc_.jobs[job].request.shape.chip_count();
        events_.push_back(std::move(e));
        return events_.back();
    }

    void schedule_failures() {
        for (const auto& f : sc_.failures.injected) {
            const Pod* pod = sc_.fleet.find_pod(f.pod);
            push(f.time, Pending::failure, 0, 0, 0, pod_offset_.at(f.pod) + linear_index(*pod, f.chip));
        }
        if (!sc_.failures.enabled) return;
        for (const auto& pod : sc_.fleet.pods()) {
            const double mtbf = sc_.fleet.find_chip_kind(pod.chip_kind)->mtbf;
            const std::int64_t base = pod_offset_.at(pod.id);
            for (std::int64_t c = 0; c < pod.shape.chip_count(); ++c) {
                for (Micros t : chip_failure_times(sc_.seed, base + c, mtbf, sc_.horizon)) {
                    push(t, Pending::failure, 0, 0, 0, base + c);
                }
            }
        }
    }

    static std::int64_t linear_index(const Pod& pod, const std::vector<int>& coord) {
        std::int64_t idx = 0;
        for (std::size_t d = 0; d < coord.size(); ++d) idx = idx * pod.shape.dims()[d] + coord[d];
        return idx;
    }

    static std::vector<int> coordinate(const Pod& pod, std::int64_t linear) {
        std::vector<int> c(pod.shape.rank());
        for (std::size_t d = pod.shape.rank(); d-- > 0;) {
            c[d] = static_cast<int>(linear % pod.shape.dims()[d]);
            linear /= pod.shape.dims()[d];
        }
        return c;
    }

    void mark_owner(const Allocation& a, int owner) {
        const Pod* pod = sc_.fleet.find_pod(a.pod_id);
        auto& grid = owners_[a.pod_id];
        const auto& pd = pod->shape.dims();
        const auto& sd = a.shape.dims();
        std::vector<int> c(pd.size(), 0);
        // Iterate every coordinate of the allocated box.
        std::function<void(std::size_t)> rec = [&](std::size_t axis) {
            if (axis == pd.size()) {
                std::vector<int> abs(pd.size());
                for (std::size_t d = 0; d < pd.size(); ++d) abs[d] = a.origin[d] + c[d];
                grid[static_cast<std::size_t>(linear_index(*pod, abs))] = owner;
                return;
            }
            for (c[axis] = 0; c[axis] < sd[axis]; ++c[axis]) rec(axis + 1);
        };
        rec(0);
    }

    void handle(const Internal& ev) {
        switch (ev.kind) {
            case Pending::arrival: on_arrival(ev.job); break;
            case Pending::task_up: on_task_up(ev); break;
            case Pending::init_done: on_init_done(ev); break;
            case Pending::restore_done: on_restore_done(ev); break;
            case Pending::step_boundary: on_boundary(ev); break;
            case Pending::checkpoint_done: on_checkpoint_done(ev); break;
            case Pending::inflight_commit: on_inflight_commit(ev); break;
            case Pending::pass_apply: on_pass(static_cast<std::size_t>(ev.aux)); break;
            case Pending::failure: on_failure(ev.aux); break;
        }
    }

    void on_arrival(std::size_t i) {
        JobSim& j = jobs_[i];
        const JobSpec& spec = *j.spec;
        const OpGraph& graph = sc_.graph(spec.graph);
        const ChipKind& kind = *sc_.fleet.find_chip_kind(spec.request.chip_kind);
        JobInfo info;
        info.tasks = spec.tasks;
        info.phase = spec.request.phase;
        info.chip_kind = kind.name;
        info.generation_tag = kind.generation_tag;
        info.size_class = classify_size(spec.request.shape.chip_count(), sc_.fleet);
        info.framework_tag = spec.request.framework_tag;
        info.runtime_tag = spec.request.runtime_tag;
        info.priority = spec.request.priority;
        info.work = spec.request.work;
        info.graph = spec.graph;
        info.flops_per_step = flop_count(graph);
        info.ideal_step_seconds = ideal_exec_time(graph, kind, spec.request.shape.chip_count(), 1);
        emit(EventKind::job_submitted, i).job = info;
        j.state = State::pending;
        dirty_ = true;
    }

    void schedule() {
        for (int round = 0; round < 1000; ++round) {
            std::vector<JobRequest> pending;
            for (const auto& j : jobs_) {
                if (j.state == State::pending) pending.push_back(j.spec->request);
            }
            if (pending.empty()) return;
            auto actions = schedule_tick(pending, cluster_, now_, sc_.scheduler.policy, sc_.scheduler.limits);
            bool preempted = false;
            for (const auto& a : actions) {
                const std::size_t i = index_.at(a.job_id);
                switch (a.kind) {
                    case ScheduleAction::Kind::preempt: {
                        Event& e = emit(EventKind::preemption, i);
                        e.by = a.preempted_by;
                        kill(i, "preemption");
                        preempted = true;
                        break;
                    }
                    case ScheduleAction::Kind::allocate: allocate(i, a.allocation); break;
                    case ScheduleAction::Kind::unschedulable: {
                        Event& e = emit(EventKind::unschedulable, i);
                        e.reason = a.reason;
                        jobs_[i].state = State::unschedulable;
                        break;
                    }
                }
            }
            if (!preempted) return;
        }
        throw PreconditionError("scheduler did not settle");
    }

    void allocate(std::size_t i, const Allocation& a) {
        JobSim& j = jobs_[i];
        j.state = State::starting;
        ++j.incarnation;
        j.tasks_up = 0;
        j.alloc = a;
        cluster_.place(a, j.spec->request.priority);
        mark_owner(a, static_cast<int>(i));
        Event& e = emit(EventKind::tasks_allocated, i);
        e.pod = a.pod_id;
        e.origin = a.origin;
        e.shape = a.shape.dims();
        e.incarnation = j.incarnation;
        for (int k = 0; k < j.spec->tasks; ++k) {
            push(now_ + k * sc_.scheduler.task_startup_stagger, Pending::task_up, i, j.incarnation, 0, k);
        }
    }

    std::int64_t task_chips(std::size_t i) const {
        return sc_.jobs[i].request.shape.chip_count() / sc_.jobs[i].tasks;
    }

    void on_task_up(const Internal& ev) {
        JobSim& j = jobs_[ev.job];
        if (j.state != State::starting || j.incarnation != ev.incarnation) return;
        Event& e = emit(EventKind::task_up, ev.job);
        e.task = static_cast<int>(ev.aux);
        e.chips = task_chips(ev.job);
        if (++j.tasks_up < j.spec->tasks) return;
        emit(EventKind::all_up_begin, ev.job);
        j.state = State::initializing;
        const auto& rt = j.spec->runtime;
        double init = rt.init_time;
        if (rt.aot_compile && compiled_.count(j.spec->graph)) init -= rt.compile_time;
        push(now_ + seconds_to_micros(init), Pending::init_done, ev.job, j.incarnation, 0, 0);
    }

    void on_init_done(const Internal& ev) {
        JobSim& j = jobs_[ev.job];
        if (j.state != State::initializing || j.incarnation != ev.incarnation) return;
        compiled_.insert(j.spec->graph);
        if (j.incarnation > 1 && j.committed > 0) {
            emit(EventKind::restore_begin, ev.job);
            j.state = State::restoring;
            push(now_ + seconds_to_micros(j.spec->runtime.restore_time), Pending::restore_done, ev.job, j.incarnation, 0, 0);
            return;
        }
        start_stepping(ev.job, j.committed);
    }

    void on_restore_done(const Internal& ev) {
        JobSim& j = jobs_[ev.job];
        if (j.state != State::restoring || j.incarnation != ev.incarnation) return;
        emit(EventKind::restore_end, ev.job);
        start_stepping(ev.job, j.committed);
    }

    std::int64_t commit_unit(const JobSim& j) const {
        const auto& spec = *j.spec;
        switch (spec.request.phase) {
            case Phase::training: return spec.runtime.checkpoint_interval;
            case Phase::bulk_inference: return (spec.request.work + spec.runtime.shards - 1) / spec.runtime.shards;
            case Phase::serving: return spec.request.work;
        }
        return spec.request.work;
    }

    void start_stepping(std::size_t i, std::int64_t base) {
        JobSim& j = jobs_[i];
        j.state = State::stepping;
        j.run_start = now_;
        j.run_base = base;
        j.step_us = step_micros(j.profile);
        j.bound = actual_step_time(j.profile).bound;
        const std::int64_t unit = commit_unit(j);
        j.boundary = std::min(j.spec->request.work, (base / unit + 1) * unit);
        ++j.token;
        push(j.run_start + (j.boundary - j.run_base) * j.step_us, Pending::step_boundary, i, j.incarnation, j.token, 0);
    }

    // Moves the completed part of the current run (up to `executed`) to the
    // uncommitted list.
    void close_run(JobSim& j, std::int64_t executed) {
        const std::int64_t steps = executed - j.run_base;
        if (steps > 0) j.uncommitted.push_back(StepRun{j.run_start, steps, j.step_us, j.bound});
        j.run_start += steps * j.step_us;
        j.run_base = executed;
    }

    void commit_up_to(std::size_t i, std::int64_t step) {
        JobSim& j = jobs_[i];
        std::int64_t remaining = step - j.committed;
        std::vector<StepRun> rest;
        for (auto& r : j.uncommitted) {
            if (remaining <= 0) {
                rest.push_back(r);
                continue;
            }
            const std::int64_t take = std::min(remaining, r.steps);
            StepRun part{r.start, take, r.step_us, r.bound};
            emit(EventKind::step_committed, i).run = part;
            remaining -= take;
            if (take < r.steps) rest.push_back(StepRun{r.start + take * r.step_us, r.steps - take, r.step_us, r.bound});
        }
        if (remaining > 0) throw PreconditionError("commit beyond executed steps");
        j.uncommitted = std::move(rest);
        j.committed = step;
        while (!j.inflight.empty() && j.inflight.front().step <= step) j.inflight.pop_front();
    }

    void begin_checkpoint(std::size_t i, std::int64_t step, CheckpointMode mode, Micros write) {
        Event& e = emit(EventKind::checkpoint_begin, i);
        e.step = step;
        e.mode = mode;
        e.write_us = write;
    }

    void on_boundary(const Internal& ev) {
        JobSim& j = jobs_[ev.job];
        if (j.state != State::stepping || j.incarnation != ev.incarnation || j.token != ev.token) return;
        const auto& spec = *j.spec;
        const auto& rt = spec.runtime;
        const std::int64_t target = j.boundary;
        close_run(j, target);
        const bool final_step = target == spec.request.work;

        if (spec.request.phase == Phase::serving) {
            complete(ev.job);
            return;
        }
        if (spec.request.phase == Phase::bulk_inference) {
            const Micros wait = seconds_to_micros(rt.shard_barrier_wait);
            begin_checkpoint(ev.job, target, CheckpointMode::shard_barrier, wait);
            j.state = State::writing;
            push(now_ + wait, Pending::checkpoint_done, ev.job, j.incarnation, 0, target);
            return;
        }
        const Micros write = seconds_to_micros(rt.checkpoint_write_time);
        if (final_step && target % rt.checkpoint_interval != 0) {
            complete(ev.job);
            return;
        }
        if (!rt.async_checkpoint || final_step) {
            begin_checkpoint(ev.job, target, rt.async_checkpoint ? CheckpointMode::async : CheckpointMode::sync, write);
            j.state = State::writing;
            push(now_ + write, Pending::checkpoint_done, ev.job, j.incarnation, 0, target);
            return;
        }
        begin_checkpoint(ev.job, target, CheckpointMode::async, write);
        j.inflight.push_back({target, now_ + write});
        push(now_ + write, Pending::inflight_commit, ev.job, j.incarnation, 0, target);
        start_stepping(ev.job, target);
    }

    void on_checkpoint_done(const Internal& ev) {
        JobSim& j = jobs_[ev.job];
        if (j.state != State::writing || j.incarnation != ev.incarnation) return;
        commit_up_to(ev.job, ev.aux);
        emit(EventKind::checkpoint_committed, ev.job).step = ev.aux;
        if (ev.aux == j.spec->request.work) {
            complete(ev.job);
            return;
        }
        start_stepping(ev.job, ev.aux);
    }

    void on_inflight_commit(const Internal& ev) {
        JobSim& j = jobs_[ev.job];
        if (!is_live(j.state) || j.incarnation != ev.incarnation || ev.aux <= j.committed) return;
        commit_up_to(ev.job, ev.aux);
        emit(EventKind::checkpoint_committed, ev.job).step = ev.aux;
    }

    void complete(std::size_t i) {
        JobSim& j = jobs_[i];
        const std::int64_t work = j.spec->request.work;
        if (j.committed < work) {
            commit_up_to(i, work);
            if (j.spec->request.phase != Phase::serving) {
                Event& e = emit(EventKind::checkpoint_committed, i);
                e.step = work;
                e.implicit_commit = true;
            }
        }
        end_incarnation(i, "completed", /*release=*/true);
        emit(EventKind::job_completed, i);
        j.state = State::done;
    }

    // Emits all_up_end (with uncommitted stepping time as `lost`) and the task
    // downs for a live incarnation. Serving jobs commit finished batches first.
    void end_incarnation(std::size_t i, const std::string& reason, bool release) {
        JobSim& j = jobs_[i];
        std::vector<Interval> lost;
        if (j.state == State::stepping) {
            const std::int64_t done = j.run_base + (now_ - j.run_start) / j.step_us;
            close_run(j, done);
            if (j.spec->request.phase == Phase::serving && done > j.committed) commit_up_to(i, done);
        }
        for (const auto& r : j.uncommitted) lost.push_back({r.start, r.end()});
        if (j.state == State::stepping && now_ > j.run_start) lost.push_back({j.run_start, now_});
        const bool all_up = j.tasks_up == j.spec->tasks;
        if (all_up) {
            Event& e = emit(EventKind::all_up_end, i);
            e.lost = lost;
            e.reason = reason;
        }
        for (int k = 0; k < j.tasks_up; ++k) {
            Event& e = emit(EventKind::task_down, i);
            e.task = k;
            e.chips = task_chips(i);
        }
        j.uncommitted.clear();
        j.inflight.clear();
        j.tasks_up = 0;
        ++j.token;
        if (release && j.alloc) {
            mark_owner(*j.alloc, -1);
            cluster_.release(j.spec->request.job_id);
            j.alloc.reset();
            dirty_ = true;
        }
    }

    void kill(std::size_t i, const std::string& reason) {
        end_incarnation(i, reason, /*release=*/true);
        jobs_[i].state = State::pending;
    }

    void on_failure(std::int64_t flat_chip) {
        const Pod* hit = nullptr;
        for (const auto& pod : sc_.fleet.pods()) {
            const std::int64_t base = pod_offset_.at(pod.id);
            if (flat_chip >= base && flat_chip < base + pod.shape.chip_count()) hit = &pod;
        }
        if (!hit) return;
        const std::int64_t local = flat_chip - pod_offset_.at(hit->id);
        const int owner = owners_.at(hit->id)[static_cast<std::size_t>(local)];
        if (owner < 0) return;
        const auto i = static_cast<std::size_t>(owner);
        if (!is_live(jobs_[i].state)) return;
        Event& e = emit(EventKind::failure, i);
        e.pod = hit->id;
        e.chip = coordinate(*hit, local);
        kill(i, "failure");
    }

    void on_pass(std::size_t p) {
        const ScheduledPass& sp = sc_.passes[p];
        for (std::size_t i = 0; i < jobs_.size(); ++i) {
            if (!sp.jobs.empty() && std::find(sp.jobs.begin(), sp.jobs.end(), sc_.jobs[i].request.job_id) == sp.jobs.end()) {
                continue;
            }
            JobSim& j = jobs_[i];
            j.profile = apply_pass(j.profile, sp.pass);
            if (j.state != State::stepping) continue;
            const Micros new_us = step_micros(j.profile);
            const Boundedness new_bound = actual_step_time(j.profile).bound;
            if (new_us == j.step_us && new_bound == j.bound) continue;
            // The step in flight finishes at the old speed; the change applies from the next step.
            const std::int64_t k = (now_ - j.run_start + j.step_us - 1) / j.step_us;
            if (j.run_base + k >= j.boundary) continue;
            close_run(j, j.run_base + k);
            j.step_us = new_us;
            j.bound = new_bound;
            ++j.token;
            push(j.run_start + (j.boundary - j.run_base) * j.step_us, Pending::step_boundary, i, j.incarnation, j.token, 0);
        }
    }

    const Scenario& sc_;
    ClusterState cluster_;
    std::vector<JobSim> jobs_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, std::int64_t> pod_offset_;
    std::map<std::string, std::vector<int>> owners_;
    std::set<std::string> compiled_;
    std::priority_queue<Internal, std::vector<Internal>, std::greater<>> queue_;
    std::int64_t next_internal_ = 0;
    std::vector<Event> events_;
    Micros now_ = 0;
    bool dirty_ = false;
};

}  // namespace

Trace run(const Scenario& scenario) { return Simulation(scenario).execute(); }

TraceSummary summarize(const Trace& trace) {
    TraceSummary s;
    s.horizon = trace.header.horizon;
    s.events = static_cast<std::int64_t>(trace.events.size());
    for (const auto& e : trace.events) {
        if (e.kind == EventKind::job_submitted) ++s.jobs_submitted;
        if (e.kind == EventKind::job_completed) ++s.jobs_completed;
    }
    return s;
}

ServingCommit serving_commit_model(const JobSpec& job, Micros start, Micros tick) {
    if (job.request.phase == Phase::training) {
        throw PreconditionError("serving_commit_model: job '" + job.request.job_id + "' is a training job");
    }
    ServingCommit out;
    const Micros d = step_micros(job.profile);
    const Boundedness bound = actual_step_time(job.profile).bound;
    const std::int64_t work = job.request.work;
    if (tick <= start) return out;
    if (job.request.phase == Phase::serving) {
        const std::int64_t done = std::min(work, (tick - start) / d);
        if (done > 0) out.committed.push_back(StepRun{start, done, d, bound});
        out.committed_steps = done;
        out.lost = done < work ? (tick - start) - done * d : 0;
        return out;
    }
    const std::int64_t shard = (work + job.runtime.shards - 1) / job.runtime.shards;
    const Micros wait = seconds_to_micros(job.runtime.shard_barrier_wait);
    Micros t = start;
    std::int64_t base = 0;
    while (base < work) {
        const std::int64_t n = std::min(shard, work - base);
        const Micros stepping_end = t + n * d;
        if (tick < stepping_end + wait) {
            // Cut off inside this shard: its stepping (done so far) is lost.
            out.lost = std::min(tick, stepping_end) - t;
            out.barrier_wait += std::max<Micros>(0, tick - stepping_end);
            break;
        }
        out.committed.push_back(StepRun{t, n, d, bound});
        out.committed_steps += n;
        out.barrier_wait += wait;
        t = stepping_end + wait;
        base += n;
    }
    return out;
}

}  // namespace fgp
