// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and time
// limits are fixed here and must not be relaxed to make a criterion pass.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "fgp/analytics.hpp"
#include "fgp/commands.hpp"
#include "fgp/failures.hpp"
#include "fgp/goodput.hpp"
#include "fgp/program.hpp"
#include "fgp/scenario.hpp"
#include "fgp/scheduler.hpp"
#include "fgp/simulator.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace fgp;

namespace {

// Pinned tolerances and limits.
constexpr double kTelescopeTolerance = 1e-12;
constexpr double kDeadBand = 1e-6;
constexpr double kWeightTolerance = 1e-12;
constexpr double kOracleSeconds = 10.0;
constexpr double kCompareSeconds = 5.0;
constexpr double kFig11Seconds = 10.0;
constexpr double kSweepSeconds = 30.0;
constexpr int kRandomJobs = 1000;
constexpr int kMaxTasks = 8;
constexpr int kMaxTransitions = 100;
constexpr Micros kMaxHorizonTicks = 10'000;
constexpr double kExpectedFailures = 10.0;
constexpr double kFailureBand = 2.0;
constexpr int kVictimInstances = 500;
constexpr int kMaxLiveJobs = 6;

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Scenario scenario(const std::string& name) { return load_scenario_file(testing::scenario_path(name)); }

fs::path scratch_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / fmt::format("fgp_accept_{}_{}", tag, ::getpid());
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FGP_BINARY) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Random jobs shared by the interval oracle and the occupancy bound.
struct RandomCase {
    testing::SyntheticJob job;
    Micros horizon = 0;
};

const std::vector<RandomCase>& random_cases() {
    static const std::vector<RandomCase> cases = [] {
        std::mt19937_64 rng(20260601);
        std::vector<RandomCase> out;
        for (int i = 0; i < kRandomJobs; ++i) {
            const Micros horizon = std::uniform_int_distribution<Micros>(2, kMaxHorizonTicks)(rng);
            out.push_back({testing::random_job(rng, fmt::format("r{}", i), kMaxTasks, kMaxTransitions, horizon),
                           horizon});
        }
        return out;
    }();
    return cases;
}

Outcome interval_oracle() {
    Stopwatch clock;
    int mismatches = 0;
    for (const auto& c : random_cases()) {
        const auto got = all_allocated_intervals(testing::transitions_of(c.job, c.horizon),
                                                 static_cast<int>(c.job.tasks.size()), c.horizon);
        if (!(got == testing::brute_force_all_up(c.job, c.horizon))) ++mismatches;
    }
    const double t = clock.seconds();
    return {mismatches == 0 && t < kOracleSeconds,
            fmt::format("{} jobs, {} mismatches, {:.2f} s (limit {:.0f} s)", kRandomJobs, mismatches, t,
                        kOracleSeconds)};
}

Outcome telescoping() {
    double worst = 0.0;
    int mpg_mismatch = 0;
    for (const auto& name : testing::bundled_scenarios()) {
        const Trace trace = run(scenario(name));
        const TraceIndex index(trace);
        const TimeWindow all{0, index.horizon()};
        const auto totals = scope_totals(index, all, Scope::whole_fleet());
        const auto r = make_report(index, all, Scope::whole_fleet());
        if (!r.sg || !r.rg || !r.pg || !r.mpg) return {false, name + ": a fleet component is undefined"};
        const double direct = static_cast<double>(totals.committed) / static_cast<double>(totals.capacity);
        worst = std::max(worst, std::abs(*r.sg * *r.rg - direct));
        if (*r.mpg != *r.sg * *r.rg * *r.pg) ++mpg_mismatch;
    }
    return {worst <= kTelescopeTolerance && mpg_mismatch == 0,
            fmt::format("{} scenarios, max |sg*rg - committed/capacity| = {:.3g} (tol {:.0e}), mpg mismatches {}",
                        testing::bundled_scenarios().size(), worst, kTelescopeTolerance, mpg_mismatch)};
}

Outcome sg_below_occupancy() {
    const Fleet fleet = testing::single_pod_fleet(8);
    int violations = 0;
    for (const auto& c : random_cases()) {
        const TraceIndex index(testing::synthetic_trace({c.job}, fleet, c.horizon));
        const TimeWindow all{0, c.horizon};
        const auto totals = scope_totals(index, all, Scope::whole_fleet());
        const double sg = scheduling_goodput(index, all, Scope::whole_fleet()).value;
        if (totals.allocated > totals.occupied || sg > legacy_metrics(index, all).occupancy) ++violations;
    }
    const Micros horizon = 1000;
    const TraceIndex alt(testing::synthetic_trace({testing::alternating_job(horizon)}, fleet, horizon));
    const double sg = scheduling_goodput(alt, {0, horizon}, Scope::whole_fleet()).value;
    const double occ = legacy_metrics(alt, {0, horizon}).occupancy;
    return {violations == 0 && sg < occ,
            fmt::format("{} violations over {} traces; alternating tasks sg {:.4f} < occupancy {:.4f}", violations,
                        kRandomJobs, sg, occ)};
}

Outcome table2_matrix() {
    Stopwatch clock;
    const fs::path dir = scratch_dir("table2");
    struct Pair {
        std::string stem, factor;
    };
    const std::vector<Pair> pairs{{"table2_device_bound", "compiler"},
                                  {"table2_host_bound", "compiler"},
                                  {"table2_runtime", "runtime"},
                                  {"table2_scheduler", "scheduler"}};
    std::string detail;
    bool ok = true;
    for (const auto& p : pairs) {
        const auto a = (dir / (p.stem + "_a.trace")).string();
        const auto b = (dir / (p.stem + "_b.trace")).string();
        int rc = run_cli("simulate -s " + testing::scenario_path(p.stem + "_a") + " -o " + a);
        if (rc == 0) rc = run_cli("simulate -s " + testing::scenario_path(p.stem + "_b") + " -o " + b);
        if (rc == 0) {
            rc = run_cli(fmt::format("compare -a {} -b {} --factor {} --dead-band {}", a, b, p.factor, kDeadBand));
        }
        ok = ok && rc == 0;
        detail += fmt::format("{}={} ", p.stem.substr(7), rc);
    }
    // The host-bound row must also leave MPG inside the dead band.
    const auto host = compare_scenarios(run(scenario("table2_host_bound_a")), run(scenario("table2_host_bound_b")),
                                        Factor::compiler, kDeadBand);
    ok = ok && host.sign[3] == 0;
    fs::remove_all(dir);
    const double t = clock.seconds();
    return {ok && t < kCompareSeconds,
            fmt::format("compare exit codes {}host mpg delta {:.2g}, {:.2f} s (limit {:.0f} s)", detail,
                        host.delta[3], t, kCompareSeconds)};
}

std::map<std::string, double> sg_by_size(const std::string& name) {
    const TraceIndex index(run(scenario(name)));
    std::map<std::string, double> out;
    for (const auto& r : segment_report(index, {0, index.horizon()}, SegmentDimension::size_class)) {
        if (r.sg) out[r.scope.substr(r.scope.find('=') + 1)] = *r.sg;
    }
    return out;
}

Outcome fig11() {
    Stopwatch clock;
    auto pref = sg_by_size("fig11_eviction");
    auto uni = sg_by_size("fig11_eviction_uniform");
    for (const char* k : {"small", "medium", "xl"}) {
        if (!pref.count(k) || !uni.count(k)) return {false, std::string("no SG for size class ") + k};
    }
    const bool ordered = pref["xl"] > pref["medium"] && pref["small"] > pref["medium"];
    const double gap_xl = pref["xl"] - pref["medium"], gap_small = pref["small"] - pref["medium"];
    const double ugap_xl = uni["xl"] - uni["medium"], ugap_small = uni["small"] - uni["medium"];
    const bool shrinks = ugap_xl <= gap_xl && ugap_small <= gap_small;
    const double t = clock.seconds();
    return {ordered && shrinks && t < kFig11Seconds,
            fmt::format("preference sg xl {:.3f} small {:.3f} medium {:.3f}; uniform gaps xl {:.3f}->{:.3f} "
                        "small {:.3f}->{:.3f}; {:.2f} s (limit {:.0f} s)",
                        pref["xl"], pref["small"], pref["medium"], gap_xl, ugap_xl, gap_small, ugap_small, t,
                        kFig11Seconds)};
}

// Mean committed step length before and after `at`.
std::pair<double, double> step_lengths(const Trace& trace, Micros at) {
    double before = 0, after = 0;
    std::int64_t nb = 0, na = 0;
    for (const auto& e : trace.events) {
        if (e.kind != EventKind::step_committed) continue;
        if (e.run->start < at) {
            before += static_cast<double>(e.run->step_us * e.run->steps);
            nb += e.run->steps;
        } else {
            after += static_cast<double>(e.run->step_us * e.run->steps);
            na += e.run->steps;
        }
    }
    return {nb ? before / static_cast<double>(nb) : 0.0, na ? after / static_cast<double>(na) : 0.0};
}

Outcome overlap_study() {
    const Scenario sc = scenario("overlap_commbound");
    if (sc.passes.size() != 1) return {false, "expected exactly one scheduled pass"};
    const Micros at = sc.passes[0].time;
    const Trace trace = run(sc);
    const TraceIndex index(trace);
    const auto [before, after] = step_lengths(trace, at);
    const double speedup = after > 0 ? before / after : 0.0;
    const double pg0 = program_goodput(index, {0, at}, Scope::whole_fleet()).value;
    const double pg1 = program_goodput(index, {at, index.horizon()}, Scope::whole_fleet()).value;
    return {speedup > 1.0 && speedup <= 2.0 && pg1 > pg0,
            fmt::format("step {:.1f} ms -> {:.1f} ms, speedup {:.3f} in (1, 2]; pg {:.4f} -> {:.4f}", before / 1e3,
                        after / 1e3, speedup, pg0, pg1)};
}

Outcome flop_invariance() {
    int graphs = 0, changed = 0, trace_mismatch = 0, passes = 0;
    for (const auto& name : testing::bundled_scenarios()) {
        const Scenario sc = scenario(name);
        std::map<std::string, std::int64_t> before;
        for (const auto& g : sc.graphs) before[g.label()] = flop_count(g);
        // Push every profile through every scheduled pass.
        for (const auto& job : sc.jobs) {
            StepProfile p = job.profile;
            for (const auto& sp : sc.passes) {
                p = apply_pass(p, sp.pass);
                ++passes;
            }
        }
        for (const auto& g : sc.graphs) {
            ++graphs;
            if (flop_count(g) != before[g.label()]) ++changed;
        }
        // The trace records the unoptimized count for every job, passes or not.
        for (const auto& e : run(sc).events) {
            if (e.kind == EventKind::job_submitted && e.job->flops_per_step != before[e.job->graph]) ++trace_mismatch;
        }
    }
    // With FLOPs fixed, the PG change across the overlap pass is the step-time ratio.
    const Scenario sc = scenario("overlap_commbound");
    const Trace trace = run(sc);
    const TraceIndex index(trace);
    const Micros at = sc.passes[0].time;
    const auto [before, after] = step_lengths(trace, at);
    const double pg_ratio = program_goodput(index, {at, index.horizon()}, Scope::whole_fleet()).value /
                            program_goodput(index, {0, at}, Scope::whole_fleet()).value;
    const bool time_only = std::abs(pg_ratio - before / after) < 1e-3;
    return {changed == 0 && trace_mismatch == 0 && time_only,
            fmt::format("{} graphs, {} pass applications, {} FLOP changes, {} trace mismatches; pg ratio {:.4f} vs "
                        "step-time ratio {:.4f}",
                        graphs, passes, changed, trace_mismatch, pg_ratio, before / after)};
}

std::vector<double> rg_series(const SweepResult& r) {
    std::vector<double> out;
    for (const auto& p : r.points) out.push_back(p.fleet.rg.value_or(std::nan("")));
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += fmt::format("{}{:.4f}", s.empty() ? "" : ",", x);
    return s;
}

Outcome checkpoint_economics() {
    Stopwatch clock;
    const fs::path dir = scratch_dir("sweep");
    const std::string base = testing::scenario_path("checkpoint_economics");
    const std::string param = "jobs[*].runtime.checkpoint_interval";
    const std::vector<std::string> intervals{"1", "5", "20", "100"};

    const auto with_failures = sweep(base, param, intervals, (dir / "base").string());
    const bool interior = with_failures.rg_interior_max.has_value();

    // Same scenario with free checkpoint writes.
    nlohmann::json doc = read_json_file(base);
    set_param(doc, "jobs[*].runtime.checkpoint_write_time", "0");
    const std::string free_path = (dir / "free.json").string();
    write_text_file(free_path, doc.dump(2));
    const auto free_writes = rg_series(sweep(free_path, param, intervals, (dir / "free").string()));
    bool non_increasing = true;
    for (std::size_t i = 1; i < free_writes.size(); ++i) non_increasing = non_increasing && free_writes[i] <= free_writes[i - 1];

    // Paired async/sync runs at every interval.
    nlohmann::json async_doc = read_json_file(base);
    set_param(async_doc, "jobs[*].runtime.async_checkpoint", "true");
    const std::string async_path = (dir / "async.json").string();
    write_text_file(async_path, async_doc.dump(2));
    const auto sync_rg = rg_series(with_failures);
    const auto async_rg = rg_series(sweep(async_path, param, intervals, (dir / "async").string()));
    bool async_wins = true;
    for (std::size_t i = 0; i < sync_rg.size(); ++i) async_wins = async_wins && async_rg[i] >= sync_rg[i];

    fs::remove_all(dir);
    const double t = clock.seconds();
    return {interior && non_increasing && async_wins && t < kSweepSeconds,
            fmt::format("intervals 1,5,20,100: rg {} (interior max {}); zero-write rg {}; async rg {}; {:.2f} s "
                        "(limit {:.0f} s)",
                        join(sync_rg), interior ? intervals[*with_failures.rg_interior_max] : "none", join(free_writes),
                        join(async_rg), t, kSweepSeconds)};
}

Outcome failure_calibration() {
    double total = 0;
    constexpr int seeds = 30;
    for (int s = 0; s < seeds; ++s) {
        total += static_cast<double>(inject_failures(static_cast<std::uint64_t>(s), 1000, 1e6, 10'000 * kMicrosPerSecond).size());
    }
    const double mean = total / seeds;
    return {std::abs(mean - kExpectedFailures) <= kFailureBand,
            fmt::format("mean {:.2f} failures over {} seeds (expected {:.0f} +/- {:.0f})", mean, seeds,
                        kExpectedFailures, kFailureBand)};
}

SimpsonResult simpson_of(const std::string& name) {
    const TraceIndex index(run(scenario(name)));
    const Micros mid = index.horizon() / 2;
    const TimeWindow first{0, mid}, second{mid, index.horizon()};
    return simpson_check(segment_report(index, first, SegmentDimension::chip_kind),
                         segment_report(index, second, SegmentDimension::chip_kind),
                         make_report(index, first, Scope::whole_fleet()),
                         make_report(index, second, Scope::whole_fleet()), Metric::pg, kDeadBand);
}

Outcome simpson() {
    // Recompute the evidence weights independently from the segment rows.
    const TraceIndex index(run(scenario("simpson")));
    const Micros mid = index.horizon() / 2;
    auto shares = [&](TimeWindow w) {
        std::map<std::string, double> out;
        double total = 0;
        for (const auto& r : segment_report(index, w, SegmentDimension::chip_kind)) {
            out[r.scope] = r.pg_den;
            total += r.pg_den;
        }
        for (auto& [k, v] : out) v /= total;
        return out;
    };
    const auto wb = shares({0, mid}), wa = shares({mid, index.horizon()});
    const SimpsonResult r = simpson_of("simpson");
    bool weights_ok = !r.segments.empty();
    bool all_up = true;
    for (const auto& s : r.segments) {
        weights_ok = weights_ok && std::abs(s.weight_before - wb.at(s.scope)) <= kWeightTolerance &&
                     std::abs(s.weight_after - wa.at(s.scope)) <= kWeightTolerance;
        all_up = all_up && s.sign > 0;
    }
    const SimpsonResult control = simpson_of("simpson_control");
    std::string segs;
    for (const auto& s : r.segments) {
        segs += fmt::format(" {} {:.3f}->{:.3f} (w {:.3f}->{:.3f})", s.scope, s.before, s.after, s.weight_before,
                            s.weight_after);
    }
    return {r.flagged && all_up && r.aggregate_sign < 0 && weights_ok && !control.flagged,
            fmt::format("aggregate pg {:.4f}->{:.4f};{}; control flagged={}", r.aggregate_before, r.aggregate_after,
                        segs, control.flagged)};
}

Outcome determinism_and_safety() {
    int differing = 0;
    std::int64_t conflicts = 0;
    for (const auto& name : testing::bundled_scenarios()) {
        const Scenario sc = scenario(name);
        const Trace first = run(sc);
        if (serialize_trace(first) != serialize_trace(run(sc))) ++differing;
        conflicts += testing::coordinate_conflicts(first);
    }
    std::mt19937_64 rng(77);
    int checked = 0, not_minimal = 0;
    for (int i = 0; i < kVictimInstances; ++i) {
        const auto inst = testing::random_victim_instance(rng, kMaxLiveJobs);
        if (testing::fits_without(inst, {})) continue;
        const auto expected = testing::exhaustive_min_victims(inst);
        const auto got = select_victims(inst.request, inst.state, EvictionPolicy{});
        ++checked;
        if (got.has_value() != expected.has_value()) {
            ++not_minimal;
        } else if (got && (got->size() != *expected || !testing::fits_without(inst, *got))) {
            ++not_minimal;
        }
    }
    return {differing == 0 && conflicts == 0 && not_minimal == 0,
            fmt::format("{} scenarios: {} non-identical reruns, {} coordinate conflicts; victim sets: {} of {} "
                        "instances not minimal",
                        testing::bundled_scenarios().size(), differing, conflicts, not_minimal, checked)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"interval-oracle", interval_oracle},
        {"goodput-telescoping", telescoping},
        {"sg-below-occupancy", sg_below_occupancy},
        {"paired-change-directions", table2_matrix},
        {"eviction-preference-by-size", fig11},
        {"overlap-case-study", overlap_study},
        {"pg-compiler-invariance", flop_invariance},
        {"checkpoint-economics", checkpoint_economics},
        {"failure-calibration", failure_calibration},
        {"simpson-detection", simpson},
        {"determinism-and-safety", determinism_and_safety},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
