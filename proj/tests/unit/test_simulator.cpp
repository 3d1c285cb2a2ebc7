// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#include <doctest.h>

#include "fgp/errors.hpp"
#include "fgp/goodput.hpp"
#include "fgp/scenario.hpp"
#include "fgp/simulator.hpp"
#include "support.hpp"

using namespace fgp;
using nlohmann::json;

namespace {

constexpr Micros S = kMicrosPerSecond;

std::vector<const Event*> of_kind(const Trace& t, EventKind kind) {
    std::vector<const Event*> out;
    for (const auto& e : t.events) {
        if (e.kind == kind) out.push_back(&e);
    }
    return out;
}

Micros completion_time(const Trace& t) {
    auto done = of_kind(t, EventKind::job_completed);
    REQUIRE(done.size() == 1);
    return done[0]->time;
}

JobSpec serving_job(Phase phase) {
    JobSpec j;
    j.request.job_id = "s";
    j.request.phase = phase;
    j.request.work = 8;
    j.profile = {1.0, 0.0, 0.0, 0.0};
    return j;
}

}  // namespace

TEST_CASE("synchronous checkpoints block stepping") {
    const Trace t = run(parse_scenario(testing::single_job_document()));
    // init 0-5, steps 5-10, write 10-11, steps 11-16, final write 16-17.
    CHECK(completion_time(t) == 17 * S);
    auto commits = of_kind(t, EventKind::checkpoint_committed);
    REQUIRE(commits.size() == 2);
    CHECK(commits[0]->time == 11 * S);
    CHECK(commits[0]->step == 5);
    CHECK(commits[1]->step == 10);
    auto runs = of_kind(t, EventKind::step_committed);
    std::int64_t steps = 0;
    for (auto* e : runs) steps += e->run->steps;
    CHECK(steps == 10);

    const TraceIndex index(t);
    const auto rg = runtime_goodput(index, {0, 30 * S}, Scope::whole_fleet());
    CHECK(rg.value == doctest::Approx(10.0 / 17.0));
    const auto sg = scheduling_goodput(index, {0, 30 * S}, Scope::whole_fleet());
    CHECK(sg.value == doctest::Approx(17.0 / 30.0));
}

TEST_CASE("asynchronous checkpoints overlap stepping") {
    json doc = testing::single_job_document();
    doc["jobs"][0]["runtime"]["async_checkpoint"] = true;
    const Trace t = run(parse_scenario(doc));
    // steps 5-15 uninterrupted; the last write (15-16) must land before completion.
    CHECK(completion_time(t) == 16 * S);
    auto commits = of_kind(t, EventKind::checkpoint_committed);
    REQUIRE(commits.size() == 2);
    CHECK(commits[0]->time == 11 * S);
    CHECK(commits[1]->step == 10);
}

TEST_CASE("a failure loses uncommitted steps and resumes from the checkpoint") {
    json doc = testing::single_job_document();
    doc["jobs"][0]["runtime"]["restore_time"] = 1;
    // Step 6 runs 11-12, step 7 runs 12-13; fail halfway through step 7.
    doc["failures"] = {{"injected", json::array({{{"time", 12.5}, {"pod", "p0"}, {"chip", {1, 1}}}})}};
    const Trace t = run(parse_scenario(doc));

    auto failures = of_kind(t, EventKind::failure);
    REQUIRE(failures.size() == 1);
    CHECK(failures[0]->time == 12'500'000);

    auto ends = of_kind(t, EventKind::all_up_end);
    REQUIRE(ends.size() >= 1);
    CHECK(IntervalSet::from_unsorted(ends[0]->lost) == IntervalSet{{11 * S, 12'500'000}});

    auto restores = of_kind(t, EventKind::restore_begin);
    REQUIRE(restores.size() == 1);
    // Rescheduled at once: init 12.5-17.5, restore 17.5-18.5, five steps left.
    CHECK(restores[0]->time == 17'500'000);

    std::int64_t steps = 0;
    for (auto* e : of_kind(t, EventKind::step_committed)) steps += e->run->steps;
    CHECK(steps == 10);
    // 18.5 + 5 steps + final write.
    CHECK(completion_time(t) == 24'500'000);
}

TEST_CASE("a failure on a chip nobody holds is ignored") {
    json doc = testing::single_job_document();
    doc["failures"] = {{"injected", json::array({{{"time", 20}, {"pod", "p0"}, {"chip", {0, 0}}}})}};
    const Trace t = run(parse_scenario(doc));
    CHECK(of_kind(t, EventKind::failure).empty());
    CHECK(completion_time(t) == 17 * S);
}

TEST_CASE("serving commits every finished batch") {
    const auto m = serving_commit_model(serving_job(Phase::serving), 0, 3'500'000);
    CHECK(m.committed_steps == 3);
    CHECK(m.lost == 500'000);
    CHECK(m.barrier_wait == 0);
    const auto exact = serving_commit_model(serving_job(Phase::serving), 0, 3 * S);
    CHECK(exact.committed_steps == 3);
    CHECK(exact.lost == 0);
}

TEST_CASE("bulk inference commits per shard after a barrier") {
    JobSpec j = serving_job(Phase::bulk_inference);
    j.runtime.shards = 4;
    j.runtime.shard_barrier_wait = 2.0;
    // Eight steps in four shards: 2 s of steps then a 2 s barrier, four times.
    const auto done = serving_commit_model(j, 0, 100 * S);
    CHECK(done.committed_steps == 8);
    CHECK(done.barrier_wait == 8 * S);
    Micros committed_time = 0;
    for (const auto& r : done.committed) committed_time += r.steps * r.step_us;
    CHECK(committed_time == 8 * S);

    // Cut in the second barrier: the second shard's steps are not yet committed.
    const auto cut = serving_commit_model(j, 0, 7 * S);
    CHECK(cut.committed_steps == 2);
    CHECK(cut.lost == 2 * S);
}

TEST_CASE("the commit model rejects training jobs") {
    CHECK_THROWS_AS(serving_commit_model(serving_job(Phase::training), 0, S), PreconditionError);
}

TEST_CASE("step duration never rounds to zero") {
    CHECK(step_micros({0.0, 0.0, 0.0, 0.0}) == 1);
    CHECK(step_micros({0.010, 0.010, 0.0, 0.9}) == 11'000);
}

TEST_CASE("the simulator is deterministic") {
    const Scenario sc = load_scenario_file(testing::scenario_path("chip_lifecycle"));
    CHECK(serialize_trace(run(sc)) == serialize_trace(run(sc)));
}

TEST_CASE("jobs that can never fit are reported unschedulable") {
    json doc = testing::single_job_document();
    doc["jobs"][0]["shape"] = {4, 4};
    const Trace t = run(parse_scenario(doc));
    CHECK(of_kind(t, EventKind::unschedulable).size() == 1);
    CHECK(summarize(t).jobs_completed == 0);
}

TEST_CASE("the coordinate audit catches a double allocation") {
    Trace t = run(parse_scenario(testing::single_job_document()));
    CHECK(testing::coordinate_conflicts(t) == 0);
    auto it = std::find_if(t.events.begin(), t.events.end(),
                           [](const Event& e) { return e.kind == EventKind::tasks_allocated; });
    REQUIRE(it != t.events.end());
    Event clash = *it;
    clash.job_id = "intruder";
    clash.shape = {1, 2};
    t.events.insert(std::next(it), clash);
    CHECK(testing::coordinate_conflicts(t) == 2);
}
