// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#pragma once

#include <cstdint>
#include <vector>

#include "scenario.hpp"
#include "trace.hpp"

namespace fgp {

// Runs the scenario to its horizon. Deterministic: the same scenario (seed
// included) always yields the same trace.
Trace run(const Scenario& scenario);

struct TraceSummary {
    std::int64_t jobs_submitted = 0;
    std::int64_t jobs_completed = 0;
    std::int64_t events = 0;
    Micros horizon = 0;
};

TraceSummary summarize(const Trace& trace);

// What a serving or bulk-inference job has committed if a stepping session that
// started at `start` (from zero progress) is cut off at `tick`.
struct ServingCommit {
    std::vector<StepRun> committed;  // in commit order
    std::int64_t committed_steps = 0;
    Micros lost = 0;          // executed but uncommitted time at `tick`
    Micros barrier_wait = 0;  // allocated time spent waiting at shard barriers
};

// Serving commits every completed batch, so an interruption loses only the
// in-flight batch. Bulk inference commits per shard after a barrier wait.
// Training jobs are rejected with PreconditionError.
ServingCommit serving_commit_model(const JobSpec& job, Micros start, Micros tick);

// Step duration in microseconds for a profile, never below one microsecond.
Micros step_micros(const StepProfile& profile);

}  // namespace fgp
