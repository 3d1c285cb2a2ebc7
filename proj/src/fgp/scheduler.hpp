// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fleet.hpp"
#include "units.hpp"

namespace fgp {

enum class Phase { training, serving, bulk_inference };
std::string_view to_string(Phase phase);
std::optional<Phase> parse_phase(std::string_view text);

struct JobRequest {
    std::string job_id;
    int priority = 0;  // higher preempts lower
    std::string chip_kind;
    MeshShape shape;
    Micros arrival = 0;
    std::int64_t work = 1;  // productive steps
    Phase phase = Phase::training;
    std::string runtime_tag;
    std::string framework_tag;
    std::string cell;  // required pod cell; empty means any
};

struct Allocation {
    std::string job_id;
    std::string pod_id;
    std::vector<int> origin;  // one offset per pod axis
    MeshShape shape;          // oriented, same rank as the pod
    Micros start = 0;
};

struct Placement {
    std::vector<int> origin;
    MeshShape shape;

    friend bool operator==(const Placement&, const Placement&) = default;
};

// Eviction order over size classes. rank[c] is the position of class c in the
// preference list; lower ranks are evicted first. A uniform policy gives every
// class the same rank so ties fall through to chip count and start time.
struct EvictionPolicy {
    std::array<int, 4> rank{2, 0, 1, 3};  // medium, large, small, xl

    static EvictionPolicy from_order(const std::vector<SizeClass>& order);
    static EvictionPolicy uniform();
    bool is_uniform() const;
    std::vector<SizeClass> order() const;
};

// Axis permutations of `request` that match the pod's rank, in lexicographic
// order with duplicates removed. Empty when the ranks cannot be reconciled.
std::vector<MeshShape> orientations(const MeshShape& request, std::size_t pod_rank);

// First conflict-free placement in (orientation, origin) lexicographic order.
std::optional<Placement> find_placement(const JobRequest& request, const Pod& pod, const std::vector<Allocation>& live);

// 1 - largest free sub-mesh / free chips; 0 for an empty or full pod.
double fragmentation_score(const Pod& pod, const std::vector<Allocation>& live);

struct LiveJob {
    Allocation allocation;
    int priority = 0;
    std::int64_t chips = 0;
};

class ClusterState {
public:
    explicit ClusterState(const Fleet& fleet) : fleet_(&fleet) {}

    const Fleet& fleet() const { return *fleet_; }
    void place(const Allocation& allocation, int priority);
    void release(const std::string& job_id);
    bool is_live(const std::string& job_id) const { return live_.count(job_id) != 0; }
    const std::map<std::string, LiveJob>& live() const { return live_; }
    std::vector<Allocation> allocations_on(std::string_view pod_id) const;

private:
    const Fleet* fleet_;
    std::map<std::string, LiveJob> live_;
};

struct VictimSearchLimits {
    // Subset evaluations allowed for the exact minimum-cardinality search
    // before falling back to greedy-then-prune.
    std::int64_t exhaustive_budget = 20000;
};

// Smallest set of strictly lower-priority jobs whose removal lets `request`
// fit on some eligible pod, ordered by eviction preference. nullopt when no
// such set exists.
std::optional<std::vector<std::string>> select_victims(const JobRequest& request, const ClusterState& state,
                                                       const EvictionPolicy& policy,
                                                       const VictimSearchLimits& limits = {});

// Pending-queue order: priority desc, arrival asc, job id asc.
bool pending_before(const JobRequest& a, const JobRequest& b);

struct ScheduleAction {
    enum class Kind { preempt, allocate, unschedulable };
    Kind kind = Kind::allocate;
    std::string job_id;
    std::string preempted_by;  // for preempt
    Allocation allocation;     // for allocate
    std::string reason;        // for unschedulable
};

// One pass over `pending` (any order; sorted internally). Actions are in the
// order they must be applied; `state` is not modified.
std::vector<ScheduleAction> schedule_tick(const std::vector<JobRequest>& pending, const ClusterState& state, Micros now,
                                          const EvictionPolicy& policy, const VictimSearchLimits& limits = {});

}  // namespace fgp
