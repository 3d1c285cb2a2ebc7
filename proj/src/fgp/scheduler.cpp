// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#include "scheduler.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include "errors.hpp"

namespace fgp {

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::training: return "training";
        case Phase::serving: return "serving";
        case Phase::bulk_inference: return "bulk_inference";
    }
    return "?";
}

std::optional<Phase> parse_phase(std::string_view text) {
    for (Phase p : {Phase::training, Phase::serving, Phase::bulk_inference}) {
        if (to_string(p) == text) return p;
    }
    return std::nullopt;
}

EvictionPolicy EvictionPolicy::from_order(const std::vector<SizeClass>& order) {
    if (order.size() != 4) throw ConfigError("size_preference", "must list all four size classes");
    EvictionPolicy p;
    std::set<SizeClass> seen;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (!seen.insert(order[i]).second) throw ConfigError("size_preference", "size classes must not repeat");
        p.rank[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    }
    return p;
}

EvictionPolicy EvictionPolicy::uniform() {
    EvictionPolicy p;
    p.rank = {0, 0, 0, 0};
    return p;
}

bool EvictionPolicy::is_uniform() const { return rank[0] == rank[1] && rank[1] == rank[2] && rank[2] == rank[3]; }

std::vector<SizeClass> EvictionPolicy::order() const {
    std::vector<SizeClass> out(kAllSizeClasses.begin(), kAllSizeClasses.end());
    std::stable_sort(out.begin(), out.end(), [&](SizeClass a, SizeClass b) {
        return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)];
    });
    return out;
}

namespace {

using Vec3 = std::array<int, 3>;

Vec3 pad3(const std::vector<int>& dims) {
    Vec3 out{1, 1, 1};
    for (std::size_t i = 0; i < dims.size() && i < 3; ++i) out[i] = dims[i];
    return out;
}

Vec3 origin3(const std::vector<int>& origin) {
    Vec3 out{0, 0, 0};
    for (std::size_t i = 0; i < origin.size() && i < 3; ++i) out[i] = origin[i];
    return out;
}

// Occupancy lattice of one pod, padded to three axes, with an inclusive 3-D
// prefix sum for O(1) box queries.
class Grid {
public:
    explicit Grid(const Pod& pod) : dim_(pad3(pod.shape.dims())), occ_(static_cast<std::size_t>(dim_[0] * dim_[1] * dim_[2]), 0) {}

    void mark(const std::vector<int>& origin, const MeshShape& shape, std::uint8_t value) {
        const Vec3 oo = origin3(origin);
        const Vec3 s = pad3(shape.dims());
        for (int x = oo[0]; x < oo[0] + s[0]; ++x)
            for (int y = oo[1]; y < oo[1] + s[1]; ++y)
                for (int z = oo[2]; z < oo[2] + s[2]; ++z) occ_[index(x, y, z)] = value;
        dirty_ = true;
    }

    int occupied_count() const { return std::accumulate(occ_.begin(), occ_.end(), 0); }
    int total() const { return dim_[0] * dim_[1] * dim_[2]; }
    const Vec3& dims() const { return dim_; }
    bool occupied(int x, int y, int z) const { return occ_[index(x, y, z)] != 0; }

    int box_sum(const Vec3& o, const Vec3& s) {
        if (dirty_) rebuild();
        auto P = [&](int x, int y, int z) { return prefix_[pindex(x, y, z)]; };
        const int x0 = o[0], y0 = o[1], z0 = o[2];
        const int x1 = o[0] + s[0], y1 = o[1] + s[1], z1 = o[2] + s[2];
        return P(x1, y1, z1) - P(x0, y1, z1) - P(x1, y0, z1) - P(x1, y1, z0) + P(x0, y0, z1) + P(x0, y1, z0) +
               P(x1, y0, z0) - P(x0, y0, z0);
    }

    // Volume of the largest fully free axis-aligned box.
    std::int64_t largest_free_box() const {
        const int X = dim_[0], Y = dim_[1], Z = dim_[2];
        std::int64_t best = 0;
        std::vector<std::uint8_t> free2d(static_cast<std::size_t>(X * Y));
        std::vector<int> heights(static_cast<std::size_t>(Y));
        std::vector<int> stack;
        for (int z0 = 0; z0 < Z; ++z0) {
            std::fill(free2d.begin(), free2d.end(), 1);
            for (int z1 = z0; z1 < Z; ++z1) {
                const int depth = z1 - z0 + 1;
                for (int x = 0; x < X; ++x)
                    for (int y = 0; y < Y; ++y)
                        if (occupied(x, y, z1)) free2d[static_cast<std::size_t>(x * Y + y)] = 0;
                // Largest all-free rectangle via row-wise histograms.
                std::fill(heights.begin(), heights.end(), 0);
                for (int x = 0; x < X; ++x) {
                    for (int y = 0; y < Y; ++y) {
                        auto& h = heights[static_cast<std::size_t>(y)];
                        h = free2d[static_cast<std::size_t>(x * Y + y)] ? h + 1 : 0;
                    }
                    stack.clear();
                    for (int y = 0; y <= Y; ++y) {
                        const int h = y < Y ? heights[static_cast<std::size_t>(y)] : 0;
                        while (!stack.empty() && heights[static_cast<std::size_t>(stack.back())] >= h) {
                            const int top = heights[static_cast<std::size_t>(stack.back())];
                            stack.pop_back();
                            const int left = stack.empty() ? -1 : stack.back();
                            best = std::max<std::int64_t>(best, static_cast<std::int64_t>(top) * (y - left - 1) * depth);
                        }
                        stack.push_back(y);
                    }
                }
            }
        }
        return best;
    }

private:
    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>((x * dim_[1] + y) * dim_[2] + z);
    }
    std::size_t pindex(int x, int y, int z) const {
        return static_cast<std::size_t>((x * (dim_[1] + 1) + y) * (dim_[2] + 1) + z);
    }
    void rebuild() {
        prefix_.assign(static_cast<std::size_t>((dim_[0] + 1) * (dim_[1] + 1) * (dim_[2] + 1)), 0);
        for (int x = 1; x <= dim_[0]; ++x)
            for (int y = 1; y <= dim_[1]; ++y)
                for (int z = 1; z <= dim_[2]; ++z) {
                    prefix_[pindex(x, y, z)] = occ_[index(x - 1, y - 1, z - 1)] + prefix_[pindex(x - 1, y, z)] +
                                               prefix_[pindex(x, y - 1, z)] + prefix_[pindex(x, y, z - 1)] -
                                               prefix_[pindex(x - 1, y - 1, z)] - prefix_[pindex(x - 1, y, z - 1)] -
                                               prefix_[pindex(x, y - 1, z - 1)] + prefix_[pindex(x - 1, y - 1, z - 1)];
                }
        dirty_ = false;
    }

    Vec3 dim_;
    std::vector<std::uint8_t> occ_;
    std::vector<int> prefix_;
    bool dirty_ = true;
};

Grid grid_for(const Pod& pod, const std::vector<Allocation>& live) {
    Grid g(pod);
    for (const auto& a : live) {
        if (a.pod_id == pod.id) g.mark(a.origin, a.shape, 1);
    }
    return g;
}

bool eligible(const JobRequest& request, const Pod& pod) {
    return request.chip_kind == pod.chip_kind && (request.cell.empty() || request.cell == pod.cell);
}

bool fits_empty(const JobRequest& request, const Pod& pod) {
    const Vec3 p = pad3(pod.shape.dims());
    for (const auto& o : orientations(request.shape, pod.shape.rank())) {
        const Vec3 s = pad3(o.dims());
        if (s[0] <= p[0] && s[1] <= p[1] && s[2] <= p[2]) return true;
    }
    return false;
}

std::vector<int> trim_origin(const Vec3& o, std::size_t rank) { return std::vector<int>(o.begin(), o.begin() + static_cast<long>(rank)); }

// Exhaustive first-fit over orientations then origins.
std::optional<Placement> first_fit(const JobRequest& request, const Pod& pod, Grid& grid) {
    const Vec3 p = grid.dims();
    for (const auto& o : orientations(request.shape, pod.shape.rank())) {
        const Vec3 s = pad3(o.dims());
        if (s[0] > p[0] || s[1] > p[1] || s[2] > p[2]) continue;
        for (int x = 0; x + s[0] <= p[0]; ++x)
            for (int y = 0; y + s[1] <= p[1]; ++y)
                for (int z = 0; z + s[2] <= p[2]; ++z) {
                    if (grid.box_sum({x, y, z}, s) == 0) return Placement{trim_origin({x, y, z}, pod.shape.rank()), o};
                }
    }
    return std::nullopt;
}

struct ScoredPlacement {
    Placement placement;
    double score = 0.0;
};

// Fragmentation-minimising placement over "corner" origins: each coordinate is
// flush with the pod wall or with an edge of a live allocation. Falls back to
// first fit when no corner candidate is free.
std::optional<ScoredPlacement> best_placement(const JobRequest& request, const Pod& pod,
                                              const std::vector<Allocation>& live) {
    Grid grid = grid_for(pod, live);
    const Vec3 p = grid.dims();
    std::optional<ScoredPlacement> best;
    for (const auto& o : orientations(request.shape, pod.shape.rank())) {
        const Vec3 s = pad3(o.dims());
        if (s[0] > p[0] || s[1] > p[1] || s[2] > p[2]) continue;
        std::array<std::vector<int>, 3> coords;
        for (int axis = 0; axis < 3; ++axis) {
            std::set<int> c{0, p[axis] - s[axis]};
            for (const auto& a : live) {
                if (a.pod_id != pod.id) continue;
                const Vec3 ao = origin3(a.origin);
                const Vec3 as = pad3(a.shape.dims());
                const int lo = ao[axis];
                c.insert(lo + as[axis]);
                c.insert(lo - s[axis]);
            }
            for (int v : c) {
                if (v >= 0 && v + s[axis] <= p[axis]) coords[axis].push_back(v);
            }
        }
        for (int x : coords[0])
            for (int y : coords[1])
                for (int z : coords[2]) {
                    if (grid.box_sum({x, y, z}, s) != 0) continue;
                    Placement candidate{trim_origin({x, y, z}, pod.shape.rank()), o};
                    grid.mark(candidate.origin, o, 1);
                    const int free = grid.total() - grid.occupied_count();
                    const double score =
                        free == 0 ? 0.0 : 1.0 - static_cast<double>(grid.largest_free_box()) / static_cast<double>(free);
                    grid.mark(candidate.origin, o, 0);
                    if (!best || score < best->score) best = ScoredPlacement{std::move(candidate), score};
                }
    }
    if (!best) {
        if (auto ff = first_fit(request, pod, grid)) {
            grid.mark(ff->origin, ff->shape, 1);
            const int free = grid.total() - grid.occupied_count();
            const double score =
                free == 0 ? 0.0 : 1.0 - static_cast<double>(grid.largest_free_box()) / static_cast<double>(free);
            best = ScoredPlacement{*ff, score};
        }
    }
    return best;
}

}  // namespace

std::vector<MeshShape> orientations(const MeshShape& request, std::size_t pod_rank) {
    std::vector<int> dims = request.dims();
    while (dims.size() > pod_rank) {
        auto it = std::find(dims.rbegin(), dims.rend(), 1);
        if (it == dims.rend()) return {};
        dims.erase(std::next(it).base());
    }
    while (dims.size() < pod_rank) dims.push_back(1);
    std::sort(dims.begin(), dims.end());
    std::vector<MeshShape> out;
    do {
        out.emplace_back(dims);
    } while (std::next_permutation(dims.begin(), dims.end()));
    return out;
}

std::optional<Placement> find_placement(const JobRequest& request, const Pod& pod, const std::vector<Allocation>& live) {
    if (!eligible(request, pod)) return std::nullopt;
    Grid grid = grid_for(pod, live);
    return first_fit(request, pod, grid);
}

double fragmentation_score(const Pod& pod, const std::vector<Allocation>& live) {
    Grid grid = grid_for(pod, live);
    const int free = grid.total() - grid.occupied_count();
    if (free == 0) return 0.0;
    return 1.0 - static_cast<double>(grid.largest_free_box()) / static_cast<double>(free);
}

void ClusterState::place(const Allocation& allocation, int priority) {
    live_[allocation.job_id] = LiveJob{allocation, priority, allocation.shape.chip_count()};
}

void ClusterState::release(const std::string& job_id) { live_.erase(job_id); }

std::vector<Allocation> ClusterState::allocations_on(std::string_view pod_id) const {
    std::vector<Allocation> out;
    for (const auto& [id, job] : live_) {
        if (job.allocation.pod_id == pod_id) out.push_back(job.allocation);
    }
    return out;
}

std::optional<std::vector<std::string>> select_victims(const JobRequest& request, const ClusterState& state,
                                                       const EvictionPolicy& policy, const VictimSearchLimits& limits) {
    const Fleet& fleet = state.fleet();
    struct Candidate {
        const LiveJob* job;
        std::tuple<int, std::int64_t, Micros, std::string> key;  // rank, chips, -start, id
    };
    std::vector<Candidate> candidates;
    std::set<std::string> pods_in_play;
    for (const auto& [id, job] : state.live()) {
        if (job.priority >= request.priority) continue;
        const Pod* pod = fleet.find_pod(job.allocation.pod_id);
        if (!pod || !eligible(request, *pod) || !fits_empty(request, *pod)) continue;
        const SizeClass size = classify_size(job.chips, fleet);
        candidates.push_back({&job, {policy.rank[static_cast<std::size_t>(size)], job.chips, -job.allocation.start, id}});
        pods_in_play.insert(pod->id);
    }
    if (candidates.empty()) return std::nullopt;
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) { return a.key < b.key; });

    std::map<std::string, std::int64_t> free_chips;
    for (const auto& pod_id : pods_in_play) {
        std::int64_t used = 0;
        for (const auto& a : state.allocations_on(pod_id)) used += a.shape.chip_count();
        free_chips[pod_id] = fleet.find_pod(pod_id)->shape.chip_count() - used;
    }
    const std::int64_t need = request.shape.chip_count();

    auto feasible_without = [&](const std::string& pod_id, const std::vector<std::size_t>& removed) {
        std::set<std::string> gone;
        for (std::size_t i : removed) gone.insert(candidates[i].job->allocation.job_id);
        std::vector<Allocation> rest;
        for (auto& a : state.allocations_on(pod_id)) {
            if (!gone.count(a.job_id)) rest.push_back(std::move(a));
        }
        Grid grid = grid_for(*fleet.find_pod(pod_id), rest);
        return first_fit(request, *fleet.find_pod(pod_id), grid).has_value();
    };
    auto to_ids = [&](const std::vector<std::size_t>& chosen) {
        std::vector<std::string> ids;
        for (std::size_t i : chosen) ids.push_back(candidates[i].job->allocation.job_id);
        return ids;
    };

    // Exact search: increasing cardinality. A victim set must lie in one pod,
    // so combinations are enumerated per pod (indices into the global
    // preference order); for each cardinality the first feasible set of every
    // pod is found and the lexicographically smallest of those wins. Every
    // enumerated combination counts against the budget.
    const std::size_t n = candidates.size();
    std::map<std::string, std::vector<std::size_t>> by_pod;
    for (std::size_t i = 0; i < n; ++i) by_pod[candidates[i].job->allocation.pod_id].push_back(i);
    std::int64_t evaluations = 0;
    bool exhausted_budget = false;
    for (std::size_t k = 1; k <= n && !exhausted_budget; ++k) {
        std::optional<std::vector<std::size_t>> best_k;
        for (const auto& [pod_id, members] : by_pod) {
            const std::size_t m = members.size();
            if (k > m) continue;
            // Prune: even the k largest victims in this pod cannot free enough.
            std::vector<std::int64_t> sizes;
            for (std::size_t i : members) sizes.push_back(candidates[i].job->chips);
            std::sort(sizes.rbegin(), sizes.rend());
            std::int64_t most = free_chips[pod_id];
            for (std::size_t j = 0; j < k; ++j) most += sizes[j];
            if (most < need) continue;

            std::vector<std::size_t> pos(k);
            std::iota(pos.begin(), pos.end(), 0);
            std::vector<std::size_t> combo(k);
            while (true) {
                if (++evaluations > limits.exhaustive_budget) {
                    exhausted_budget = true;
                    break;
                }
                std::int64_t freed = free_chips[pod_id];
                for (std::size_t j = 0; j < k; ++j) {
                    combo[j] = members[pos[j]];
                    freed += candidates[combo[j]].job->chips;
                }
                if (freed >= need && (!best_k || combo < *best_k) && feasible_without(pod_id, combo)) {
                    best_k = combo;
                    break;  // later combinations of this pod are lexicographically larger
                }
                std::size_t i = k;
                while (i > 0 && pos[i - 1] == m - k + (i - 1)) --i;
                if (i == 0) break;
                ++pos[i - 1];
                for (std::size_t j = i; j < k; ++j) pos[j] = pos[j - 1] + 1;
            }
            if (exhausted_budget) break;
        }
        if (exhausted_budget) break;
        if (best_k) return to_ids(*best_k);
    }
    if (!exhausted_budget) return std::nullopt;

    // Greedy per pod in preference order, then drop victims that turn out unnecessary.
    std::optional<std::vector<std::size_t>> best;
    for (const auto& pod_id : pods_in_play) {
        std::vector<std::size_t> chosen;
        bool ok = false;
        for (std::size_t i = 0; i < n && !ok; ++i) {
            if (candidates[i].job->allocation.pod_id != pod_id) continue;
            chosen.push_back(i);
            ok = feasible_without(pod_id, chosen);
        }
        if (!ok) continue;
        for (std::size_t j = chosen.size(); j-- > 0;) {
            std::vector<std::size_t> trial = chosen;
            trial.erase(trial.begin() + static_cast<long>(j));
            if (!trial.empty() && feasible_without(pod_id, trial)) chosen = std::move(trial);
        }
        if (!best || chosen.size() < best->size() || (chosen.size() == best->size() && chosen < *best)) best = chosen;
    }
    if (!best) return std::nullopt;
    return to_ids(*best);
}

bool pending_before(const JobRequest& a, const JobRequest& b) {
    return std::tie(b.priority, a.arrival, a.job_id) < std::tie(a.priority, b.arrival, b.job_id);
}

std::vector<ScheduleAction> schedule_tick(const std::vector<JobRequest>& pending, const ClusterState& state, Micros now,
                                          const EvictionPolicy& policy, const VictimSearchLimits& limits) {
    std::vector<JobRequest> queue = pending;
    std::sort(queue.begin(), queue.end(), pending_before);
    ClusterState working = state;
    std::vector<ScheduleAction> actions;
    const Fleet& fleet = state.fleet();

    for (const auto& request : queue) {
        bool possible = false;
        for (const auto& pod : fleet.pods()) possible = possible || (eligible(request, pod) && fits_empty(request, pod));
        if (!possible) {
            ScheduleAction a;
            a.kind = ScheduleAction::Kind::unschedulable;
            a.job_id = request.job_id;
            a.reason = "shape " + to_string(request.shape) + " exceeds every eligible pod";
            actions.push_back(std::move(a));
            continue;
        }

        auto place_best = [&]() -> bool {
            std::optional<std::pair<const Pod*, ScoredPlacement>> chosen;
            for (const auto& pod : fleet.pods()) {
                if (!eligible(request, pod)) continue;
                auto sp = best_placement(request, pod, working.allocations_on(pod.id));
                if (sp && (!chosen || sp->score < chosen->second.score)) chosen.emplace(&pod, std::move(*sp));
            }
            if (!chosen) return false;
            ScheduleAction a;
            a.kind = ScheduleAction::Kind::allocate;
            a.job_id = request.job_id;
            a.allocation = Allocation{request.job_id, chosen->first->id, chosen->second.placement.origin,
                                      chosen->second.placement.shape, now};
            working.place(a.allocation, request.priority);
            actions.push_back(std::move(a));
            return true;
        };

        if (place_best()) continue;
        auto victims = select_victims(request, working, policy, limits);
        if (!victims) continue;
        for (const auto& v : *victims) {
            ScheduleAction a;
            a.kind = ScheduleAction::Kind::preempt;
            a.job_id = v;
            a.preempted_by = request.job_id;
            actions.push_back(std::move(a));
            working.release(v);
        }
        if (!place_best()) throw PreconditionError("victim set did not admit a placement for " + request.job_id);
    }
    return actions;
}

}  // namespace fgp
