// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#include "program.hpp"

#include <cmath>
#include <map>
#include <queue>

#include <fmt/format.h>

#include "errors.hpp"

namespace fgp {

std::string_view to_string(OpKind kind) {
    switch (kind) {
        case OpKind::matmul: return "matmul";
        case OpKind::elementwise: return "elementwise";
        case OpKind::embedding_lookup: return "embedding_lookup";
        case OpKind::collective_comm: return "collective_comm";
    }
    return "?";
}

std::optional<OpKind> parse_op_kind(std::string_view text) {
    for (OpKind k : {OpKind::matmul, OpKind::elementwise, OpKind::embedding_lookup, OpKind::collective_comm}) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

namespace {

std::size_t expected_arity(OpKind kind) {
    switch (kind) {
        case OpKind::matmul: return 3;
        case OpKind::embedding_lookup: return 2;
        case OpKind::elementwise:
        case OpKind::collective_comm: return 1;
    }
    return 0;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) throw ArithmeticError("FLOP count overflows 2^63-1");
    return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out = 0;
    if (__builtin_add_overflow(a, b, &out)) throw ArithmeticError("FLOP count overflows 2^63-1");
    return out;
}

}  // namespace

OpGraph::OpGraph(std::string label, std::vector<OpNode> nodes) : label_(std::move(label)), nodes_(std::move(nodes)) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        const std::string path = fmt::format("nodes[{}]", i);
        if (n.id.empty()) throw ConfigError(path + ".id", "must be non-empty");
        if (!index.emplace(n.id, i).second) throw ConfigError(path + ".id", "duplicate node id '" + n.id + "'");
        if (n.dims.size() != expected_arity(n.kind)) {
            throw ConfigError(path + ".dims", fmt::format("{} expects {} dimensions", to_string(n.kind), expected_arity(n.kind)));
        }
        for (std::size_t d = 0; d < n.dims.size(); ++d) {
            if (n.dims[d] < 1) throw ConfigError(fmt::format("{}.dims[{}]", path, d), "must be positive");
        }
    }
    // Kahn's algorithm; the min-heap keeps the order independent of map iteration.
    std::vector<std::vector<std::size_t>> succ(nodes_.size());
    std::vector<std::size_t> indegree(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        for (std::size_t p = 0; p < nodes_[i].predecessors.size(); ++p) {
            auto it = index.find(nodes_[i].predecessors[p]);
            if (it == index.end()) {
                throw ConfigError(fmt::format("nodes[{}].predecessors[{}]", i, p),
                                  "unknown node '" + nodes_[i].predecessors[p] + "'");
            }
            succ[it->second].push_back(i);
            ++indegree[i];
        }
    }
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (indegree[i] == 0) ready.push(i);
    }
    while (!ready.empty()) {
        const std::size_t i = ready.top();
        ready.pop();
        order_.push_back(i);
        for (std::size_t s : succ[i]) {
            if (--indegree[s] == 0) ready.push(s);
        }
    }
    if (order_.size() != nodes_.size()) throw ConfigError("nodes", "graph contains a cycle");
}

std::int64_t node_flops(const OpNode& node) {
    switch (node.kind) {
        case OpKind::matmul: return checked_mul(checked_mul(checked_mul(2, node.dims[0]), node.dims[1]), node.dims[2]);
        case OpKind::elementwise: return node.dims[0];
        case OpKind::embedding_lookup: return checked_mul(checked_mul(2, node.dims[0]), node.dims[1]);
        case OpKind::collective_comm: return 0;
    }
    return 0;
}

std::int64_t flop_count(const OpGraph& graph) {
    std::int64_t total = 0;
    for (const auto& n : graph.nodes()) total = checked_add(total, node_flops(n));
    return total;
}

double ideal_exec_time(const OpGraph& graph, const ChipKind& chip_kind, std::int64_t chip_count, std::int64_t steps) {
    if (chip_count < 1) throw PreconditionError("chip_count must be >= 1");
    return static_cast<double>(steps) * static_cast<double>(flop_count(graph)) /
           (chip_kind.peak_flops * static_cast<double>(chip_count));
}

void validate(const StepProfile& p) {
    if (!(p.device_compute_time >= 0.0)) throw ConfigError("device_compute_time", "must be >= 0");
    if (!(p.comm_time >= 0.0)) throw ConfigError("comm_time", "must be >= 0");
    if (!(p.host_time >= 0.0)) throw ConfigError("host_time", "must be >= 0");
    if (!(p.overlap_fraction >= 0.0 && p.overlap_fraction <= 1.0)) throw ConfigError("overlap_fraction", "must be in [0,1]");
}

std::string_view to_string(Boundedness b) { return b == Boundedness::device ? "device" : "host"; }

StepTime actual_step_time(const StepProfile& p) {
    const double device = p.device_compute_time + p.comm_time * (1.0 - p.overlap_fraction);
    if (device >= p.host_time) return {device, Boundedness::device};
    return {p.host_time, Boundedness::host};
}

std::string_view to_string(PassEffect effect) {
    switch (effect) {
        case PassEffect::scale_compute: return "scale_compute";
        case PassEffect::set_overlap: return "set_overlap";
        case PassEffect::scale_host: return "scale_host";
    }
    return "?";
}

std::optional<PassEffect> parse_pass_effect(std::string_view text) {
    for (PassEffect e : {PassEffect::scale_compute, PassEffect::set_overlap, PassEffect::scale_host}) {
        if (to_string(e) == text) return e;
    }
    return std::nullopt;
}

void validate(const CompilerPass& pass) {
    if (pass.effect == PassEffect::set_overlap) {
        if (!(pass.value >= 0.0 && pass.value <= 1.0)) throw ConfigError("value", "overlap fraction must be in [0,1]");
    } else if (!(pass.value > 0.0 && pass.value <= 1.0)) {
        throw ConfigError("value", "scale factor must be in (0,1]");
    }
}

StepProfile apply_pass(const StepProfile& profile, const CompilerPass& pass) {
    StepProfile out = profile;
    switch (pass.effect) {
        case PassEffect::scale_compute: out.device_compute_time *= pass.value; break;
        case PassEffect::set_overlap: out.overlap_fraction = pass.value; break;
        case PassEffect::scale_host: out.host_time *= pass.value; break;
    }
    return out;
}

StepGoodput program_goodput_of_step(const OpGraph& graph, const ChipKind& chip_kind, std::int64_t chip_count,
                                    const StepProfile& profile) {
    const double actual = actual_step_time(profile).seconds;
    if (!(actual > 0.0)) throw UndefinedMetric("program goodput undefined: actual step time is zero");
    StepGoodput out;
    const std::int64_t flops = flop_count(graph);
    out.zero_flops = flops == 0;
    out.value = ideal_exec_time(graph, chip_kind, chip_count, 1) / actual;
    out.exceeds_one = out.value > 1.0;
    return out;
}

}  // namespace fgp
