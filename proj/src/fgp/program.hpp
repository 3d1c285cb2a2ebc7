// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fleet.hpp"

namespace fgp {

enum class OpKind { matmul, elementwise, embedding_lookup, collective_comm };

std::string_view to_string(OpKind kind);
std::optional<OpKind> parse_op_kind(std::string_view text);

// dims by kind: matmul {M,K,N}; elementwise {elements}; embedding_lookup
// {lookups, dim}; collective_comm {payload_bytes}.
struct OpNode {
    std::string id;
    OpKind kind = OpKind::elementwise;
    std::vector<std::int64_t> dims;
    std::vector<std::string> predecessors;
};

// Unoptimized operation graph. Construction validates ids, dims and acyclicity;
// the graph is immutable afterwards.
class OpGraph {
public:
    OpGraph(std::string label, std::vector<OpNode> nodes);

    const std::string& label() const { return label_; }
    const std::vector<OpNode>& nodes() const { return nodes_; }
    // Node indices in a topological order (ties broken by declaration order).
    const std::vector<std::size_t>& topological_order() const { return order_; }

private:
    std::string label_;
    std::vector<OpNode> nodes_;
    std::vector<std::size_t> order_;
};

// Total FLOPs of one execution of the graph: 2MKN per matmul, one per
// elementwise element, two per looked-up embedding element, none for
// collectives. Throws ArithmeticError past 2^63-1.
std::int64_t flop_count(const OpGraph& graph);
std::int64_t node_flops(const OpNode& node);

// Seconds for `steps` executions at peak throughput on `chip_count` chips.
double ideal_exec_time(const OpGraph& graph, const ChipKind& chip_kind, std::int64_t chip_count, std::int64_t steps);

struct StepProfile {
    double device_compute_time = 0.0;  // seconds
    double comm_time = 0.0;
    double host_time = 0.0;
    double overlap_fraction = 0.0;  // share of comm hidden under compute

    friend bool operator==(const StepProfile&, const StepProfile&) = default;
};

void validate(const StepProfile& profile);

enum class Boundedness { device, host };
std::string_view to_string(Boundedness b);

struct StepTime {
    double seconds = 0.0;
    Boundedness bound = Boundedness::device;
};

// max(compute + comm * (1 - overlap), host); device-bound when the device path
// is at least the host path.
StepTime actual_step_time(const StepProfile& profile);

enum class PassEffect { scale_compute, set_overlap, scale_host };
std::string_view to_string(PassEffect effect);
std::optional<PassEffect> parse_pass_effect(std::string_view text);

struct CompilerPass {
    std::string name;
    PassEffect effect = PassEffect::scale_compute;
    double value = 1.0;  // factor in (0,1] for scale_*, fraction in [0,1] for set_overlap
};

void validate(const CompilerPass& pass);

// Returns a copy of `profile` with the pass's single field transformed.
StepProfile apply_pass(const StepProfile& profile, const CompilerPass& pass);

struct StepGoodput {
    double value = 0.0;
    bool zero_flops = false;
    bool exceeds_one = false;  // ideal faster than actual: model misconfiguration
};

// ideal time of one step over actual step time. Values above 1 are reported,
// not clamped.
StepGoodput program_goodput_of_step(const OpGraph& graph, const ChipKind& chip_kind, std::int64_t chip_count,
                                    const StepProfile& profile);

}  // namespace fgp
