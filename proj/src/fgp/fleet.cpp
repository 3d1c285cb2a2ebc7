// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#include "fleet.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "errors.hpp"

namespace fgp {

MeshShape::MeshShape(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty() || dims_.size() > 3) throw ConfigError("", "mesh shape must have 1 to 3 axes");
    for (int d : dims_) {
        if (d < 1) throw ConfigError("", "mesh dimensions must be positive");
    }
}

std::int64_t MeshShape::chip_count() const {
    std::int64_t n = 1;
    for (int d : dims_) n *= d;
    return dims_.empty() ? 0 : n;
}

std::string to_string(const MeshShape& shape) { return fmt::format("[{}]", fmt::join(shape.dims(), ",")); }

std::string_view to_string(SizeClass size) {
    switch (size) {
        case SizeClass::small: return "small";
        case SizeClass::medium: return "medium";
        case SizeClass::large: return "large";
        case SizeClass::xl: return "xl";
    }
    return "?";
}

std::optional<SizeClass> parse_size_class(std::string_view text) {
    for (SizeClass s : kAllSizeClasses) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

const ChipKind* Fleet::find_chip_kind(std::string_view name) const {
    for (const auto& k : chip_kinds_) {
        if (k.name == name) return &k;
    }
    return nullptr;
}

const Pod* Fleet::find_pod(std::string_view id) const {
    auto it = std::lower_bound(pods_.begin(), pods_.end(), id, [](const Pod& p, std::string_view v) { return p.id < v; });
    return (it != pods_.end() && it->id == id) ? &*it : nullptr;
}

std::int64_t Fleet::total_chips() const {
    std::int64_t n = 0;
    for (const auto& p : pods_) n += p.shape.chip_count();
    return n;
}

Fleet build_fleet(const FleetConfig& config) {
    Fleet fleet;
    std::set<std::string> kind_names;
    for (std::size_t i = 0; i < config.chip_kinds.size(); ++i) {
        const auto& k = config.chip_kinds[i];
        const std::string path = fmt::format("chip_kinds[{}]", i);
        if (k.name.empty()) throw ConfigError(path + ".name", "must be non-empty");
        if (!kind_names.insert(k.name).second) throw ConfigError(path + ".name", "duplicate chip kind '" + k.name + "'");
        if (!(k.peak_flops > 0.0)) throw ConfigError(path + ".peak_flops", "must be > 0");
        if (!(k.mtbf > 0.0)) throw ConfigError(path + ".mtbf", "must be > 0");
    }
    fleet.chip_kinds_ = config.chip_kinds;

    if (config.pods.empty()) throw ConfigError("fleet.pods", "at least one pod is required");
    std::set<std::string> pod_ids;
    for (std::size_t i = 0; i < config.pods.size(); ++i) {
        const auto& p = config.pods[i];
        const std::string path = fmt::format("fleet.pods[{}]", i);
        if (p.id.empty()) throw ConfigError(path + ".id", "must be non-empty");
        if (!pod_ids.insert(p.id).second) throw ConfigError(path + ".id", "duplicate pod id '" + p.id + "'");
        if (!kind_names.count(p.chip_kind)) throw ConfigError(path + ".chip_kind", "unknown chip kind '" + p.chip_kind + "'");
        if (p.dims.empty() || p.dims.size() > 3) throw ConfigError(path + ".shape", "must have 1 to 3 axes");
        for (std::size_t d = 0; d < p.dims.size(); ++d) {
            if (p.dims[d] < 1) throw ConfigError(fmt::format("{}.shape[{}]", path, d), "must be >= 1");
        }
        fleet.pods_.push_back(Pod{p.id, p.chip_kind, MeshShape(p.dims), p.cell});
    }
    std::sort(fleet.pods_.begin(), fleet.pods_.end(), [](const Pod& a, const Pod& b) { return a.id < b.id; });

    const auto& t = config.size_thresholds;
    if (t.size() != 3) throw ConfigError("fleet.size_thresholds", "expected three ascending integers");
    if (t[0] < 1 || !(t[0] < t[1] && t[1] < t[2])) {
        throw ConfigError("fleet.size_thresholds", "thresholds must be positive and strictly ascending");
    }
    fleet.thresholds_ = SizeThresholds{t[0], t[1], t[2]};
    return fleet;
}

ChipMicros fleet_capacity(const Fleet& fleet, TimeWindow window) {
    ChipMicros total = 0;
    for (const auto& p : fleet.pods()) total += p.shape.chip_count() * window.length();
    return total;
}

SizeClass classify_size(std::int64_t chip_count, const SizeThresholds& t) {
    if (chip_count <= t.small_max) return SizeClass::small;
    if (chip_count <= t.medium_max) return SizeClass::medium;
    if (chip_count <= t.large_max) return SizeClass::large;
    return SizeClass::xl;
}

SizeClass classify_size(std::int64_t chip_count, const Fleet& fleet) { return classify_size(chip_count, fleet.thresholds()); }

}  // namespace fgp
