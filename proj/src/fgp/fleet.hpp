// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "units.hpp"

namespace fgp {

struct ChipKind {
    std::string name;
    double peak_flops = 0.0;  // FLOP/s per chip
    double mtbf = 0.0;        // seconds per chip
    std::string generation_tag;
};

// Rectangular request/pod shape with 1 to 3 axes.
class MeshShape {
public:
    MeshShape() = default;
    explicit MeshShape(std::vector<int> dims);

    const std::vector<int>& dims() const { return dims_; }
    std::size_t rank() const { return dims_.size(); }
    std::int64_t chip_count() const;

    friend bool operator==(const MeshShape&, const MeshShape&) = default;

private:
    std::vector<int> dims_;
};

std::string to_string(const MeshShape& shape);

struct Pod {
    std::string id;
    std::string chip_kind;
    MeshShape shape;
    std::string cell;
};

enum class SizeClass { small = 0, medium = 1, large = 2, xl = 3 };

inline constexpr std::array<SizeClass, 4> kAllSizeClasses{SizeClass::small, SizeClass::medium, SizeClass::large,
                                                          SizeClass::xl};

std::string_view to_string(SizeClass size);
std::optional<SizeClass> parse_size_class(std::string_view text);

struct SizeThresholds {
    std::int64_t small_max = 8;
    std::int64_t medium_max = 256;
    std::int64_t large_max = 2048;
};

struct FleetConfig {
    std::vector<ChipKind> chip_kinds;
    struct PodConfig {
        std::string id;
        std::string chip_kind;
        std::vector<int> dims;
        std::string cell;
    };
    std::vector<PodConfig> pods;
    std::vector<std::int64_t> size_thresholds{8, 256, 2048};
};

class Fleet {
public:
    const std::vector<ChipKind>& chip_kinds() const { return chip_kinds_; }
    // Sorted by id.
    const std::vector<Pod>& pods() const { return pods_; }
    const SizeThresholds& thresholds() const { return thresholds_; }

    const ChipKind* find_chip_kind(std::string_view name) const;
    const Pod* find_pod(std::string_view id) const;
    std::int64_t total_chips() const;

    friend Fleet build_fleet(const FleetConfig& config);

private:
    std::vector<ChipKind> chip_kinds_;
    std::vector<Pod> pods_;
    SizeThresholds thresholds_;
};

// Validates `config`; throws ConfigError naming the offending field.
Fleet build_fleet(const FleetConfig& config);

// total chips x window length, in chip-microseconds.
ChipMicros fleet_capacity(const Fleet& fleet, TimeWindow window);

SizeClass classify_size(std::int64_t chip_count, const Fleet& fleet);
SizeClass classify_size(std::int64_t chip_count, const SizeThresholds& thresholds);

}  // namespace fgp
