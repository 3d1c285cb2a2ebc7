// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#pragma once

#include <cmath>
#include <cstdint>

namespace fgp {

// All simulated time is integer microseconds from scenario start.
using Micros = std::int64_t;
// Chip-time accounting unit: chips x microseconds.
using ChipMicros = std::int64_t;

inline constexpr Micros kMicrosPerSecond = 1'000'000;

inline Micros seconds_to_micros(double seconds) {
    return static_cast<Micros>(std::llround(seconds * static_cast<double>(kMicrosPerSecond)));
}

inline constexpr double micros_to_seconds(std::int64_t us) {
    return static_cast<double>(us) / static_cast<double>(kMicrosPerSecond);
}

// Half-open [begin, end) window of simulated time.
struct TimeWindow {
    Micros begin = 0;
    Micros end = 0;

    constexpr Micros length() const { return end > begin ? end - begin : 0; }
    friend constexpr bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

}  // namespace fgp
