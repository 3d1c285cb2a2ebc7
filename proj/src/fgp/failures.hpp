// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#pragma once

#include <cstdint>
#include <vector>

#include "units.hpp"

namespace fgp {

// Stateless keyed generator: the draw for (seed, stream, counter) does not
// depend on how many other draws were made, so a chip's failure times do not
// move when unrelated parts of the simulation change.
std::uint64_t keyed_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);
// Uniform on (0, 1].
double keyed_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter);

struct ChipFailure {
    Micros time = 0;
    std::int64_t chip = 0;  // flat chip index across the fleet

    friend bool operator==(const ChipFailure&, const ChipFailure&) = default;
};

// Per-chip exponential inter-arrival times with rate 1/mtbf (seconds), all
// strictly before `horizon`, sorted by (time, chip). A non-finite mtbf disables
// the model.
std::vector<ChipFailure> inject_failures(std::uint64_t seed, std::int64_t chips, double mtbf, Micros horizon);
// Failure times of a single chip (same stream as inject_failures uses for it).
std::vector<Micros> chip_failure_times(std::uint64_t seed, std::int64_t chip, double mtbf, Micros horizon);

}  // namespace fgp
