// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#include "failures.hpp"

#include <algorithm>
#include <cmath>

namespace fgp {

namespace {

std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finaliser
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t keyed_bits(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return mix(mix(mix(seed) ^ stream) ^ counter);
}

double keyed_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return static_cast<double>((keyed_bits(seed, stream, counter) >> 11) + 1) * 0x1.0p-53;
}

std::vector<Micros> chip_failure_times(std::uint64_t seed, std::int64_t chip, double mtbf, Micros horizon) {
    std::vector<Micros> out;
    if (!std::isfinite(mtbf) || mtbf <= 0.0) return out;
    const double horizon_s = micros_to_seconds(horizon);
    double t = 0.0;
    for (std::uint64_t k = 0;; ++k) {
        t += -std::log(keyed_uniform(seed, static_cast<std::uint64_t>(chip), k)) * mtbf;
        if (t >= horizon_s) break;
        const Micros us = seconds_to_micros(t);
        if (us >= horizon) break;
        out.push_back(us);
    }
    return out;
}

std::vector<ChipFailure> inject_failures(std::uint64_t seed, std::int64_t chips, double mtbf, Micros horizon) {
    std::vector<ChipFailure> out;
    for (std::int64_t chip = 0; chip < chips; ++chip) {
        for (Micros t : chip_failure_times(seed, chip, mtbf, horizon)) out.push_back({t, chip});
    }
    std::sort(out.begin(), out.end(), [](const ChipFailure& a, const ChipFailure& b) {
        return a.time < b.time || (a.time == b.time && a.chip < b.chip);
    });
    return out;
}

}  // namespace fgp
