// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include "units.hpp"

namespace fgp {

struct Interval {
    Micros begin = 0;
    Micros end = 0;  // exclusive

    constexpr Micros length() const { return end - begin; }
    friend constexpr bool operator==(const Interval&, const Interval&) = default;
};

// Canonical set of half-open integer intervals: sorted, pairwise disjoint,
// adjacent pieces merged, no empty pieces. Every mutating operation restores
// that form, so two sets are equal iff they cover the same instants.
class IntervalSet {
public:
    IntervalSet() = default;
    IntervalSet(std::initializer_list<Interval> pieces);

    static IntervalSet from_unsorted(std::vector<Interval> pieces);

    void add(Interval piece);

    IntervalSet unite(const IntervalSet& other) const;
    IntervalSet intersect(const IntervalSet& other) const;
    IntervalSet subtract(const IntervalSet& other) const;
    IntervalSet clip(TimeWindow window) const;

    // Total covered length.
    Micros measure() const;
    // Covered length inside `window`, without materialising the clipped set.
    Micros measure_within(TimeWindow window) const;
    bool contains(Micros instant) const;

    bool empty() const { return pieces_.empty(); }
    std::span<const Interval> pieces() const { return pieces_; }

    friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

private:
    std::vector<Interval> pieces_;
};

// Intersection of many sets; the empty list yields the empty set.
IntervalSet intersect_all(std::span<const IntervalSet> sets);

}  // namespace fgp
