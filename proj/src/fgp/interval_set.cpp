// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#include "interval_set.hpp"

#include <algorithm>

namespace fgp {

IntervalSet::IntervalSet(std::initializer_list<Interval> pieces)
    : IntervalSet(from_unsorted(std::vector<Interval>(pieces))) {}

IntervalSet IntervalSet::from_unsorted(std::vector<Interval> pieces) {
    std::erase_if(pieces, [](const Interval& i) { return i.end <= i.begin; });
    std::sort(pieces.begin(), pieces.end(),
              [](const Interval& a, const Interval& b) { return a.begin < b.begin || (a.begin == b.begin && a.end < b.end); });
    IntervalSet out;
    for (const auto& p : pieces) {
        if (!out.pieces_.empty() && p.begin <= out.pieces_.back().end) {
            out.pieces_.back().end = std::max(out.pieces_.back().end, p.end);
        } else {
            out.pieces_.push_back(p);
        }
    }
    return out;
}

void IntervalSet::add(Interval piece) {
    if (piece.end <= piece.begin) return;
    // Fast path: appending in time order is the common case when replaying traces.
    if (pieces_.empty() || piece.begin > pieces_.back().end) {
        pieces_.push_back(piece);
        return;
    }
    if (piece.begin >= pieces_.back().begin) {
        pieces_.back().end = std::max(pieces_.back().end, piece.end);
        return;
    }
    *this = unite(IntervalSet::from_unsorted({piece}));
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
    std::vector<Interval> all;
    all.reserve(pieces_.size() + other.pieces_.size());
    std::merge(pieces_.begin(), pieces_.end(), other.pieces_.begin(), other.pieces_.end(), std::back_inserter(all),
               [](const Interval& a, const Interval& b) { return a.begin < b.begin; });
    return from_unsorted(std::move(all));
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
    IntervalSet out;
    std::size_t i = 0, j = 0;
    while (i < pieces_.size() && j < other.pieces_.size()) {
        const Interval& a = pieces_[i];
        const Interval& b = other.pieces_[j];
        const Micros lo = std::max(a.begin, b.begin);
        const Micros hi = std::min(a.end, b.end);
        if (lo < hi) out.pieces_.push_back({lo, hi});
        if (a.end < b.end) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

IntervalSet IntervalSet::subtract(const IntervalSet& other) const {
    IntervalSet out;
    std::size_t j = 0;
    for (Interval a : pieces_) {
        while (j < other.pieces_.size() && other.pieces_[j].end <= a.begin) ++j;
        std::size_t k = j;
        while (k < other.pieces_.size() && other.pieces_[k].begin < a.end) {
            const Interval& b = other.pieces_[k];
            if (b.begin > a.begin) out.pieces_.push_back({a.begin, b.begin});
            a.begin = std::max(a.begin, b.end);
            if (a.begin >= a.end) break;
            ++k;
        }
        if (a.begin < a.end) out.pieces_.push_back(a);
    }
    return out;
}

IntervalSet IntervalSet::clip(TimeWindow window) const {
    IntervalSet out;
    for (const auto& p : pieces_) {
        const Micros lo = std::max(p.begin, window.begin);
        const Micros hi = std::min(p.end, window.end);
        if (lo < hi) out.pieces_.push_back({lo, hi});
    }
    return out;
}

Micros IntervalSet::measure() const {
    Micros total = 0;
    for (const auto& p : pieces_) total += p.length();
    return total;
}

Micros IntervalSet::measure_within(TimeWindow window) const {
    Micros total = 0;
    for (const auto& p : pieces_) {
        if (p.begin >= window.end) break;
        const Micros lo = std::max(p.begin, window.begin);
        const Micros hi = std::min(p.end, window.end);
        if (lo < hi) total += hi - lo;
    }
    return total;
}

bool IntervalSet::contains(Micros instant) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), instant,
                               [](Micros t, const Interval& p) { return t < p.begin; });
    if (it == pieces_.begin()) return false;
    --it;
    return instant < it->end;
}

IntervalSet intersect_all(std::span<const IntervalSet> sets) {
    if (sets.empty()) return {};
    IntervalSet acc = sets.front();
    for (std::size_t i = 1; i < sets.size() && !acc.empty(); ++i) acc = acc.intersect(sets[i]);
    return acc;
}

}  // namespace fgp
