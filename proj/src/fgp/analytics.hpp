// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "goodput.hpp"
#include "trace.hpp"

namespace fgp {

inline constexpr double kDefaultDeadBand = 1e-6;

// One report per observed value of `dimension`, sorted by value. Segments with
// no demand and no allocation inside the window are left out.
std::vector<GoodputReport> segment_report(const TraceIndex& index, TimeWindow window, SegmentDimension dimension);

// Fleet reports over consecutive buckets tiling [0, horizon). The last bucket
// may be shorter.
std::vector<GoodputReport> timeseries(const TraceIndex& index, Micros bucket);

enum class Factor { compiler, runtime, scheduler };
std::string_view to_string(Factor f);
std::optional<Factor> parse_factor(std::string_view text);

// Metric order everywhere below: pg, rg, sg, mpg.
inline constexpr std::array<std::string_view, 4> kMetricNames{"pg", "rg", "sg", "mpg"};

struct ComparisonVerdict {
    Factor factor = Factor::compiler;
    Boundedness bound = Boundedness::device;  // of the baseline trace
    std::array<double, 4> a{}, b{}, delta{};
    std::array<int, 4> sign{};
    std::array<std::vector<int>, 4> expected;  // allowed signs per metric
    std::string row;                           // human description of the matched expectation
    bool matched = false;
};

// Boundedness by chip-time majority of committed stepping.
Boundedness dominant_boundedness(const TraceIndex& index);

// Throws InvalidComparison if the traces differ anywhere other than the
// section the factor is allowed to change. Throws UndefinedMetric when a
// fleet component is undefined in either trace.
ComparisonVerdict compare_scenarios(const Trace& a, const Trace& b, Factor factor, double dead_band = kDefaultDeadBand);
std::string format_verdict(const ComparisonVerdict& v);

int sign_of(double delta, double dead_band);

enum class Metric { sg, rg, pg, mpg };
std::optional<Metric> parse_metric(std::string_view text);

struct SimpsonSegment {
    std::string scope;
    double before = 0.0, after = 0.0;
    double weight_before = 0.0, weight_after = 0.0;  // share of the metric's denominator
    int sign = 0;
};

struct SimpsonResult {
    bool flagged = false;
    int aggregate_sign = 0;
    double aggregate_before = 0.0, aggregate_after = 0.0;
    std::vector<SimpsonSegment> segments;
};

// Segments are matched by scope across the two sets; only segments defined at
// both points take part. The flag is raised when every segment moves in the
// same (nonzero) direction and the aggregate does not.
SimpsonResult simpson_check(const std::vector<GoodputReport>& before, const std::vector<GoodputReport>& after,
                            const GoodputReport& aggregate_before, const GoodputReport& aggregate_after, Metric metric,
                            double dead_band = kDefaultDeadBand);
std::string format_simpson(const SimpsonResult& r);

}  // namespace fgp
