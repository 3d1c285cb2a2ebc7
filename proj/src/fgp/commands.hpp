// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "goodput.hpp"
#include "trace.hpp"

namespace fgp {

// "a:b" in seconds; either side may be empty ("", ":", "10:" and ":20"), in
// which case it defaults to 0 or the horizon.
TimeWindow parse_window(const std::string& spec, Micros horizon);

struct AnalyzeOptions {
    std::string window;  // empty: whole horizon
    std::optional<SegmentDimension> segment;
    std::optional<double> bucket_seconds;
    bool per_job = false;
};

// Fleet row first, then segment rows, then bucket rows, then job rows.
std::vector<GoodputReport> analyze(const Trace& trace, const AnalyzeOptions& options);

struct SweepPoint {
    std::string value;
    GoodputReport fleet;
};

struct SweepResult {
    std::vector<SweepPoint> points;  // in the order the values were given
    std::optional<std::size_t> rg_interior_max;
    std::string summary_csv;
};

// Runs one simulation per value with `param` overridden, on up to `threads`
// workers. Writes <out_dir>/run_<i>.trace, <out_dir>/run_<i>.csv and
// <out_dir>/summary.csv. Output is independent of the thread count.
SweepResult sweep(const std::string& scenario_path, const std::string& param, const std::vector<std::string>& values,
                  const std::string& out_dir, unsigned threads = 0);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace fgp
