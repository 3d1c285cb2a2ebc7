// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#include "analytics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "errors.hpp"

namespace fgp {

std::vector<GoodputReport> segment_report(const TraceIndex& index, TimeWindow window, SegmentDimension dimension) {
    std::set<std::string> values;
    for (const auto& job : index.jobs()) values.insert(segment_value(job.info, dimension));
    std::vector<GoodputReport> out;
    for (const auto& v : values) {
        const Scope scope = Scope::segment(dimension, v);
        const auto t = scope_totals(index, window, scope);
        if (t.demand == 0 && t.allocated == 0) continue;
        out.push_back(make_report(index, window, scope));
    }
    return out;
}

std::vector<GoodputReport> timeseries(const TraceIndex& index, Micros bucket) {
    if (bucket <= 0) throw ConfigError("bucket", "bucket width must be positive");
    std::vector<GoodputReport> out;
    for (Micros t = 0; t < index.horizon(); t += bucket) {
        out.push_back(make_report(index, {t, std::min(t + bucket, index.horizon())}, Scope::whole_fleet()));
    }
    return out;
}

std::string_view to_string(Factor f) {
    switch (f) {
        case Factor::compiler: return "compiler";
        case Factor::runtime: return "runtime";
        case Factor::scheduler: return "scheduler";
    }
    return "?";
}

std::optional<Factor> parse_factor(std::string_view text) {
    if (text == "compiler" || text == "row1") return Factor::compiler;
    if (text == "runtime" || text == "row2") return Factor::runtime;
    if (text == "scheduler" || text == "row3") return Factor::scheduler;
    return std::nullopt;
}

int sign_of(double delta, double dead_band) {
    if (delta > dead_band) return 1;
    if (delta < -dead_band) return -1;
    return 0;
}

Boundedness dominant_boundedness(const TraceIndex& index) {
    ChipMicros device = 0, host = 0;
    for (const auto& job : index.jobs()) {
        for (const auto& r : job.committed) {
            (r.bound == Boundedness::device ? device : host) += job.chips * (r.end() - r.start);
        }
    }
    return host > device ? Boundedness::host : Boundedness::device;
}

namespace {

std::string_view allowed_section(Factor f) {
    switch (f) {
        case Factor::compiler: return "program";
        case Factor::runtime: return "runtime";
        case Factor::scheduler: return "scheduler";
    }
    return "";
}

std::array<double, 4> fleet_components(const TraceIndex& index, const std::string& which) {
    const auto r = make_report(index, {0, index.horizon()}, Scope::whole_fleet());
    if (!r.sg || !r.rg || !r.pg) throw UndefinedMetric("trace " + which + ": fleet goodput component undefined");
    return {*r.pg, *r.rg, *r.sg, *r.mpg};
}

void set_expectation(ComparisonVerdict& v) {
    const std::vector<int> up{1}, down{-1}, same{0};
    switch (v.factor) {
        case Factor::compiler:
            if (v.bound == Boundedness::device) {
                v.expected = {up, down, down, up};
                v.row = "compiler: on-duty step time decreases, device-bound";
            } else {
                // Host-bound: the step does not get shorter. Our step model has
                // no device-idle split, so PG and RG may stay flat instead of
                // trading against each other; SG and MPG must not move.
                v.expected = {std::vector<int>{0, 1}, std::vector<int>{0, -1}, same, same};
                v.row = "compiler: on-duty step time decreases, host-bound";
            }
            break;
        case Factor::runtime:
            v.expected = {same, up, down, up};
            v.row = "runtime: off-duty time or preemption waste decreases";
            break;
        case Factor::scheduler:
            v.expected = {same, same, up, up};
            v.row = "scheduler: partially-allocated time decreases";
            break;
    }
}

char sign_char(int s) { return s > 0 ? '+' : (s < 0 ? '-' : '0'); }

}  // namespace

ComparisonVerdict compare_scenarios(const Trace& a, const Trace& b, Factor factor, double dead_band) {
    const auto& sa = a.header.sections;
    const auto& sb = b.header.sections;
    std::set<std::string> keys;
    for (const auto& [k, _] : sa) keys.insert(k);
    for (const auto& [k, _] : sb) keys.insert(k);
    if (keys.empty()) throw InvalidComparison("traces carry no section digests");
    for (const auto& k : keys) {
        if (k == allowed_section(factor)) continue;
        const auto ia = sa.find(k);
        const auto ib = sb.find(k);
        if (ia == sa.end() || ib == sb.end() || ia->second != ib->second) {
            throw InvalidComparison(fmt::format("traces differ in section '{}', which factor '{}' does not cover", k,
                                                to_string(factor)));
        }
    }
    const TraceIndex ia(a), ib(b);
    ComparisonVerdict v;
    v.factor = factor;
    v.bound = dominant_boundedness(ia);
    v.a = fleet_components(ia, "a");
    v.b = fleet_components(ib, "b");
    set_expectation(v);
    v.matched = true;
    for (std::size_t m = 0; m < 4; ++m) {
        v.delta[m] = v.b[m] - v.a[m];
        v.sign[m] = sign_of(v.delta[m], dead_band);
        const auto& allowed = v.expected[m];
        if (std::find(allowed.begin(), allowed.end(), v.sign[m]) == allowed.end()) v.matched = false;
    }
    return v;
}

std::string format_verdict(const ComparisonVerdict& v) {
    std::string out = fmt::format("factor={} bound={} row=\"{}\"\n", to_string(v.factor), to_string(v.bound), v.row);
    for (std::size_t m = 0; m < 4; ++m) {
        std::string allowed;
        for (int s : v.expected[m]) allowed += sign_char(s);
        const bool ok = std::find(v.expected[m].begin(), v.expected[m].end(), v.sign[m]) != v.expected[m].end();
        out += fmt::format("metric={} a={:.9f} b={:.9f} delta={:+.9f} sign={} expected={} {}\n", kMetricNames[m], v.a[m],
                           v.b[m], v.delta[m], sign_char(v.sign[m]), allowed, ok ? "ok" : "MISMATCH");
    }
    out += fmt::format("verdict={}\n", v.matched ? "match" : "mismatch");
    return out;
}

std::optional<Metric> parse_metric(std::string_view text) {
    if (text == "sg") return Metric::sg;
    if (text == "rg") return Metric::rg;
    if (text == "pg") return Metric::pg;
    if (text == "mpg") return Metric::mpg;
    return std::nullopt;
}

namespace {

std::optional<double> metric_value(const GoodputReport& r, Metric m) {
    switch (m) {
        case Metric::sg: return r.sg;
        case Metric::rg: return r.rg;
        case Metric::pg: return r.pg;
        case Metric::mpg: return r.mpg;
    }
    return std::nullopt;
}

double metric_weight_base(const GoodputReport& r, Metric m) {
    switch (m) {
        case Metric::sg:
        case Metric::mpg: return r.sg_den;
        case Metric::rg: return r.rg_den;
        case Metric::pg: return r.pg_den;
    }
    return 0.0;
}

}  // namespace

SimpsonResult simpson_check(const std::vector<GoodputReport>& before, const std::vector<GoodputReport>& after,
                            const GoodputReport& aggregate_before, const GoodputReport& aggregate_after, Metric metric,
                            double dead_band) {
    SimpsonResult out;
    const auto agg0 = metric_value(aggregate_before, metric);
    const auto agg1 = metric_value(aggregate_after, metric);
    if (!agg0 || !agg1) return out;
    out.aggregate_before = *agg0;
    out.aggregate_after = *agg1;
    out.aggregate_sign = sign_of(*agg1 - *agg0, dead_band);

    double total0 = 0.0, total1 = 0.0;
    for (const auto& r : before) total0 += metric_weight_base(r, metric);
    for (const auto& r : after) total1 += metric_weight_base(r, metric);
    for (const auto& r0 : before) {
        const auto it = std::find_if(after.begin(), after.end(), [&](const GoodputReport& r) { return r.scope == r0.scope; });
        if (it == after.end()) continue;
        const auto v0 = metric_value(r0, metric);
        const auto v1 = metric_value(*it, metric);
        if (!v0 || !v1) continue;
        SimpsonSegment s;
        s.scope = r0.scope;
        s.before = *v0;
        s.after = *v1;
        s.weight_before = total0 > 0 ? metric_weight_base(r0, metric) / total0 : 0.0;
        s.weight_after = total1 > 0 ? metric_weight_base(*it, metric) / total1 : 0.0;
        s.sign = sign_of(s.after - s.before, dead_band);
        out.segments.push_back(s);
    }
    if (out.segments.size() < 2) return out;
    const int common = out.segments.front().sign;
    if (common == 0) return out;
    for (const auto& s : out.segments) {
        if (s.sign != common) return out;
    }
    out.flagged = out.aggregate_sign != common;
    return out;
}

std::string format_simpson(const SimpsonResult& r) {
    std::string out = fmt::format("aggregate before={:.9f} after={:.9f} sign={}\n", r.aggregate_before, r.aggregate_after,
                                  sign_char(r.aggregate_sign));
    for (const auto& s : r.segments) {
        out += fmt::format("segment={} before={:.9f} after={:.9f} sign={} weight_before={:.9f} weight_after={:.9f}\n",
                           s.scope, s.before, s.after, sign_char(s.sign), s.weight_before, s.weight_after);
    }
    out += fmt::format("simpson={}\n", r.flagged ? "flagged" : "none");
    return out;
}

}  // namespace fgp
