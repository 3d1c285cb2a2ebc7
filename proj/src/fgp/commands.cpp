// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

#include <fmt/format.h>

#include "analytics.hpp"
#include "errors.hpp"
#include "scenario.hpp"
#include "simulator.hpp"

namespace fgp {

namespace {

Micros parse_seconds(const std::string& text, const std::string& spec) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("window", "bad window '" + spec + "'");
    }
    if (used != text.size() || !std::isfinite(v) || v < 0) throw ConfigError("window", "bad window '" + spec + "'");
    return seconds_to_micros(v);
}

}  // namespace

TimeWindow parse_window(const std::string& spec, Micros horizon) {
    if (spec.empty()) return {0, horizon};
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ConfigError("window", "expected a:b, got '" + spec + "'");
    const std::string a = spec.substr(0, colon), b = spec.substr(colon + 1);
    TimeWindow w{a.empty() ? 0 : parse_seconds(a, spec), b.empty() ? horizon : parse_seconds(b, spec)};
    if (w.end < w.begin) throw ConfigError("window", "window end before start in '" + spec + "'");
    if (w.end > horizon) throw ConfigError("window", "window '" + spec + "' extends past the trace horizon");
    return w;
}

std::vector<GoodputReport> analyze(const Trace& trace, const AnalyzeOptions& options) {
    const TraceIndex index(trace);
    const TimeWindow window = parse_window(options.window, index.horizon());
    std::vector<GoodputReport> out{make_report(index, window, Scope::whole_fleet())};
    if (options.segment) {
        for (auto& r : segment_report(index, window, *options.segment)) out.push_back(std::move(r));
    }
    if (options.bucket_seconds) {
        if (!(*options.bucket_seconds > 0)) throw ConfigError("bucket", "bucket width must be positive");
        for (auto& r : timeseries(index, std::max<Micros>(1, seconds_to_micros(*options.bucket_seconds)))) {
            out.push_back(std::move(r));
        }
    }
    if (options.per_job) {
        for (const auto& job : index.jobs()) out.push_back(make_report(index, window, Scope::job(job.job_id)));
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

SweepResult sweep(const std::string& scenario_path, const std::string& param, const std::vector<std::string>& values,
                  const std::string& out_dir, unsigned threads) {
    if (values.empty()) throw ConfigError("values", "empty value list");
    const nlohmann::json base = read_json_file(scenario_path);

    // Validate every override up front so a bad path fails before any run.
    std::vector<Scenario> scenarios;
    scenarios.reserve(values.size());
    for (const auto& v : values) {
        nlohmann::json doc = base;
        set_param(doc, param, v);
        scenarios.push_back(parse_scenario(doc));
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) throw IoError("cannot create output directory '" + out_dir + "'");

    SweepResult result;
    result.points.resize(values.size());
    std::vector<std::exception_ptr> errors(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            try {
                const Trace trace = run(scenarios[i]);
                const std::string stem = fmt::format("{}/run_{}", out_dir, i);
                save_trace_file(trace, stem + ".trace");
                const TraceIndex index(trace);
                GoodputReport fleet = make_report(index, {0, index.horizon()}, Scope::whole_fleet());
                write_text_file(stem + ".csv", reports_csv({fleet}));
                result.points[i] = {values[i], std::move(fleet)};
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(values.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    auto cell = [](const std::optional<double>& v) { return v ? fmt::format("{:.9f}", *v) : std::string(); };
    result.summary_csv = "value,sg,rg,pg,mpg\n";
    for (const auto& p : result.points) {
        result.summary_csv +=
            fmt::format("{},{},{},{},{}\n", p.value, cell(p.fleet.sg), cell(p.fleet.rg), cell(p.fleet.pg), cell(p.fleet.mpg));
    }
    // Interior maximum of RG: strictly above both end points.
    if (values.size() >= 3) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < result.points.size(); ++i) {
            if (result.points[i].fleet.rg.value_or(-1) > result.points[best].fleet.rg.value_or(-1)) best = i;
        }
        const double top = result.points[best].fleet.rg.value_or(-1);
        if (best != 0 && best + 1 != result.points.size() && top > result.points.front().fleet.rg.value_or(-1) &&
            top > result.points.back().fleet.rg.value_or(-1)) {
            result.rg_interior_max = best;
        }
    }
    write_text_file(out_dir + "/summary.csv", result.summary_csv);
    return result;
}

}  // namespace fgp
