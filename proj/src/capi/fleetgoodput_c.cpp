// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#include "fleetgoodput/fleetgoodput.h"

#include <new>
#include <string>
#include <vector>

#include "fgp/analytics.hpp"
#include "fgp/commands.hpp"
#include "fgp/errors.hpp"
#include "fgp/scenario.hpp"
#include "fgp/simulator.hpp"

struct fgp_scenario {
    fgp::Scenario scenario;
};

struct fgp_trace {
    fgp::Trace trace;
};

struct fgp_report_set {
    std::vector<fgp::GoodputReport> reports;
    std::vector<std::string> flags;  // joined per report
    std::string csv;
};

struct fgp_verdict {
    fgp::ComparisonVerdict verdict;
    std::string text;
};

struct fgp_sweep_result {
    fgp::SweepResult result;
};

struct fgp_simpson_result {
    fgp::SimpsonResult result;
    std::string text;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_field;
thread_local std::int64_t last_line = 0;

fgp_status fail(fgp_status status, const std::string& message) {
    last_error = message;
    return status;
}

// Runs `body` and maps core exceptions onto status codes.
template <typename F>
fgp_status guarded(F&& body) {
    last_field.clear();
    last_line = 0;
    try {
        body();
        return FGP_OK;
    } catch (const fgp::ConfigError& e) {
        last_field = e.field();
        return fail(FGP_ERR_CONFIG, e.what());
    } catch (const fgp::InvalidComparison& e) {
        return fail(FGP_ERR_CONFIG, e.what());
    } catch (const fgp::IoError& e) {
        return fail(FGP_ERR_IO, e.what());
    } catch (const fgp::TraceCorruption& e) {
        last_line = e.line();
        return fail(FGP_ERR_CORRUPT_TRACE, e.what());
    } catch (const fgp::UndefinedMetric& e) {
        return fail(FGP_ERR_UNDEFINED_METRIC, e.what());
    } catch (const std::bad_alloc&) {
        return fail(FGP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(FGP_ERR_INTERNAL, e.what());
    }
}

#define FGP_REQUIRE(cond, what) \
    if (!(cond)) return fail(FGP_ERR_ARGUMENT, what)

std::string join_flags(const fgp::GoodputReport& r) {
    std::string out;
    for (const auto& f : r.flags) out += (out.empty() ? "" : ";") + f;
    return out;
}

fgp_report_set* make_set(std::vector<fgp::GoodputReport> reports) {
    auto* set = new fgp_report_set{std::move(reports), {}, {}};
    for (const auto& r : set->reports) set->flags.push_back(join_flags(r));
    set->csv = fgp::reports_csv(set->reports);
    return set;
}

}  // namespace

extern "C" {

FGP_API const char* fgp_version(void) { return "1.0.0"; }
FGP_API const char* fgp_last_error(void) { return last_error.c_str(); }
FGP_API const char* fgp_last_error_field(void) { return last_field.c_str(); }
FGP_API int64_t fgp_last_error_line(void) { return last_line; }

FGP_API fgp_status fgp_scenario_load(const char* path, fgp_scenario** out) {
    FGP_REQUIRE(path && out, "fgp_scenario_load: null argument");
    *out = nullptr;
    return guarded([&] { *out = new fgp_scenario{fgp::load_scenario_file(path)}; });
}

FGP_API fgp_status fgp_scenario_parse(const char* json_text, fgp_scenario** out) {
    FGP_REQUIRE(json_text && out, "fgp_scenario_parse: null argument");
    *out = nullptr;
    return guarded([&] {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(json_text);
        } catch (const nlohmann::json::parse_error& e) {
            throw fgp::ConfigError("", std::string("malformed scenario: ") + e.what());
        }
        *out = new fgp_scenario{fgp::parse_scenario(doc)};
    });
}

FGP_API const char* fgp_scenario_hash(const fgp_scenario* s) { return s ? s->scenario.hash.c_str() : ""; }
FGP_API const char* fgp_scenario_name(const fgp_scenario* s) { return s ? s->scenario.name.c_str() : ""; }
FGP_API void fgp_scenario_free(fgp_scenario* s) { delete s; }

FGP_API fgp_status fgp_simulate(const fgp_scenario* scenario, fgp_trace** out) {
    FGP_REQUIRE(scenario && out, "fgp_simulate: null argument");
    *out = nullptr;
    return guarded([&] { *out = new fgp_trace{fgp::run(scenario->scenario)}; });
}

FGP_API fgp_status fgp_trace_load(const char* path, fgp_trace** out) {
    FGP_REQUIRE(path && out, "fgp_trace_load: null argument");
    *out = nullptr;
    return guarded([&] { *out = new fgp_trace{fgp::load_trace_file(path)}; });
}

FGP_API fgp_status fgp_trace_save(const fgp_trace* trace, const char* path) {
    FGP_REQUIRE(trace && path, "fgp_trace_save: null argument");
    return guarded([&] { fgp::save_trace_file(trace->trace, path); });
}

FGP_API fgp_status fgp_trace_summarize(const fgp_trace* trace, fgp_trace_summary* out) {
    FGP_REQUIRE(trace && out, "fgp_trace_summarize: null argument");
    return guarded([&] {
        const auto s = fgp::summarize(trace->trace);
        *out = {s.jobs_submitted, s.jobs_completed, s.events, fgp::micros_to_seconds(s.horizon)};
    });
}

FGP_API void fgp_trace_free(fgp_trace* trace) { delete trace; }

FGP_API fgp_status fgp_analyze(const fgp_trace* trace, const fgp_analyze_options* options, fgp_report_set** out) {
    FGP_REQUIRE(trace && out, "fgp_analyze: null argument");
    *out = nullptr;
    return guarded([&] {
        fgp::AnalyzeOptions opts;
        if (options) {
            if (options->window) opts.window = options->window;
            if (options->segment && *options->segment) {
                const auto d = fgp::parse_segment_dimension(options->segment);
                if (!d) throw fgp::ConfigError("segment", std::string("unknown segment dimension '") + options->segment + "'");
                opts.segment = d;
            }
            if (options->bucket_seconds > 0) opts.bucket_seconds = options->bucket_seconds;
            opts.per_job = options->per_job != 0;
        }
        *out = make_set(fgp::analyze(trace->trace, opts));
    });
}

FGP_API size_t fgp_report_count(const fgp_report_set* set) { return set ? set->reports.size() : 0; }

FGP_API fgp_status fgp_report_get(const fgp_report_set* set, size_t i, fgp_report* out) {
    FGP_REQUIRE(set && out, "fgp_report_get: null argument");
    FGP_REQUIRE(i < set->reports.size(), "fgp_report_get: index out of range");
    const auto& r = set->reports[i];
    *out = fgp_report{};
    out->scope = r.scope.c_str();
    out->window_begin_seconds = fgp::micros_to_seconds(r.window.begin);
    out->window_end_seconds = fgp::micros_to_seconds(r.window.end);
    out->sg_num = r.sg_num;
    out->sg_den = r.sg_den;
    out->rg_num = r.rg_num;
    out->rg_den = r.rg_den;
    out->pg_num = r.pg_num;
    out->pg_den = r.pg_den;
    out->sg = r.sg.value_or(0.0);
    out->rg = r.rg.value_or(0.0);
    out->pg = r.pg.value_or(0.0);
    out->mpg = r.mpg.value_or(0.0);
    out->sg_defined = r.sg.has_value();
    out->rg_defined = r.rg.has_value();
    out->pg_defined = r.pg.has_value();
    out->mpg_defined = r.mpg.has_value();
    out->flags = set->flags[i].c_str();
    return FGP_OK;
}

FGP_API const char* fgp_report_csv(const fgp_report_set* set) { return set ? set->csv.c_str() : ""; }
FGP_API void fgp_report_set_free(fgp_report_set* set) { delete set; }

FGP_API fgp_status fgp_legacy(const fgp_trace* trace, const char* window, fgp_legacy_metrics* out) {
    FGP_REQUIRE(trace && out, "fgp_legacy: null argument");
    return guarded([&] {
        const fgp::TraceIndex index(trace->trace);
        const auto m = fgp::legacy_metrics(index, fgp::parse_window(window ? window : "", index.horizon()));
        *out = {m.capacity_chip_seconds, m.occupancy, m.duty_cycle.value_or(0.0), m.duty_cycle.has_value()};
    });
}

FGP_API fgp_status fgp_compare(const fgp_trace* a, const fgp_trace* b, const char* factor, double dead_band,
                               fgp_verdict** out) {
    FGP_REQUIRE(a && b && factor && out, "fgp_compare: null argument");
    *out = nullptr;
    return guarded([&] {
        const auto f = fgp::parse_factor(factor);
        if (!f) throw fgp::ConfigError("factor", std::string("unknown factor '") + factor + "'");
        auto v = fgp::compare_scenarios(a->trace, b->trace, *f, dead_band > 0 ? dead_band : fgp::kDefaultDeadBand);
        auto text = fgp::format_verdict(v);
        *out = new fgp_verdict{std::move(v), std::move(text)};
    });
}

FGP_API int fgp_verdict_matched(const fgp_verdict* v) { return v && v->verdict.matched ? 1 : 0; }
FGP_API const char* fgp_verdict_text(const fgp_verdict* v) { return v ? v->text.c_str() : ""; }
FGP_API void fgp_verdict_free(fgp_verdict* v) { delete v; }

FGP_API fgp_status fgp_sweep(const char* scenario_path, const char* param, const char* const* values, size_t count,
                             const char* out_dir, unsigned threads, fgp_sweep_result** out) {
    FGP_REQUIRE(scenario_path && param && out_dir && out && (values || count == 0), "fgp_sweep: null argument");
    *out = nullptr;
    return guarded([&] {
        std::vector<std::string> vs;
        for (size_t i = 0; i < count; ++i) {
            if (!values[i]) throw fgp::ConfigError("values", "null value");
            vs.emplace_back(values[i]);
        }
        *out = new fgp_sweep_result{fgp::sweep(scenario_path, param, vs, out_dir, threads)};
    });
}

FGP_API const char* fgp_sweep_summary_csv(const fgp_sweep_result* r) { return r ? r->result.summary_csv.c_str() : ""; }

FGP_API int64_t fgp_sweep_rg_interior_max(const fgp_sweep_result* r) {
    return r && r->result.rg_interior_max ? static_cast<int64_t>(*r->result.rg_interior_max) : -1;
}

FGP_API void fgp_sweep_result_free(fgp_sweep_result* r) { delete r; }

FGP_API fgp_status fgp_simpson(const fgp_trace* trace, const char* segment, const char* window_before,
                               const char* window_after, const char* metric, fgp_simpson_result** out) {
    FGP_REQUIRE(trace && segment && window_before && window_after && out, "fgp_simpson: null argument");
    *out = nullptr;
    return guarded([&] {
        const auto d = fgp::parse_segment_dimension(segment);
        if (!d) throw fgp::ConfigError("segment", std::string("unknown segment dimension '") + segment + "'");
        const auto m = fgp::parse_metric(metric ? metric : "pg");
        if (!m) throw fgp::ConfigError("metric", std::string("unknown metric '") + metric + "'");
        const fgp::TraceIndex index(trace->trace);
        const auto w0 = fgp::parse_window(window_before, index.horizon());
        const auto w1 = fgp::parse_window(window_after, index.horizon());
        auto r = fgp::simpson_check(fgp::segment_report(index, w0, *d), fgp::segment_report(index, w1, *d),
                                    fgp::make_report(index, w0, fgp::Scope::whole_fleet()),
                                    fgp::make_report(index, w1, fgp::Scope::whole_fleet()), *m);
        auto text = fgp::format_simpson(r);
        *out = new fgp_simpson_result{std::move(r), std::move(text)};
    });
}

FGP_API int fgp_simpson_flagged(const fgp_simpson_result* r) { return r && r->result.flagged ? 1 : 0; }
FGP_API const char* fgp_simpson_text(const fgp_simpson_result* r) { return r ? r->text.c_str() : ""; }
FGP_API void fgp_simpson_result_free(fgp_simpson_result* r) { delete r; }

}  // extern "C"
