// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

// Command-line front end. Talks to the library only through its C interface.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fleetgoodput/fleetgoodput.h"

namespace {

// FGP_LOG: 0 silent, 1 (default) errors, 2 progress.
int log_level() {
    const char* v = std::getenv("FGP_LOG");
    if (!v || !*v) return 1;
    return std::atoi(v);
}

void info(const std::string& line) {
    if (log_level() >= 2) std::cerr << "fgp: " << line << "\n";
}

int report_failure(fgp_status status, const std::string& context) {
    if (log_level() >= 1) std::cerr << "fgp: " << context << ": " << fgp_last_error() << "\n";
    switch (status) {
        case FGP_OK: return 0;
        case FGP_ERR_CONFIG:
        case FGP_ERR_ARGUMENT:
        case FGP_ERR_UNDEFINED_METRIC: return 2;
        case FGP_ERR_IO: return 3;
        case FGP_ERR_CORRUPT_TRACE: return 4;
        case FGP_ERR_GATE: return 5;
        default: return 1;
    }
}

int write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (out) out << text;
    if (!out) {
        if (log_level() >= 1) std::cerr << "fgp: cannot write '" << path << "'\n";
        return 3;
    }
    return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& trace_path) {
    fgp_scenario* sc = nullptr;
    if (auto st = fgp_scenario_load(scenario_path.c_str(), &sc); st != FGP_OK) return report_failure(st, scenario_path);
    info("simulating " + std::string(fgp_scenario_name(sc)));
    fgp_trace* tr = nullptr;
    auto st = fgp_simulate(sc, &tr);
    fgp_scenario_free(sc);
    if (st != FGP_OK) return report_failure(st, "simulate");
    st = fgp_trace_save(tr, trace_path.c_str());
    if (st != FGP_OK) {
        fgp_trace_free(tr);
        return report_failure(st, trace_path);
    }
    fgp_trace_summary s{};
    fgp_trace_summarize(tr, &s);
    fgp_trace_free(tr);
    std::printf("jobs_completed=%lld/%lld horizon=%.6f events=%lld\n", static_cast<long long>(s.jobs_completed),
                static_cast<long long>(s.jobs_submitted), s.horizon_seconds, static_cast<long long>(s.events));
    return 0;
}

int cmd_analyze(const std::string& trace_path, const std::string& window, const std::string& segment, double bucket,
                bool per_job, bool legacy, const std::string& out_path) {
    fgp_trace* tr = nullptr;
    if (auto st = fgp_trace_load(trace_path.c_str(), &tr); st != FGP_OK) return report_failure(st, trace_path);
    fgp_analyze_options opts{window.c_str(), segment.empty() ? nullptr : segment.c_str(), bucket, per_job ? 1 : 0};
    fgp_report_set* set = nullptr;
    auto st = fgp_analyze(tr, &opts, &set);
    if (st != FGP_OK) {
        fgp_trace_free(tr);
        return report_failure(st, "analyze");
    }
    if (legacy) {
        fgp_legacy_metrics m{};
        st = fgp_legacy(tr, window.c_str(), &m);
        if (st == FGP_OK) {
            if (m.duty_cycle_defined) {
                std::printf("capacity=%.6f occupancy=%.9f duty_cycle=%.9f\n", m.capacity_chip_seconds, m.occupancy,
                            m.duty_cycle);
            } else {
                std::printf("capacity=%.6f occupancy=%.9f duty_cycle=undefined\n", m.capacity_chip_seconds, m.occupancy);
            }
        }
    }
    fgp_trace_free(tr);
    const std::string csv = fgp_report_csv(set);
    const std::size_t rows = fgp_report_count(set);
    fgp_report_set_free(set);
    if (st != FGP_OK) return report_failure(st, "legacy metrics");
    if (out_path.empty() || out_path == "-") {
        std::fputs(csv.c_str(), stdout);
        return 0;
    }
    if (int rc = write_file(out_path, csv); rc != 0) return rc;
    info("wrote " + std::to_string(rows) + " rows to " + out_path);
    return 0;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, const std::string& factor, double dead_band) {
    fgp_trace* a = nullptr;
    fgp_trace* b = nullptr;
    if (auto st = fgp_trace_load(a_path.c_str(), &a); st != FGP_OK) return report_failure(st, a_path);
    if (auto st = fgp_trace_load(b_path.c_str(), &b); st != FGP_OK) {
        fgp_trace_free(a);
        return report_failure(st, b_path);
    }
    fgp_verdict* v = nullptr;
    const auto st = fgp_compare(a, b, factor.c_str(), dead_band, &v);
    fgp_trace_free(a);
    fgp_trace_free(b);
    if (st != FGP_OK) return report_failure(st, "compare");
    std::fputs(fgp_verdict_text(v), stdout);
    const bool ok = fgp_verdict_matched(v) != 0;
    fgp_verdict_free(v);
    return ok ? 0 : 5;
}

std::vector<std::string> split_values(const std::string& list) {
    std::vector<std::string> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int cmd_sweep(const std::string& scenario_path, const std::string& param, const std::string& values,
              const std::string& out_dir, unsigned threads) {
    const auto vs = split_values(values);
    std::vector<const char*> ptrs;
    for (const auto& v : vs) ptrs.push_back(v.c_str());
    fgp_sweep_result* r = nullptr;
    const auto st = fgp_sweep(scenario_path.c_str(), param.c_str(), ptrs.data(), ptrs.size(), out_dir.c_str(), threads, &r);
    if (st != FGP_OK) return report_failure(st, "sweep");
    std::fputs(fgp_sweep_summary_csv(r), stdout);
    const auto best = fgp_sweep_rg_interior_max(r);
    if (best >= 0) {
        std::printf("rg_interior_max value=%s\n", vs[static_cast<std::size_t>(best)].c_str());
    } else {
        std::printf("rg_interior_max none\n");
    }
    fgp_sweep_result_free(r);
    return 0;
}

int cmd_simpson(const std::string& trace_path, const std::string& segment, const std::string& before,
                const std::string& after, const std::string& metric) {
    fgp_trace* tr = nullptr;
    if (auto st = fgp_trace_load(trace_path.c_str(), &tr); st != FGP_OK) return report_failure(st, trace_path);
    fgp_simpson_result* r = nullptr;
    const auto st = fgp_simpson(tr, segment.c_str(), before.c_str(), after.c_str(), metric.c_str(), &r);
    fgp_trace_free(tr);
    if (st != FGP_OK) return report_failure(st, "simpson");
    std::fputs(fgp_simpson_text(r), stdout);
    fgp_simpson_result_free(r);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fleet simulator and ML productivity goodput analysis"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fgp_version());

    std::string scenario, trace, out, window, segment, a, b, factor, param, values, metric = "pg", before, after;
    double bucket = 0.0, dead_band = 0.0;
    unsigned threads = 0;
    bool per_job = false, legacy = false;

    auto* sim = app.add_subcommand("simulate", "Run a scenario and write its trace");
    sim->add_option("-s,--scenario", scenario, "Scenario file")->required();
    sim->add_option("-o,--output", out, "Trace file to write")->required();

    auto* an = app.add_subcommand("analyze", "Compute goodput reports from a trace");
    an->add_option("-t,--trace", trace, "Trace file")->required();
    an->add_option("--window", window, "Window a:b in seconds (default: whole horizon)");
    an->add_option("--segment", segment, "chip_kind|generation_tag|size_class|phase|framework_tag|runtime_tag");
    an->add_option("--bucket", bucket, "Add a fleet time series with this bucket width (seconds)");
    an->add_flag("--jobs", per_job, "Add one row per job");
    an->add_flag("--legacy", legacy, "Print capacity, occupancy and duty cycle");
    an->add_option("-o,--output", out, "CSV file to write (default: stdout)");

    auto* cmp = app.add_subcommand("compare", "Check a paired change against the expected goodput signs");
    cmp->add_option("-a", a, "Baseline trace")->required();
    cmp->add_option("-b", b, "Changed trace")->required();
    cmp->add_option("--factor", factor, "compiler|runtime|scheduler")->required();
    cmp->add_option("--dead-band", dead_band, "Sign dead-band on fractions (default 1e-6)");

    auto* sw = app.add_subcommand("sweep", "Run a scenario once per parameter value");
    sw->add_option("-s,--scenario", scenario, "Scenario file")->required();
    sw->add_option("--param", param, "Parameter path, e.g. jobs[*].runtime.checkpoint_interval")->required();
    sw->add_option("--values", values, "Comma-separated values")->required();
    sw->add_option("-o,--output", out, "Output directory")->required();
    sw->add_option("--threads", threads, "Worker threads (default: hardware concurrency)");

    auto* sp = app.add_subcommand("simpson", "Compare segment and aggregate trends between two windows");
    sp->add_option("-t,--trace", trace, "Trace file")->required();
    sp->add_option("--segment", segment, "Segment dimension")->required();
    sp->add_option("--before", before, "First window a:b")->required();
    sp->add_option("--after", after, "Second window a:b")->required();
    sp->add_option("--metric", metric, "sg|rg|pg|mpg (default pg)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (sim->parsed()) return cmd_simulate(scenario, out);
    if (an->parsed()) return cmd_analyze(trace, window, segment, bucket, per_job, legacy, out);
    if (cmp->parsed()) return cmd_compare(a, b, factor, dead_band);
    if (sw->parsed()) return cmd_sweep(scenario, param, values, out, threads);
    if (sp->parsed()) return cmd_simpson(trace, segment, before, after, metric);
    return 2;
}
