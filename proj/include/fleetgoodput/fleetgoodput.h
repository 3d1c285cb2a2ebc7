/* SPDX-License-Identifier: Apache-2.0 */
/* SPDX-FileCopyrightText: 2026 The fleetgoodput Authors */

/*
 * C interface to the fleet simulator and goodput engine.
 *
 * Objects are opaque handles created by the library and released with the
 * matching *_free function (passing NULL is allowed). Every fallible call
 * returns an fgp_status; on failure fgp_last_error() describes the problem
 * for the calling thread until its next failing call. Strings returned by
 * accessors stay valid until the owning handle is freed.
 */

#ifndef FLEETGOODPUT_H
#define FLEETGOODPUT_H

#include <stddef.h>
#include <stdint.h>

#if defined(FGP_BUILDING_LIBRARY)
#define FGP_API __attribute__((visibility("default")))
#else
#define FGP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the command-line exit codes where they overlap. */
typedef enum fgp_status {
    FGP_OK = 0,
    FGP_ERR_INTERNAL = 1,
    FGP_ERR_CONFIG = 2,
    FGP_ERR_IO = 3,
    FGP_ERR_CORRUPT_TRACE = 4,
    FGP_ERR_GATE = 5,
    FGP_ERR_UNDEFINED_METRIC = 6,
    FGP_ERR_ARGUMENT = 7
} fgp_status;

typedef struct fgp_scenario fgp_scenario;
typedef struct fgp_trace fgp_trace;
typedef struct fgp_report_set fgp_report_set;
typedef struct fgp_verdict fgp_verdict;
typedef struct fgp_sweep_result fgp_sweep_result;
typedef struct fgp_simpson_result fgp_simpson_result;

FGP_API const char* fgp_version(void);
FGP_API const char* fgp_last_error(void);
/* Field path of the last configuration error ("" if none). */
FGP_API const char* fgp_last_error_field(void);
/* Trace line of the last corruption error (0 if unknown). */
FGP_API int64_t fgp_last_error_line(void);

/* Scenarios */
FGP_API fgp_status fgp_scenario_load(const char* path, fgp_scenario** out);
FGP_API fgp_status fgp_scenario_parse(const char* json_text, fgp_scenario** out);
FGP_API const char* fgp_scenario_hash(const fgp_scenario* scenario);
FGP_API const char* fgp_scenario_name(const fgp_scenario* scenario);
FGP_API void fgp_scenario_free(fgp_scenario* scenario);

/* Traces */
typedef struct fgp_trace_summary {
    int64_t jobs_submitted;
    int64_t jobs_completed;
    int64_t events;
    double horizon_seconds;
} fgp_trace_summary;

FGP_API fgp_status fgp_simulate(const fgp_scenario* scenario, fgp_trace** out);
FGP_API fgp_status fgp_trace_load(const char* path, fgp_trace** out);
FGP_API fgp_status fgp_trace_save(const fgp_trace* trace, const char* path);
FGP_API fgp_status fgp_trace_summarize(const fgp_trace* trace, fgp_trace_summary* out);
FGP_API void fgp_trace_free(fgp_trace* trace);

/* Goodput reports */
typedef struct fgp_analyze_options {
    const char* window;   /* "a:b" seconds, NULL or "" for the whole horizon */
    const char* segment;  /* segment dimension or NULL */
    double bucket_seconds; /* > 0 adds a time series */
    int per_job;          /* nonzero adds one row per job */
} fgp_analyze_options;

typedef struct fgp_report {
    const char* scope;
    double window_begin_seconds;
    double window_end_seconds;
    double sg_num, sg_den, rg_num, rg_den, pg_num, pg_den; /* chip-seconds */
    double sg, rg, pg, mpg;
    int sg_defined, rg_defined, pg_defined, mpg_defined;
    const char* flags; /* ';'-separated */
} fgp_report;

typedef struct fgp_legacy_metrics {
    double capacity_chip_seconds;
    double occupancy;
    double duty_cycle;
    int duty_cycle_defined;
} fgp_legacy_metrics;

FGP_API fgp_status fgp_analyze(const fgp_trace* trace, const fgp_analyze_options* options, fgp_report_set** out);
FGP_API size_t fgp_report_count(const fgp_report_set* set);
FGP_API fgp_status fgp_report_get(const fgp_report_set* set, size_t i, fgp_report* out);
FGP_API const char* fgp_report_csv(const fgp_report_set* set);
FGP_API void fgp_report_set_free(fgp_report_set* set);
FGP_API fgp_status fgp_legacy(const fgp_trace* trace, const char* window, fgp_legacy_metrics* out);

/* Paired comparison against the expected sign table. factor is one of
 * "compiler", "runtime", "scheduler". A dead_band <= 0 selects the default. */
FGP_API fgp_status fgp_compare(const fgp_trace* a, const fgp_trace* b, const char* factor, double dead_band,
                               fgp_verdict** out);
FGP_API int fgp_verdict_matched(const fgp_verdict* verdict);
FGP_API const char* fgp_verdict_text(const fgp_verdict* verdict);
FGP_API void fgp_verdict_free(fgp_verdict* verdict);

/* Parameter sweep; threads == 0 picks the hardware concurrency. */
FGP_API fgp_status fgp_sweep(const char* scenario_path, const char* param, const char* const* values, size_t count,
                             const char* out_dir, unsigned threads, fgp_sweep_result** out);
FGP_API const char* fgp_sweep_summary_csv(const fgp_sweep_result* result);
/* Index of the interior runtime-goodput maximum, or -1. */
FGP_API int64_t fgp_sweep_rg_interior_max(const fgp_sweep_result* result);
FGP_API void fgp_sweep_result_free(fgp_sweep_result* result);

/* Segment trend check between two windows of one trace. metric is one of
 * "sg", "rg", "pg", "mpg". */
FGP_API fgp_status fgp_simpson(const fgp_trace* trace, const char* segment, const char* window_before,
                               const char* window_after, const char* metric, fgp_simpson_result** out);
FGP_API int fgp_simpson_flagged(const fgp_simpson_result* result);
FGP_API const char* fgp_simpson_text(const fgp_simpson_result* result);
FGP_API void fgp_simpson_result_free(fgp_simpson_result* result);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FLEETGOODPUT_H */
