#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The fleetgoodput Authors
"""Writes the bundled scenario corpus into scenarios/.

Paired scenarios are produced from one base so they differ only in the
section their comparison factor covers.
"""

import copy
import json
import pathlib
import random
import sys

OUT = pathlib.Path(__file__).resolve().parent.parent / "scenarios"
PEAK = 1.0e12


def chip_kind(name, gen="gen1", mtbf=1.0e9, peak=PEAK):
    return {"name": name, "peak_flops": peak, "mtbf": mtbf, "generation_tag": gen}


def matmul_graph(label, flops):
    # 2*M*K*N == flops with M = K = 1000
    n = int(round(flops / 2.0e6))
    assert 2 * 1000 * 1000 * n == int(flops), (label, flops)
    return {"label": label, "nodes": [{"id": "mm", "kind": "matmul", "dims": [1000, 1000, n]}]}


def profile(compute, comm=0.0, host=0.0, overlap=0.0):
    return {"device_compute_time": compute, "comm_time": comm, "host_time": host, "overlap_fraction": overlap}


def job(jid, shape, work, graph, prof, runtime, **extra):
    j = {
        "id": jid,
        "priority": 1,
        "chip_kind": "tpu-a",
        "shape": shape,
        "tasks": 1,
        "arrival": 0,
        "work": work,
        "phase": "training",
        "graph": graph,
        "profile": prof,
        "runtime": runtime,
    }
    j.update(extra)
    return j


def single_job_base(name, prof, runtime, work, horizon, ideal_step):
    return {
        "name": name,
        "chip_kinds": [chip_kind("tpu-a")],
        "fleet": {"pods": [{"id": "p0", "chip_kind": "tpu-a", "shape": [2, 2]}]},
        "op_graphs": [matmul_graph("g", ideal_step * PEAK * 4)],
        "jobs": [job("train", [2, 2], work, "g", prof, runtime)],
        "horizon": horizon,
        "seed": 7,
    }


def minimal():
    s = single_job_base("minimal", profile(1.0), {"init_time": 5, "checkpoint_interval": 5,
                                                 "checkpoint_write_time": 1}, 10, 30, 0.5)
    return {"minimal": s}


def table2():
    out = {}
    # Compiler change on a device-bound step: 1.0 s -> 0.5 s.
    rt = {"init_time": 10, "checkpoint_interval": 10, "checkpoint_write_time": 1}
    a = single_job_base("table2_device_bound", profile(1.0), rt, 100, 100, 0.4)
    b = copy.deepcopy(a)
    b["passes"] = [{"time": 0, "name": "simplify", "effect": "scale_compute", "value": 0.5}]
    out["table2_device_bound_a"], out["table2_device_bound_b"] = a, b

    # Same pass on a host-bound step: host 2 s dominates compute 1 s and 0.5 s.
    a = single_job_base("table2_host_bound", profile(1.0, host=2.0), rt, 100, 100, 0.4)
    b = copy.deepcopy(a)
    b["passes"] = [{"time": 0, "name": "simplify", "effect": "scale_compute", "value": 0.5}]
    out["table2_host_bound_a"], out["table2_host_bound_b"] = a, b

    # Runtime change: synchronous -> asynchronous checkpoint writes.
    rt = {"init_time": 10, "checkpoint_interval": 10, "checkpoint_write_time": 3, "async_checkpoint": False}
    a = single_job_base("table2_runtime", profile(1.0), rt, 80, 100, 0.4)
    b = copy.deepcopy(a)
    b["jobs"][0]["runtime"]["async_checkpoint"] = True
    out["table2_runtime_a"], out["table2_runtime_b"] = a, b

    # Scheduler change: tasks of a job no longer start 2 s apart.
    rt = {"init_time": 1, "checkpoint_interval": 3, "checkpoint_write_time": 0.5}
    jobs = [job(f"q{i}", [2, 2], 6, "g", profile(1.0), rt, tasks=2) for i in range(6)]
    a = {
        "name": "table2_scheduler",
        "chip_kinds": [chip_kind("tpu-a")],
        "fleet": {"pods": [{"id": "p0", "chip_kind": "tpu-a", "shape": [2, 2]}]},
        "op_graphs": [matmul_graph("g", 0.4 * PEAK * 4)],
        "jobs": jobs,
        "scheduler": {"task_startup_stagger": 2},
        "horizon": 40,
        "seed": 7,
    }
    b = copy.deepcopy(a)
    b["scheduler"]["task_startup_stagger"] = 0
    out["table2_scheduler_a"], out["table2_scheduler_b"] = a, b
    return out


def overlap():
    # Communication-bound step: 10 ms compute + 10 ms exposed collective; the
    # overlap pass lands halfway through.
    s = single_job_base("overlap_commbound", profile(0.010, comm=0.010),
                        {"init_time": 1, "checkpoint_interval": 500, "checkpoint_write_time": 0.5}, 100000, 100, 0.008)
    s["passes"] = [{"time": 50, "name": "decompose_collectives", "effect": "set_overlap", "value": 0.9}]
    return {"overlap_commbound": s}


def simpson():
    # Two chip kinds; each segment's PG rises from the first half to the
    # second while committed chip-time moves from the high-PG kind to the
    # low-PG kind.
    def build(name, weights):
        kinds = [chip_kind("fast", "gen2"), chip_kind("slow", "gen1")]
        pods = [{"id": "pa", "chip_kind": "fast", "shape": [4, 4]},
                {"id": "pb", "chip_kind": "slow", "shape": [4, 4]}]
        graphs, jobs = [], []
        serving = {"init_time": 0}
        plan = [("fast", 0, 0.8), ("fast", 50, 0.9), ("slow", 0, 0.2), ("slow", 50, 0.3)]
        for (kind, start, pg), shape in zip(plan, weights):
            jid = f"{kind}_{start}"
            chips = shape[0] * shape[1]
            graphs.append(matmul_graph(jid, pg * PEAK * chips))
            jobs.append(job(jid, shape, 50, jid, profile(1.0), serving, chip_kind=kind, arrival=start,
                            phase="serving"))
        return {"name": name, "chip_kinds": kinds, "fleet": {"pods": pods}, "op_graphs": graphs, "jobs": jobs,
                "horizon": 100, "seed": 7}

    return {
        "simpson": build("simpson", [[4, 4], [1, 1], [1, 1], [4, 4]]),
        "simpson_control": build("simpson_control", [[4, 4], [4, 4], [1, 1], [1, 1]]),
    }


def checkpoint_economics():
    # One 16-chip training job with random chip failures (job MTBF 200 s).
    s = {
        "name": "checkpoint_economics",
        "chip_kinds": [chip_kind("tpu-a", mtbf=3200.0)],
        "fleet": {"pods": [{"id": "p0", "chip_kind": "tpu-a", "shape": [4, 4]}]},
        "op_graphs": [matmul_graph("g", 0.5 * PEAK * 16)],
        "jobs": [job("train", [4, 4], 10**7, "g", profile(1.0),
                     {"init_time": 5, "checkpoint_interval": 20, "checkpoint_write_time": 2,
                      "async_checkpoint": False, "restore_time": 2})],
        "failures": {"enabled": True},
        "horizon": 20000,
        "seed": 11,
    }
    return {"checkpoint_economics": s}


def chip_lifecycle():
    # Three chip generations with mixed phases and failures enabled.
    rnd = random.Random(9)
    kinds = [chip_kind("v2", "gen-old", mtbf=4.0e5), chip_kind("v4", "gen-mid", mtbf=8.0e5),
             chip_kind("v5", "gen-new", mtbf=1.6e6)]
    pods = [{"id": f"pod-{k['name']}", "chip_kind": k["name"], "shape": [8, 8]} for k in kinds]
    graphs = [matmul_graph("small", 0.05 * PEAK), matmul_graph("big", 2.0 * PEAK)]
    presets = {
        "single-client": {"init_time": 30, "checkpoint_interval": 50, "checkpoint_write_time": 4, "restore_time": 10},
        "multi-client": {"init_time": 20, "compile_time": 12, "aot_compile": True, "checkpoint_interval": 50,
                         "checkpoint_write_time": 4, "async_checkpoint": True, "restore_time": 8},
    }
    jobs = []
    for i in range(40):
        k = rnd.choice(kinds)["name"]
        phase = rnd.choice(["training", "training", "serving", "bulk_inference"])
        side = rnd.choice([1, 2, 4, 8])
        shape = [side, rnd.choice([1, 2, 4, 8])]
        tag = rnd.choice(list(presets))
        j = job(f"job{i:02d}", shape, rnd.randint(200, 2000), rnd.choice(["small", "big"]),
                profile(rnd.uniform(0.3, 1.0), comm=rnd.uniform(0, 0.3), host=rnd.uniform(0, 0.6),
                        overlap=rnd.choice([0.0, 0.5])),
                {}, chip_kind=k, phase=phase, priority=rnd.randint(0, 3), arrival=rnd.randint(0, 3000),
                runtime_tag=tag, framework_tag=("pathways" if tag == "multi-client" else "classic"),
                tasks=shape[0])
        del j["runtime"]
        if phase == "bulk_inference":
            j["runtime"] = {"shards": 4, "shard_barrier_wait": 2}
        jobs.append(j)
    s = {
        "name": "chip_lifecycle",
        "chip_kinds": kinds,
        "fleet": {"pods": pods},
        "op_graphs": graphs,
        "runtime_presets": presets,
        "jobs": jobs,
        "passes": [{"time": 2000, "name": "simplify", "effect": "scale_compute", "value": 0.8}],
        "failures": {"enabled": True},
        "horizon": 6000,
        "seed": 3,
    }
    return {"chip_lifecycle": s}


def fig11():
    # Two 16x16 pods. A saturating low-priority background stream of every
    # size class, top-priority XL jobs, and a dense stream of short
    # high-priority small jobs whose evictions exercise the size preference.
    # Generator seed 13 of 0..19; see the decisions notes for the spread.
    rnd = random.Random(13)
    classes = {
        "small": [[2, 2], [1, 4], [4, 1]],
        "medium": [[4, 4], [4, 8], [2, 8]],
        "large": [[8, 8], [8, 16]],
        "xl": [[16, 16]],
    }
    init = {"small": 5, "medium": 20, "large": 40, "xl": 120}
    mix = ["small"] * 4 + ["medium"] * 6 + ["large"] * 3 + ["xl"]
    arrivals = []
    t = 0
    while t < 8000:
        t += rnd.randint(1, 180)
        c = rnd.choice(mix)
        arrivals.append((t, c, 2 if c == "xl" else 0))
    t = 0
    while t < 8000:
        t += rnd.randint(1, 20)
        arrivals.append((t, "small", 1))
    arrivals.sort()
    jobs = []
    for i, (t, c, pr) in enumerate(arrivals):
        shape = rnd.choice(classes[c])
        work = {"small": rnd.randint(200, 600), "xl": rnd.randint(200, 400)}.get(c, rnd.randint(300, 1500))
        if pr == 1:
            work = rnd.randint(20, 60)
        jobs.append(job(f"j{i:03d}", shape, work, "g", profile(1.0),
                        {"init_time": init[c], "checkpoint_interval": 50, "checkpoint_write_time": 2,
                         "restore_time": init[c] / 2}, priority=pr, arrival=t))
    s = {
        "name": "fig11_eviction",
        "chip_kinds": [chip_kind("tpu-a")],
        "fleet": {"pods": [{"id": "p0", "chip_kind": "tpu-a", "shape": [16, 16]},
                           {"id": "p1", "chip_kind": "tpu-a", "shape": [16, 16]}],
                  "size_thresholds": [4, 32, 128]},
        "op_graphs": [matmul_graph("g", 0.5 * PEAK)],
        "jobs": jobs,
        "scheduler": {"size_preference": ["medium", "large", "small", "xl"]},
        "horizon": 20000,
        "seed": 5,
    }
    u = copy.deepcopy(s)
    u["scheduler"]["size_preference"] = "uniform"
    return {"fig11_eviction": s, "fig11_eviction_uniform": u}


def main():
    OUT.mkdir(exist_ok=True)
    corpus = {}
    for part in (minimal, fig11, table2, overlap, simpson, checkpoint_economics, chip_lifecycle):
        corpus.update(part())
    for name, doc in sorted(corpus.items()):
        (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {len(corpus)} scenarios to {OUT}", file=sys.stderr)


if __name__ == "__main__":
    main()
