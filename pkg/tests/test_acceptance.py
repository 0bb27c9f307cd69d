"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s``; the verdict lines
are also repeated in the terminal summary.
"""

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from acceptance_log import record
from oracles import exact_dot, pairs, random_pair_in, reduction_problems

from ksvi.assignment import SearchMode, Seed, build_star_assignment, is_admissible, oracle_sweep, propagate
from ksvi.constructions import certify_value_indefinite, reduce_to_equality
from ksvi.geometry import WINDOW_HIGH, WINDOW_LOW, NumRay
from ksvi.hypergraph import ray_id, star_hypergraph, table1_hypergraph, table1_labels, table1_vectors
from ksvi.qrng import borel_normality_test, certification_window, overlap_window, simulate_bits
from ksvi.reck import decompose, phase_close, random_unitary, reconstruct, ux_reference


def test_criterion_01_table_integrity():
    t0 = time.perf_counter()
    rows = table1_vectors()
    bad = [(cid, u, v) for cid, vecs in rows for u, v in pairs(vecs) if exact_dot(u, v) != 0]
    h = table1_hypergraph()
    bad += [(cid, u, v) for cid, c in h.contexts.items() for u, v in pairs(c.members)
            if exact_dot(h.ray(u).components, h.ray(v).components) != 0]
    dt = time.perf_counter() - t0
    ok = len(rows) == 24 and not bad and dt < 1.0
    record(1, ok, f"24 contexts, {3 * len(rows)} intra-context pairs, {len(bad)} nonzero dot products, {dt:.3f} s")
    assert ok


def test_criterion_02_theorem1():
    t0 = time.perf_counter()
    h = table1_hypergraph()
    a, trace = propagate(h, [Seed(ray_id((1, 0, 0)), "C1", 1), Seed(ray_id((3, 2, 1)), "C2", 1)], noncontextual=True)
    dt = time.perf_counter() - t0
    target = {ray_id((1, 1, -1)), ray_id((1, -1, 0)), ray_id((1, 1, 2))}
    where = set(h.contexts[trace.conflict_context].members) if trace.is_contradiction else set()
    mismatched = [o for o, lab in table1_labels().items() if a.observable_values(o) != {lab}]
    ok = trace.is_contradiction and where == target and not mismatched and dt < 1.0
    record(2, ok, f"contradiction in {trace.conflict_context} ({trace.conflict_kind}), "
                  f"{len(mismatched)} label mismatches, {dt:.3f} s")
    assert ok


def test_criterion_03_oracle_equivalence():
    t0 = time.perf_counter()
    h = table1_hypergraph()
    nc = oracle_sweep(h, 6, SearchMode.NoncontextualValueDefinite)
    ctx = oracle_sweep(h, 6, SearchMode.ContextualAllowed)
    dt = time.perf_counter() - t0
    ok = nc.mismatches == 0 and ctx.mismatches == 0 and nc.subgraphs == 190050 and dt < 300
    record(3, ok, f"{nc.subgraphs} subgraphs x {{NC, contextual}}, {nc.seed_sets + ctx.seed_sets} seed sets, "
                  f"{nc.mismatches + ctx.mismatches} mismatches, {dt:.1f} s")
    assert ok, (nc.first, ctx.first)


def _star_ok(h, a):
    v = build_star_assignment(h, a)
    a = h.resolve(a)
    total = len(v) == 3 * len(h.contexts)
    star = all(v.get(a, c) == 1 for c in h.contexts_of[a])
    return total and star and is_admissible(h, v)[0]


def test_criterion_04_star():
    t0 = time.perf_counter()
    h = table1_hypergraph()
    failures = [o for o in h.observables if not _star_ok(h, o)]
    s, _ = star_hypergraph(7)
    failures += [f"star:{o}" for o in s.observables if not _star_ok(s, o)]
    dt = time.perf_counter() - t0
    ok = not failures and dt < 10
    record(4, ok, f"{len(h.observables)} Table I observables + {len(s.observables)} star observables, "
                  f"{len(failures)} failures, {dt:.2f} s")
    assert ok, failures


def test_criterion_05_reduction():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    failures = []
    for i in range(1000):
        a, b = random_pair_in(rng, 0.0, WINDOW_HIGH)
        problems = reduction_problems(a, b, reduce_to_equality(a, b))
        if problems:
            failures.append((i, problems))
    dt = time.perf_counter() - t0
    ok = not failures and dt < 30
    record(5, ok, f"1000 random pairs, {len(failures)} with identity violations > 1e-9, {dt:.2f} s")
    assert ok, failures[:3]


def test_criterion_06_certification():
    t0 = time.perf_counter()
    sz0 = NumRay((0, 1, 0))
    certs = [certify_value_indefinite(sz0, NumRay((0.5, s * math.sqrt(2) / 2, 0.5))) for s in (1, -1)]
    dt = time.perf_counter() - t0
    ok = all(
        c.outcome == "ValueIndefinite" and abs(c.overlap - 1 / math.sqrt(2)) < 1e-12
        and WINDOW_LOW <= c.overlap <= WINDOW_HIGH
        for c in certs
    ) and dt < 10
    record(6, ok, f"S_x=+1: {certs[0].outcome}, S_x=-1: {certs[1].outcome}, overlap {certs[0].overlap:.12f}, "
                  f"{dt:.2f} s")
    assert ok


def test_criterion_07_qrng():
    t0 = time.perf_counter()
    n = 10**6
    notes = []
    s = simulate_bits(math.pi / 2, 0.0, n, 42)
    sigma = math.sqrt(0.25 / n)
    f1 = s.counts[1] / n
    ok = s.counts[0] == 0 and abs(f1 - 0.5) < 5 * sigma
    notes.append(f"pi/2: monitor {s.counts[0]}, freq(1) {f1:.5f}")
    norm = borel_normality_test(s.bits, 4)
    ok &= norm.passed
    t = simulate_bits(math.pi / 3, 0.0, n, 42)
    draws = t.draws
    ratio_sigma = math.sqrt(0.25 * 0.75 / draws)
    ok &= abs(t.monitor_ratio - 0.25) < 5 * ratio_sigma
    g1 = t.counts[1] / n
    ok &= abs(g1 - 0.5) < 5 * sigma
    norm3 = borel_normality_test(t.bits, 4)
    ok &= norm3.passed
    notes.append(f"pi/3: monitor ratio {t.monitor_ratio:.5f} (5 sigma {5 * ratio_sigma:.5f}), freq(1) {g1:.5f}")
    notes.append(f"normality k<=4 {'pass' if norm.passed and norm3.passed else 'FAIL'}")
    dt = time.perf_counter() - t0
    ok &= dt < 60
    record(7, ok, "; ".join(notes) + f", {dt:.2f} s")
    assert ok


def test_criterion_08_window_equivalence():
    grid = np.concatenate([np.linspace(0.0, math.pi, 998), [math.pi / 3, 2 * math.pi / 3]])
    disagree = []
    for theta in grid:
        by_angle = certification_window(float(theta))
        by_overlap, ov = overlap_window(float(theta))
        if by_angle != by_overlap:
            disagree.append((float(theta), ov))
    ok = not disagree
    detail = f"{len(grid)} angles, {len(disagree)} disagreements"
    if disagree:
        lo = min(t for t, _ in disagree)
        hi = max(t for t, _ in disagree)
        detail += (f" (overlap window is theta in [asin(sqrt(5/7)), pi - asin(sqrt(5/7))] = "
                   f"[{math.asin(math.sqrt(5 / 7)):.5f}, {math.pi - math.asin(math.sqrt(5 / 7)):.5f}]; "
                   f"disagreeing angles span {lo:.5f}..{hi:.5f})")
    record(8, ok, detail)
    assert ok, detail


def test_criterion_09_ux():
    t0 = time.perf_counter()
    d = decompose(ux_reference())
    ports_ok = [s.ports for s in d.stages] == [(1, 2), (1, 3), (2, 3)]
    t_ok = all(abs(s.transmittance - want) <= 1e-9 for s, want in zip(d.stages, (1 / 3, 3 / 4, 1 / 3)))
    p_ok = all(phase_close(s.phase, want) for s, want in zip(d.stages, (-math.pi / 2, math.pi, -math.pi / 2)))
    f_ok = all(phase_close(g, w) for g, w in zip(d.final_phases, (0.0, -math.pi / 2, -math.pi / 2)))
    err_ux = float(np.abs(reconstruct(d, 3) - ux_reference().entries).max())
    rng = np.random.default_rng(9)
    worst = 0.0
    for i in range(50):
        n = 2 + i % 4
        u = random_unitary(n, rng)
        worst = max(worst, float(np.abs(reconstruct(decompose(u), n) - u.entries).max()))
    dt = time.perf_counter() - t0
    ok = ports_ok and t_ok and p_ok and f_ok and err_ux <= 1e-12 and worst <= 1e-10 and dt < 10
    record(9, ok, f"T {[round(s.transmittance, 12) for s in d.stages]}, phi {[round(s.phase, 12) for s in d.stages]}, "
                  f"final {[round(p, 12) for p in d.final_phases]}, U_x error {err_ux:.1e}, "
                  f"random n<=5 worst {worst:.1e}, {dt:.2f} s")
    assert ok


def _cli(args, cwd):
    proc = subprocess.run([sys.executable, "-m", "ksvi.cli", *args], cwd=cwd, capture_output=True)
    return proc.returncode, proc.stdout, proc.stderr


def test_criterion_10_determinism(tmp_path):
    mismatches = []
    runs = {
        "verify-ks-table": ["verify-ks-table", "--emit-trace", "trace.json"],
        "qrng --seed 42": ["qrng", "--theta", str(math.pi / 2), "--phi", "0", "--n", "100000", "--seed", "42",
                           "--out", "bits.txt", "--report", "report.json", "--normality", "4"],
        "decompose --check-ux": ["decompose", "--check-ux", "--json"],
    }
    for name, argv in runs.items():
        outputs = []
        for k in range(2):
            d = tmp_path / f"{name.split()[0]}{k}"
            d.mkdir()
            code, out, err = _cli(argv, d)
            files = {p.name: p.read_bytes() for p in sorted(Path(d).iterdir())}
            outputs.append((code, out, err, files))
        if outputs[0] != outputs[1] or outputs[0][0] != 0:
            mismatches.append(name)
    ok = not mismatches
    record(10, ok, f"{len(runs)} commands run twice, byte-differing or failing: {mismatches or 'none'}")
    assert ok
