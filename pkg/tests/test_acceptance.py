"""Acceptance criteria, each at its stated tolerance.

Worked-example values are exact and frozen from hand-checked traces; sweep
criteria run the independent brute-force oracle over seeded random instances.
"""

from __future__ import annotations

import io
import time
from fractions import Fraction

import pytest

from skyline_search.cli import main
from skyline_search.engine import RunConfig, Termination, run, runtime_bound_check
from skyline_search.generator import GenParams, generate_random_instance
from skyline_search.instance import Signature, delta_min_vector, max_step_count
from skyline_search.instance_io import emit_trace, load_instance
from skyline_search.oracle import (
    PotentialTable,
    enumerate_feasible,
    verify_descent,
    verify_dominance_coverage,
    verify_layers,
    verify_residual_budget,
    verify_run,
)
from skyline_search.quantization import bin_count, rank_quantization, skyline_width_bound

SWEEP_SEEDS = range(100)
RESIDUAL_SEEDS = range(20)
S, A, B, T = range(4)
BOT, Z1, Z2 = range(3)


def sweep_instance(seed: int):
    # alternate seeds carry a table-rule dimension
    return generate_random_instance(seed, GenParams(table_dimension=seed % 2 == 1))


@pytest.fixture(scope="module")
def example():
    return load_instance("running_example")


@pytest.fixture(scope="module")
def sweep():
    start = time.perf_counter()
    runs = {seed: verify_run(sweep_instance(seed)) for seed in SWEEP_SEEDS}
    return runs, time.perf_counter() - start


def test_criterion_1_running_example_path_table(example, capsys):
    start = time.perf_counter()
    assert main(["layers", "running_example"]) == 0
    elapsed = time.perf_counter() - start
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "3 feasible paths"
    rows = [line.split() for line in out[1:4]]
    assert [(r[0], r[2], r[3]) for r in rows] == [
        ("p1", "(2,4,0)", "@(t,Z1)"),
        ("p2", "(1,2,0)", "@(t,Z2)"),
        ("p3", "(1,4,1)", "@(t,Z2)"),
    ]
    assert out[4:] == ["layer 1: {p1, p2}", "layer 2: {p3}"]
    assert elapsed < 1.0


def test_criterion_2_quantization_geometry(example):
    q = rank_quantization(example)
    assert bin_count(q) == 30
    # the terminal signatures are those of the complete paths: (t,Z1) and (t,Z2)
    terminal = {p.sig for p in enumerate_feasible(example).feasible_paths}
    assert terminal == {Signature(T, Z1), Signature(T, Z2)}
    assert skyline_width_bound(q, len(terminal)) == 60
    assert runtime_bound_check(run(example)).peak_width == 60
    assert max_step_count(example) == 4
    assert delta_min_vector(example) == (Fraction(0), Fraction(1), Fraction(0))


def test_criterion_3_trace_replication(example):
    result = run(example, RunConfig(record_snapshots=True))
    first = result.trace[0]
    assert first.extracted[:2] == (Signature(S, BOT), (0, 0, 0))
    assert result.snapshots[1] == [(Signature(A, Z1), (1, 2, 0)), (Signature(B, Z2), (1, 1, 0))]
    assert result.trace[1].skyline_size_before == 2
    before_step_3 = [c for s, c in result.snapshots[2] if s == Signature(B, Z2)]
    skyline = [c for c in before_step_3 if not any(o != c and all(x <= y for x, y in zip(o, c)) for o in before_step_3)]
    assert skyline == [(1, 1, 0)]
    assert result.trace[2].extracted[:2] == (Signature(B, Z2), (1, 1, 0))


def test_criterion_4_certificate_soundness(example, sweep):
    runs, elapsed = sweep
    checked = 0
    fixture = run(example)
    assert fixture.termination is Termination.CERTIFICATE_HELD
    assert verify_dominance_coverage(fixture, enumerate_feasible(example)).failures == []
    for seed, v in runs.items():
        if v.result.termination is Termination.CERTIFICATE_HELD:
            report = verify_dominance_coverage(v.result, enumerate_feasible(v.result.instance))
            assert report.failures == [], f"seed {seed}"
            checked += 1
    assert checked >= 50
    assert elapsed < 60


def test_criterion_5_descent(example, sweep):
    report = verify_descent(run(example))
    assert report.passed
    assert report.h_star[:3] == [2, 1, 0]
    assert report.phase_descents[0] == 2
    runs, _ = sweep
    multi_descent_phases = 0
    for seed, v in runs.items():
        descent = next(r for r in v.reports if r.name == "potential descent")
        assert descent.failures == [], f"seed {seed}"
        multi_descent_phases += sum(1 for d in descent.phase_descents if d >= 2)
    assert multi_descent_phases > 0


def test_criterion_6_layer_geometry(sweep):
    runs, _ = sweep
    snapshots = 0
    for seed, v in runs.items():
        report = verify_layers(v.result)
        assert report.failures == [], f"seed {seed}"
        q = rank_quantization(v.result.instance)
        assert report.details["max_signature_width"] <= bin_count(q)
        snapshots += len(v.result.snapshots)
    assert snapshots > len(runs)


def test_criterion_7_residual_budget(example):
    for label, inst in [("fixture", example)] + [(f"seed {s}", sweep_instance(s)) for s in RESIDUAL_SEEDS]:
        report = verify_residual_budget(inst, PotentialTable(inst), all_pairs=True)
        assert report.failures == [], label
        assert report.details["pairs"] > 0


def test_criterion_8_runtime_bound(example, sweep):
    runs, _ = sweep
    results = [run(example)] + [v.result for v in runs.values()]
    constants = set()
    for result in results:
        report = runtime_bound_check(result)
        assert report.holds, report
        again = runtime_bound_check(run(result.instance))
        assert again == report
        constants.add(report.constant)
    assert constants == {3}


def _csv(instance) -> bytes:
    sink = io.StringIO()
    emit_trace(run(instance), sink)
    return sink.getvalue().encode()


def test_criterion_9_determinism(example, tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["run", "running_example", "--trace", str(a)]) == 0
    assert main(["run", "running_example", "--trace", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    capsys.readouterr()
    for seed in range(20):
        inst = sweep_instance(seed)
        assert _csv(inst) == _csv(inst)
