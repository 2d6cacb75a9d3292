import csv

import numpy as np
import pytest

from ample.curvature import pointwise_gap
from ample.errors import InvalidInputError
from ample.sweep import (
    ADVERSARIAL_SOURCE,
    RANDOM_SOURCE,
    SweepConfig,
    export_histograms,
    replay_worst,
    run_gap_sweep,
    run_griffiths_sweep,
    run_lagrange_check,
)

SMALL = SweepConfig(
    ranks=(2, 3),
    epsilons=(0.0, 0.1),
    samples=40,
    seed=5,
    restarts=3,
    random_vectors=4,
    iterations=40,
)


def test_gap_sweep_passes_and_reports_each_configuration():
    res = run_gap_sweep(SMALL)
    assert res.passed
    assert len(res.results) == 4
    assert [(c.rank, c.epsilon) for c in res.results] == [
        (2, 0.0), (2, 0.1), (3, 0.0), (3, 0.1),
    ]
    for c in res.results:
        assert c.samples == 40
        assert c.min_value >= -1e-9
        assert c.mean_value >= c.min_value
        assert c.worst.value == c.min_value
        assert c.worst.source in (RANDOM_SOURCE, ADVERSARIAL_SOURCE)
        assert sum(count for _, _, count in c.histogram) == 40
        assert 0.0 <= c.converged_fraction <= 1.0
    assert res.min_value == min(c.min_value for c in res.results)
    assert res.residual_max < 1e-9


def test_sweep_is_reproducible():
    assert run_gap_sweep(SMALL) == run_gap_sweep(SMALL)


def test_sweep_independent_of_thread_count_and_batch_size():
    from dataclasses import replace

    base = run_gap_sweep(SMALL)
    threaded = run_gap_sweep(replace(SMALL, threads=4))
    rebatched = run_gap_sweep(replace(SMALL, batch_size=7))
    assert threaded == base
    assert rebatched == base


def test_worst_record_replays_to_the_recorded_value():
    res = run_gap_sweep(SMALL)
    for c in res.results:
        pc = replay_worst(c.worst)
        assert pc.rank == c.rank
        assert pc.epsilon == c.epsilon
        again = pointwise_gap(pc, np.array(c.worst.v)).gap
        assert again == pytest.approx(c.worst.value, rel=1e-9, abs=1e-12)


def test_griffiths_worst_record_matches_eigenvalue_at_vector():
    res = run_griffiths_sweep(SMALL)
    for c in res.results:
        pc = replay_worst(c.worst)
        v = np.array(c.worst.v)
        q = np.einsum("i,ijab,j->ab", np.conj(v), pc.coeff, v) / np.vdot(v, v).real
        assert np.linalg.eigvalsh(q)[0] == pytest.approx(c.worst.value, abs=1e-10)


def test_projectively_flat_mode_pins_the_boundary():
    cfg = SweepConfig(ranks=(2, 4, 7), samples=100, seed=0, mode="projectively-flat")
    gap = run_gap_sweep(cfg)
    assert gap.passed
    for c in gap.results:
        assert c.samples == 1
        assert c.epsilon == 0.0
        assert abs(c.min_value) <= 1e-12
    eig = run_griffiths_sweep(cfg)
    assert eig.passed
    for c in eig.results:
        assert c.min_value == pytest.approx(1.0 / c.rank, abs=1e-9)


def test_histogram_export_round_trips(tmp_path):
    res = run_gap_sweep(SMALL)
    path = tmp_path / "hist.csv"
    export_histograms(res, str(path))
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["rank", "epsilon", "bin_lo", "bin_hi", "count"]
    body = rows[1:]
    assert len(body) == sum(len(c.histogram) for c in res.results)
    by_config = {}
    for rank, eps, lo, hi, count in body:
        by_config.setdefault((int(rank), float(eps)), 0)
        by_config[(int(rank), float(eps))] += int(count)
        assert float(lo) <= float(hi)
    for c in res.results:
        assert by_config[(c.rank, c.epsilon)] == c.samples


def test_config_validation():
    with pytest.raises(InvalidInputError):
        SweepConfig(ranks=())
    with pytest.raises(InvalidInputError):
        SweepConfig(ranks=(1,))
    with pytest.raises(InvalidInputError):
        SweepConfig(ranks=(2,), epsilons=(-0.1,))
    with pytest.raises(InvalidInputError):
        SweepConfig(ranks=(2,), samples=0)
    with pytest.raises(InvalidInputError):
        SweepConfig(ranks=(2,), mode="adaptive")
    with pytest.raises(InvalidInputError):
        SweepConfig(ranks=(2,), threads=0)


def test_lagrange_check_passes_and_is_reproducible():
    a = run_lagrange_check(150, 9)
    b = run_lagrange_check(150, 9)
    assert a == b
    assert a.passed
    assert a.max_abs_diff <= 1e-6
    w = a.worst
    assert len(w.b_diag) == w.rank
    assert abs(sum(w.b_diag)) <= 1e-12
    assert abs(w.closed_form - w.numeric) == a.max_abs_diff


def test_lagrange_check_validation():
    with pytest.raises(InvalidInputError):
        run_lagrange_check(0, 1)
    with pytest.raises(InvalidInputError):
        run_lagrange_check(10, -1)
