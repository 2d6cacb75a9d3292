import numpy as np
import pytest

from ample.curvature import pointwise_gap, projectively_flat, sample_curvature
from ample.errors import InvalidInputError
from ample.spheremin import (
    basis_and_random_starts,
    det_objective,
    form_matrices,
    griffiths_min,
    lmin_objective,
    min_gap_over_v,
    minimize_on_sphere,
    objective_values,
)


def normalized_q(pc, v):
    v = np.asarray(v, dtype=np.complex128)
    q = np.einsum("i,ijab,j->ab", np.conj(v), pc.coeff, v) / np.vdot(v, v).real
    return q


def random_units(rng, n, r):
    z = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    return z / np.linalg.norm(z, axis=1)[:, None]


def test_det_objective_matches_form_determinant():
    pc = sample_curvature(4, 0.1, 3)
    M = form_matrices(pc.coeff)[None]
    rng = np.random.default_rng(0)
    V = random_units(rng, 8, 4)[None]
    f = objective_values(M, V, det_objective)
    for s in range(8):
        q = normalized_q(pc, V[0, s])
        assert f[0, s] == pytest.approx(np.linalg.det(q).real, rel=1e-12)


def test_lmin_objective_matches_eigvalsh():
    pc = sample_curvature(5, 0.05, 9)
    M = form_matrices(pc.coeff)[None]
    rng = np.random.default_rng(1)
    V = random_units(rng, 8, 5)[None]
    f = objective_values(M, V, lmin_objective)
    for s in range(8):
        q = normalized_q(pc, V[0, s])
        assert f[0, s] == pytest.approx(np.linalg.eigvalsh(q)[0], rel=1e-12, abs=1e-12)


def test_minimizer_never_increases_the_objective():
    pc = sample_curvature(3, 0.1, 21)
    M = form_matrices(pc.coeff)[None]
    rng = np.random.default_rng(2)
    V0 = random_units(rng, 16, 3)[None]
    f0 = objective_values(M, V0, det_objective)
    _, f, _ = minimize_on_sphere(M, V0, det_objective, iterations=50)
    assert (f <= f0 + 1e-15).all()


def test_minimizer_beats_dense_grid_at_rank_two():
    # at rank 2 a unit vector is (cos t, sin t e^{i p}) up to global phase,
    # so a fine 2d grid brackets the true minimum
    ts = np.linspace(0.0, np.pi / 2, 181)
    ps = np.linspace(0.0, 2 * np.pi, 361, endpoint=False)
    tt, pp = np.meshgrid(ts, ps, indexing="ij")
    V = np.stack([np.cos(tt), np.sin(tt) * np.exp(1j * pp)], axis=-1).reshape(1, -1, 2)
    for seed in range(5):
        pc = sample_curvature(2, 0.1, (6, seed))
        M = form_matrices(pc.coeff)[None]
        dets = objective_values(M, V, det_objective)[0]
        # the grid and the search minimize the same det; the gap is an
        # increasing affine function of it, so comparing dets is enough
        grid_min = float(dets.min())
        found = min_gap_over_v(pc, restarts=8, iterations=200)
        found_det = np.linalg.det(normalized_q(pc, np.array(found.v))).real
        assert found_det <= grid_min + 1e-7
        spot = pointwise_gap(pc, V[0, int(np.argmin(dets))]).gap
        assert found.gap <= spot + 1e-6


def test_reported_gap_matches_direct_evaluation_at_reported_vector():
    for r in (2, 3, 5):
        pc = sample_curvature(r, 0.1, (13, r))
        res = min_gap_over_v(pc, restarts=3, iterations=120)
        direct = pointwise_gap(pc, np.array(res.v)).gap
        assert res.gap == pytest.approx(direct, rel=1e-10, abs=1e-10)


def test_more_restarts_never_raise_the_minimum():
    for seed in range(4):
        pc = sample_curvature(4, 0.1, (30, seed))
        gaps = [
            min_gap_over_v(pc, restarts=k, iterations=80).gap for k in (1, 3, 6)
        ]
        assert gaps[1] <= gaps[0] + 1e-15
        assert gaps[2] <= gaps[1] + 1e-15


def test_projectively_flat_minimum_is_exactly_zero():
    for r in range(2, 9):
        res = min_gap_over_v(projectively_flat(r), iterations=200)
        assert abs(res.gap) <= 1e-12


def test_projectively_flat_griffiths_floor():
    for r in range(2, 9):
        assert griffiths_min(projectively_flat(r), iterations=200) == pytest.approx(
            1.0 / r, abs=1e-9
        )


def test_griffiths_min_lower_bounds_random_evaluations():
    pc = sample_curvature(3, 0.1, 44)
    found = griffiths_min(pc, restarts=6, iterations=150)
    rng = np.random.default_rng(5)
    for v in random_units(rng, 200, 3):
        q = normalized_q(pc, v)
        assert found <= np.linalg.eigvalsh(q)[0] + 1e-9


def test_search_is_deterministic():
    pc = sample_curvature(5, 0.1, (2, 2))
    a = min_gap_over_v(pc, restarts=5)
    b = min_gap_over_v(pc, restarts=5)
    assert a.v == b.v
    assert a.gap == b.gap


def test_restart_validation():
    pc = sample_curvature(2, 0.0, 0)
    with pytest.raises(InvalidInputError):
        min_gap_over_v(pc, restarts=0)
    with pytest.raises(InvalidInputError):
        min_gap_over_v(pc, tol=0.0)


def test_basis_start_is_best_basis_vector():
    pc = sample_curvature(4, 0.1, 77)
    M = form_matrices(pc.coeff)[None]
    V0 = basis_and_random_starts(M, det_objective, 3, [pc.seed])
    basis_vals = [
        np.linalg.det(normalized_q(pc, np.eye(4)[i])).real for i in range(4)
    ]
    start_val = np.linalg.det(normalized_q(pc, V0[0, 0])).real
    assert start_val == pytest.approx(min(basis_vals), rel=1e-12)
    norms = np.linalg.norm(V0[0], axis=1)
    assert norms == pytest.approx(np.ones(3), abs=1e-12)
