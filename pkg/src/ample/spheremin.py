"""Multi-start projected-gradient minimization over unit vectors in C^r.

Used adversarially: the inequality checker minimizes the gap over the unit
sphere, and the positivity checker minimizes the smallest eigenvalue of the
normalized curvature form.  Both objectives are smooth ratios of quadratic
forms, invariant under scaling of v, so the sphere is the natural domain and
a retracted gradient step with per-row Armijo backtracking is enough; no
general-purpose optimizer dependency is warranted for an r <= 10 problem.

Everything here is batched: an instance axis n and a start axis S are carried
through all operations, one row per (sample, start) pair, and rows never
interact.  That makes sweep results independent of how batches are scheduled
and makes more restarts a strict superset of fewer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import (
    PointCurvature,
    error_term_density,
    lhs_density,
    validate,
)
from .curvature import _generator  # shared seed-derivation rule
from .errors import InvalidInputError

ARMIJO_C = 1e-4
ETA0 = 0.25
ETA_MAX = 4.0
ETA_MIN = 1e-10


def form_matrices(coeff: np.ndarray) -> np.ndarray:
    """Reindex coeff[..., i, j, a, b] to M[..., a, b, i, j] for quadratic forms."""
    return np.ascontiguousarray(np.moveaxis(coeff, (-4, -3), (-2, -1)))


def _mv(M: np.ndarray, V: np.ndarray) -> np.ndarray:
    return np.einsum("nabij,nsj->nsabi", M, V)


def _q(V: np.ndarray, Mv: np.ndarray) -> np.ndarray:
    return np.einsum("nsi,nsabi->nsab", np.conj(V), Mv)


def det_objective(V: np.ndarray, Mv: np.ndarray, q: np.ndarray):
    """det of the 2x2 form matrix, with its conjugate-coordinate gradient."""
    f = (q[..., 0, 0] * q[..., 1, 1] - q[..., 0, 1] * q[..., 1, 0]).real
    grad = (
        q[..., 1, 1, None] * Mv[:, :, 0, 0]
        + q[..., 0, 0, None] * Mv[:, :, 1, 1]
        - q[..., 1, 0, None] * Mv[:, :, 0, 1]
        - q[..., 0, 1, None] * Mv[:, :, 1, 0]
        - 2.0 * f[..., None] * V
    )
    return f, grad


def lmin_objective(V: np.ndarray, Mv: np.ndarray, q: np.ndarray):
    """Smallest eigenvalue of the 2x2 form matrix, with subgradient at ties."""
    q00 = q[..., 0, 0].real
    q11 = q[..., 1, 1].real
    q01 = q[..., 0, 1]
    half_diff = 0.5 * (q00 - q11)
    s = np.sqrt(half_diff**2 + (q01 * np.conj(q01)).real)
    f = 0.5 * (q00 + q11) - s
    # at a double eigenvalue the objective is not differentiable; any
    # subgradient works for descent, take the symmetric one
    inv = np.where(s > 1e-18, 1.0 / np.maximum(s, 1e-300), 0.0)
    c00 = 0.5 - 0.5 * half_diff * inv
    c11 = 0.5 + 0.5 * half_diff * inv
    c01 = -0.5 * np.conj(q01) * inv
    grad = (
        c00[..., None] * Mv[:, :, 0, 0]
        + c11[..., None] * Mv[:, :, 1, 1]
        + c01[..., None] * Mv[:, :, 0, 1]
        + np.conj(c01)[..., None] * Mv[:, :, 1, 0]
        - f[..., None] * V
    )
    return f, grad


def objective_values(M: np.ndarray, V: np.ndarray, objective) -> np.ndarray:
    """Objective values only, for already-normalized vectors V of shape (n, S, r)."""
    Mv = _mv(M, V)
    f, _ = objective(V, Mv, _q(V, Mv))
    return f


def _normalize(V: np.ndarray) -> np.ndarray:
    norms = np.sqrt(np.einsum("nsi,nsi->ns", np.conj(V), V).real)
    return V / norms[..., None]


def minimize_on_sphere(
    M: np.ndarray,
    V0: np.ndarray,
    objective,
    iterations: int = 100,
    tol: float = 1e-8,
):
    """Monotone retracted-gradient descent, row by row.

    Returns (V, f, converged) of shapes (n, S, r), (n, S), (n, S).  A row is
    converged when its tangent gradient norm falls below tol or its step
    size collapses; rows that hit the iteration cap keep converged = False.
    Accepted steps only ever decrease f, so the final f never exceeds the
    value at the corresponding start.
    """
    V = _normalize(np.array(V0, dtype=np.complex128))
    n, S, _ = V.shape
    Mv = _mv(M, V)
    f, grad = objective(V, Mv, _q(V, Mv))
    eta = np.full((n, S), ETA0)
    active = np.ones((n, S), dtype=bool)
    for _ in range(iterations):
        radial = np.einsum("nsi,nsi->ns", np.conj(V), grad)
        tan = grad - radial[..., None] * V
        gnorm2 = np.einsum("nsi,nsi->ns", np.conj(tan), tan).real
        active &= np.sqrt(gnorm2) > tol
        active &= eta > ETA_MIN
        if not active.any():
            break
        W = _normalize(V - eta[..., None] * tan)
        Mw = _mv(M, W)
        fw, gradw = objective(W, Mw, _q(W, Mw))
        accept = active & (fw <= f - ARMIJO_C * eta * gnorm2)
        V = np.where(accept[..., None], W, V)
        f = np.where(accept, fw, f)
        grad = np.where(accept[..., None], gradw, grad)
        eta = np.where(accept, np.minimum(eta * 1.5, ETA_MAX), np.where(active, eta * 0.5, eta))
    return V, f, ~active


def basis_and_random_starts(
    M: np.ndarray,
    objective,
    restarts: int,
    seeds,
) -> np.ndarray:
    """Starting block of shape (n, restarts, r): the best standard basis
    vector per instance first, then restarts-1 random unit vectors.

    seeds is one seed (int or tuple) per instance; random starts come from
    spawn key (1,) of that seed so they never collide with the draws that
    built the instance itself.
    """
    if restarts < 1:
        raise InvalidInputError(f"restarts must be >= 1, got {restarts}")
    n, _, _, _, r = M.shape
    basis = np.broadcast_to(np.eye(r, dtype=np.complex128), (n, r, r))
    f_basis = objective_values(M, basis, objective)
    best = np.argmin(f_basis, axis=1)
    V0 = np.zeros((n, restarts, r), dtype=np.complex128)
    V0[np.arange(n), 0, best] = 1.0
    if restarts > 1:
        for i, seed in enumerate(seeds):
            g = _generator(seed, spawn_key=(1,))
            z = g.standard_normal((restarts - 1, 2 * r))
            V0[i, 1:] = z[:, :r] + 1j * z[:, r:]
        V0[:, 1:] = _normalize(V0[:, 1:])
    return V0


@dataclass(frozen=True)
class MinGapResult:
    """Best vector found, its gap, and whether the search converged there."""

    v: tuple[complex, ...]
    gap: float
    converged: bool


DEFAULT_START_SEED = 1815


def _instance_seed(pc: PointCurvature):
    return pc.seed if pc.seed is not None else DEFAULT_START_SEED


def min_gap_over_v(
    pc: PointCurvature,
    restarts: int = 5,
    tol: float = 1e-8,
    iterations: int = 100,
) -> MinGapResult:
    """Adversarial minimum of the inequality gap over unit vectors.

    The gap is an affine function of det of the normalized form, so the
    search minimizes the det and the result is mapped back.  Deterministic
    given pc.seed (instances built without a seed share a fixed default)
    and the restart count; more restarts can only lower the result.
    """
    if tol <= 0:
        raise InvalidInputError(f"tol must be positive, got {tol}")
    validate(pc)
    r = pc.rank
    M = form_matrices(pc.coeff)[None]
    V0 = basis_and_random_starts(M, det_objective, restarts, [_instance_seed(pc)])
    V, f, converged = minimize_on_sphere(M, V0, det_objective, iterations, tol)
    best = int(np.argmin(f[0]))
    k = r * r - 2 * r + 2
    scale = 2.0 * r * r / k
    offset = error_term_density(r, pc.epsilon) - lhs_density(pc)
    gap = scale * float(f[0, best]) + offset
    v = tuple(complex(x) for x in V[0, best])
    return MinGapResult(v, gap, bool(converged[0, best]))


def griffiths_min(
    pc: PointCurvature,
    restarts: int = 5,
    tol: float = 1e-8,
    iterations: int = 100,
) -> float:
    """Minimum over unit v of the smallest eigenvalue of the form <v, Theta v>.

    A positive value certifies that the curvature is Griffiths positive at
    the point, up to the confidence of the multi-start search; the
    projectively flat point returns exactly 1/r.
    """
    if tol <= 0:
        raise InvalidInputError(f"tol must be positive, got {tol}")
    validate(pc)
    M = form_matrices(pc.coeff)[None]
    V0 = basis_and_random_starts(M, lmin_objective, restarts, [_instance_seed(pc)])
    _, f, _ = minimize_on_sphere(M, V0, lmin_objective, iterations, tol)
    return float(f[0].min())
