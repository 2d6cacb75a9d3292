"""Pointwise curvature model for rank-r bundles over a surface.

A (1,1)-form alpha = sum_{a,b} alpha_{a bbar} sqrt(-1) dz^a wedge dzbar^b at a
point is stored as its 2x2 coefficient matrix.  Densities of 4-forms are taken
against the volume form sqrt(-1)dz^1 wedge dzbar^1 wedge sqrt(-1)dz^2 wedge
dzbar^2, so the Kahler form omega (coefficient matrix = identity) has
omega^2 density 2 and the wedge of two (1,1)-forms has density

    a_{11}b_{22} + a_{22}b_{11} - a_{12}b_{21} - a_{21}b_{12}.

Curvature at the point is an r x r matrix of such forms, coeff[i, j, a, b],
Hermitian as a form-valued endomorphism, with trace equal to omega and with
contraction against omega equal to (2/r)*Id + B for a trace-free Hermitian
error matrix B bounded entrywise by epsilon.  The sampler enforces all of
these constraints by construction, solving for the dependent entries, rather
than by projecting after the fact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InconsistentStateError, InvalidInputError

Seed = int | tuple[int, ...]

# residual tiers: constructed-by-solving constraints sit at 1e-12, inequality
# verification at 1e-9, optimizer-vs-closed-form comparisons at 1e-6
CONSTRUCTION_TOL = 1e-12
VALIDATION_TOL = 1e-9
OPTIMIZER_TOL = 1e-6


def wedge_density(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Density of alpha wedge beta for coefficient arrays of shape (..., 2, 2)."""
    return (
        a[..., 0, 0] * b[..., 1, 1]
        + a[..., 1, 1] * b[..., 0, 0]
        - a[..., 0, 1] * b[..., 1, 0]
        - a[..., 1, 0] * b[..., 0, 1]
    )


def _coefficient_count(r: int) -> int:
    # r diagonal B draws, r(r-1) for off-diagonal B discs, r-1 diagonal t_i,
    # 2(r-1) for diagonal dz^1 dzbar^2 entries, 3r(r-1) for off-diagonal blocks
    return 4 * r * r - 3


@dataclass(frozen=True, eq=False)
class PointCurvature:
    """Curvature of a metric at one point, in a frame where the metric is Id.

    coeff[i, j, a, b] is the dz^a wedge dzbar^b coefficient of the (i, j)
    entry.  seed records how the instance was sampled (None for constructed
    instances); epsilon and B echo the constraint data.
    """

    rank: int
    coeff: np.ndarray
    epsilon: float
    B: np.ndarray
    seed: Seed | None = None

    def __post_init__(self):
        if self.rank < 2:
            raise InvalidInputError(f"rank must be at least 2, got {self.rank}")
        coeff = np.ascontiguousarray(self.coeff, dtype=np.complex128)
        if coeff.shape != (self.rank, self.rank, 2, 2):
            raise InvalidInputError(
                f"coeff must have shape {(self.rank, self.rank, 2, 2)}, got {coeff.shape}"
            )
        b = np.ascontiguousarray(self.B, dtype=np.complex128)
        if b.shape != (self.rank, self.rank):
            raise InvalidInputError(
                f"B must have shape {(self.rank, self.rank)}, got {b.shape}"
            )
        if not (np.isfinite(self.epsilon) and self.epsilon >= 0):
            raise InvalidInputError(f"epsilon must be finite and >= 0, got {self.epsilon}")
        coeff.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "coeff", coeff)
        object.__setattr__(self, "B", b)


def _batch_residuals(coeff: np.ndarray, B: np.ndarray, epsilon: float) -> dict[str, float]:
    r = coeff.shape[1]
    eye2 = np.eye(2)
    eye_r = np.eye(r)
    hermitian = np.abs(coeff - np.conj(np.transpose(coeff, (0, 2, 1, 4, 3)))).max()
    trace = np.abs(np.einsum("niiab->nab", coeff) - eye2).max()
    contracted = coeff[..., 0, 0] + coeff[..., 1, 1]
    he = np.abs(contracted - ((2.0 / r) * eye_r + B)).max()
    b_trace = np.abs(np.einsum("nii->n", B)).max()
    b_bound = max(0.0, float(np.abs(B).max()) - epsilon)
    return {
        "hermitian": float(hermitian),
        "trace": float(trace),
        "he": float(he),
        "b_trace": float(b_trace),
        "b_bound": float(b_bound),
    }


def residuals(pc: PointCurvature) -> dict[str, float]:
    """Max-norm violations of the defining constraints, keyed by constraint name.

    b_bound is the excess of max |B_ij| over epsilon; it is informational
    because a unitary change of frame preserves every other constraint but
    not the entrywise bound.
    """
    return _batch_residuals(pc.coeff[None], pc.B[None], pc.epsilon)


def validate(pc: PointCurvature, tol: float = VALIDATION_TOL) -> None:
    """Raise InconsistentStateError if any structural residual exceeds tol."""
    res = residuals(pc)
    bad = {k: v for k, v in res.items() if k != "b_bound" and v > tol}
    if bad:
        worst = ", ".join(f"{k}={v:.3e}" for k, v in sorted(bad.items()))
        raise InconsistentStateError(f"curvature constraints violated: {worst}")


def _generator(seed: Seed, spawn_key: tuple[int, ...] = ()) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=spawn_key)
    return np.random.Generator(np.random.PCG64(ss))


def _check_seed(seed: Seed) -> Seed:
    entries = seed if isinstance(seed, tuple) else (seed,)
    for s in entries:
        if not isinstance(s, (int, np.integer)) or isinstance(s, bool) or s < 0:
            raise InvalidInputError(f"seed entries must be nonnegative integers, got {seed!r}")
    return seed


def _disc(u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    # area-uniform draw on the closed unit disc
    return np.sqrt(u1) * np.exp(2j * np.pi * u2)


def build_batch(r: int, epsilon: float, uniforms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Turn uniform [0,1) draws of shape (n, 4r^2-3) into n constraint-exact samples.

    Layout per row: r diagonal B draws, r(r-1)/2 off-diagonal B disc pairs,
    r-1 diagonal t draws, r-1 diagonal dz^1 dzbar^2 disc pairs, then
    3 disc pairs per off-diagonal block in upper-triangle order.  Dependent
    entries (last t, last diagonal off-entry, all dzbar-side entries) are
    solved from the constraints.  Returns (coeff, B).
    """
    n, m = uniforms.shape
    if m != _coefficient_count(r):
        raise InvalidInputError(f"need {_coefficient_count(r)} uniforms per row, got {m}")
    pos = 0

    def take(count):
        nonlocal pos
        block = uniforms[:, pos : pos + count]
        pos += count
        return block

    # trace-free Hermitian B, entrywise bounded by epsilon: the diagonal is
    # drawn in [-eps/2, eps/2] and mean-centered, which keeps it in
    # [-eps, eps] exactly; off-diagonal entries are drawn on the radius-eps
    # disc directly
    b_diag = epsilon * (take(r) - 0.5)
    b_diag = b_diag - b_diag.mean(axis=1, keepdims=True)
    npairs = r * (r - 1) // 2
    pairs_u = take(2 * npairs)
    b_off = epsilon * _disc(pairs_u[:, :npairs], pairs_u[:, npairs:])
    iu, ju = np.triu_indices(r, k=1)
    B = np.zeros((n, r, r), dtype=np.complex128)
    B[:, np.arange(r), np.arange(r)] = b_diag
    B[:, iu, ju] = b_off
    B[:, ju, iu] = np.conj(b_off)

    coeff = np.zeros((n, r, r, 2, 2), dtype=np.complex128)
    diag = np.arange(r)

    t = np.empty((n, r))
    t[:, : r - 1] = 2.0 * take(r - 1) - 1.0
    t[:, r - 1] = 1.0 - t[:, : r - 1].sum(axis=1)
    coeff[:, diag, diag, 0, 0] = t
    coeff[:, diag, diag, 1, 1] = 2.0 / r + b_diag - t

    d12 = np.empty((n, r), dtype=np.complex128)
    d12_u = take(2 * (r - 1))
    d12[:, : r - 1] = _disc(d12_u[:, : r - 1], d12_u[:, r - 1 :])
    d12[:, r - 1] = -d12[:, : r - 1].sum(axis=1)
    coeff[:, diag, diag, 0, 1] = d12
    coeff[:, diag, diag, 1, 0] = np.conj(d12)

    off_u = take(6 * npairs).reshape(n, 3, 2, npairs)
    p = _disc(off_u[:, 0, 0], off_u[:, 0, 1])
    q = _disc(off_u[:, 1, 0], off_u[:, 1, 1])
    s = _disc(off_u[:, 2, 0], off_u[:, 2, 1])
    coeff[:, iu, ju, 0, 0] = p
    coeff[:, iu, ju, 1, 1] = b_off - p
    coeff[:, iu, ju, 0, 1] = q
    coeff[:, iu, ju, 1, 0] = s
    coeff[:, ju, iu] = np.conj(np.swapaxes(coeff[:, iu, ju], -1, -2))
    return coeff, B


def sample_curvature(r: int, epsilon: float, seed: Seed) -> PointCurvature:
    """Draw one constraint-exact curvature sample, deterministic in seed.

    The seed may be an integer or a tuple of nonnegative integers; sweep
    drivers use (base_seed, config_index, sample_index) tuples so that any
    recorded sample can be reconstructed here.  Auxiliary randomness tied to
    a sample (optimizer starts, test vectors) is derived from the same seed
    through spawn keys, never from this stream.
    """
    if not isinstance(r, (int, np.integer)) or r < 2:
        raise InvalidInputError(f"rank must be an integer >= 2, got {r!r}")
    if not (np.isfinite(epsilon) and epsilon >= 0):
        raise InvalidInputError(f"epsilon must be finite and >= 0, got {epsilon}")
    _check_seed(seed)
    g = _generator(seed)
    uniforms = g.random((1, _coefficient_count(r)))
    coeff, B = build_batch(int(r), float(epsilon), uniforms)
    return PointCurvature(int(r), coeff[0], float(epsilon), B[0], seed)


def projectively_flat(r: int) -> PointCurvature:
    """The equality-case curvature (omega/r) * Id, with epsilon = 0."""
    if r < 2:
        raise InvalidInputError(f"rank must be at least 2, got {r}")
    coeff = np.zeros((r, r, 2, 2), dtype=np.complex128)
    diag = np.arange(r)
    coeff[diag, diag, 0, 0] = 1.0 / r
    coeff[diag, diag, 1, 1] = 1.0 / r
    return PointCurvature(r, coeff, 0.0, np.zeros((r, r), dtype=np.complex128))


def unitary_conjugate(pc: PointCurvature, U: np.ndarray) -> PointCurvature:
    """Change of frame by a unitary U: coeff -> U coeff U*, B -> U B U*.

    Preserves the Hermitian, trace, and contraction constraints exactly;
    the entrywise bound on B is not unitarily invariant and may be exceeded
    (reported by residuals(), not an error).
    """
    U = np.asarray(U, dtype=np.complex128)
    if U.shape != (pc.rank, pc.rank):
        raise InvalidInputError(f"U must be {pc.rank} x {pc.rank}")
    if np.abs(U.conj().T @ U - np.eye(pc.rank)).max() > VALIDATION_TOL:
        raise InvalidInputError("U is not unitary")
    coeff = np.einsum("ik,klab,jl->ijab", U, pc.coeff, np.conj(U))
    B = U @ pc.B @ U.conj().T
    return PointCurvature(pc.rank, coeff, pc.epsilon, B)


def chern_densities(pc: PointCurvature) -> tuple[float, float]:
    """Densities of c1^2 and c2 of the curvature against the volume form.

    c1 is the trace form (equal to omega under the constraints, so the first
    value is 2 up to residuals); c2 is half of (tr)^2 minus the trace of the
    matrix wedge square.
    """
    validate(pc)
    tr = np.einsum("iiab->ab", pc.coeff)
    c1sq = float(wedge_density(tr, tr).real)
    cross = (
        np.einsum("ij,ji->", pc.coeff[..., 0, 0], pc.coeff[..., 1, 1])
        + np.einsum("ij,ji->", pc.coeff[..., 1, 1], pc.coeff[..., 0, 0])
        - np.einsum("ij,ji->", pc.coeff[..., 0, 1], pc.coeff[..., 1, 0])
        - np.einsum("ij,ji->", pc.coeff[..., 1, 0], pc.coeff[..., 0, 1])
    )
    c2 = 0.5 * (c1sq - float(cross.real))
    return c1sq, c2


def c2_density_pairwise(pc: PointCurvature) -> float:
    """c2 density via the sum over index pairs i != j.

    Independent of chern_densities: expands c2 = sum_{i<j} of the wedge of
    the i and j diagonal entries minus the wedge of the (i,j) and (j,i)
    entries, with no reference to the trace form.
    """
    validate(pc)
    c = pc.coeff
    diag_i = np.einsum("iiab->iab", c)
    total = 0.0
    for i in range(pc.rank):
        for j in range(pc.rank):
            if i == j:
                continue
            total += float(wedge_density(diag_i[i], diag_i[j]).real)
            total -= float(wedge_density(c[i, j], c[j, i]).real)
    return 0.5 * total


def batch_lhs_density(coeff: np.ndarray) -> np.ndarray:
    """Per-sample density of c1^2 - (2r(r-1)/(r^2-2r+2)) c2 for a batch.

    coeff has shape (n, r, r, 2, 2); no validation is performed here, batch
    drivers check residuals separately.
    """
    r = coeff.shape[1]
    tr = np.einsum("niiab->nab", coeff)
    c1sq = wedge_density(tr, tr).real
    cross = (
        np.einsum("nij,nji->n", coeff[..., 0, 0], coeff[..., 1, 1])
        + np.einsum("nij,nji->n", coeff[..., 1, 1], coeff[..., 0, 0])
        - np.einsum("nij,nji->n", coeff[..., 0, 1], coeff[..., 1, 0])
        - np.einsum("nij,nji->n", coeff[..., 1, 0], coeff[..., 0, 1])
    ).real
    c2 = 0.5 * (c1sq - cross)
    return c1sq - lubke_constant(r) * c2


def lubke_constant(r: int) -> float:
    """Float value of the criterion coefficient 2r(r-1)/(r^2-2r+2)."""
    return 2.0 * r * (r - 1) / (r * r - 2 * r + 2)


def error_term_density(r: int, epsilon: float) -> float:
    """Density of the additive error (4r + r(r^2-1)eps) * eps / (4(r^2-2r+2)) * omega^2."""
    k = r * r - 2 * r + 2
    return (4.0 * r + r * (r * r - 1) * epsilon) * epsilon / (4.0 * k) * 2.0


@dataclass(frozen=True)
class PointwiseGapResult:
    """One evaluation of the curvature inequality at a vector v.

    lhs_density is c1^2 - (2r(r-1)/(r^2-2r+2)) c2; rhs_density is
    r^2/(r^2-2r+2) times the density of the squared normalized form
    <v, Theta v>/<v, v> plus the epsilon error term; gap = rhs - lhs, so the
    inequality asserts gap >= 0.
    """

    lhs_density: float
    rhs_density: float
    gap: float
    v: tuple[complex, ...]


def normalized_form(pc: PointCurvature, v: np.ndarray) -> np.ndarray:
    """Coefficient matrix of <v, Theta v> / <v, v>, a Hermitian 2x2 array."""
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (pc.rank,):
        raise InvalidInputError(f"v must be a vector of length {pc.rank}")
    nv = float(np.vdot(v, v).real)
    if nv == 0.0:
        raise InvalidInputError("v must be nonzero")
    return np.einsum("i,ijab,j->ab", np.conj(v), pc.coeff, v) / nv


def lhs_density(pc: PointCurvature) -> float:
    c1sq, c2 = chern_densities(pc)
    return c1sq - lubke_constant(pc.rank) * c2


def pointwise_gap(pc: PointCurvature, v: np.ndarray) -> PointwiseGapResult:
    """Evaluate the inequality at v; invariant under scaling of v."""
    q = normalized_form(pc, v)
    r = pc.rank
    k = r * r - 2 * r + 2
    rhs = (r * r / k) * float(wedge_density(q, q).real) + error_term_density(r, pc.epsilon)
    lhs = lhs_density(pc)
    v_arr = np.asarray(v, dtype=np.complex128)
    return PointwiseGapResult(lhs, rhs, rhs - lhs, tuple(complex(x) for x in v_arr))


def lagrange_max(r: int, mu: float, B_diag: Sequence[float]) -> float:
    """Closed-form maximum of f(x) = sum_{i>=2} x_i (2/r + B_i - x_i)
    over the hyperplane sum_{i>=2} x_i = 1 - mu.

    B_diag is the full real diagonal (B_1, ..., B_r) and must sum to zero;
    the maximizer is x_i = (1-mu)/(r-1) + B_1/(2(r-1)) + B_i/2.
    """
    if r < 2:
        raise InvalidInputError(f"need r >= 2, got {r}")
    b = np.asarray(B_diag, dtype=float)
    if b.shape != (r,):
        raise InvalidInputError(f"B_diag must have length {r}")
    if abs(float(b.sum())) > VALIDATION_TOL:
        raise InvalidInputError(f"B_diag must sum to zero, got {b.sum():.3e}")
    x = (1.0 - mu) / (r - 1) + b[0] / (2.0 * (r - 1)) + b[1:] / 2.0
    return float(np.sum(x * (2.0 / r + b[1:] - x)))


def lagrange_max_numeric(
    r: int,
    mu: float,
    B_diag: Sequence[float],
    iterations: int = 80,
    step: float = 0.4,
) -> float:
    """Iterative check of lagrange_max: projected gradient ascent on the
    constraint hyperplane from the equal-split point.

    The fixed step keeps the iteration a strict contraction (factor
    |1 - 2*step|) instead of a one-shot Newton solve, so agreement with the
    closed form is a genuine cross-check.
    """
    if r < 2:
        raise InvalidInputError(f"need r >= 2, got {r}")
    if not 0.0 < step < 1.0:
        raise InvalidInputError(f"step must lie in (0, 1), got {step}")
    b = np.asarray(B_diag, dtype=float)
    if b.shape != (r,):
        raise InvalidInputError(f"B_diag must have length {r}")
    x = np.full(r - 1, (1.0 - mu) / (r - 1))
    for _ in range(iterations):
        grad = 2.0 / r + b[1:] - 2.0 * x
        grad -= grad.mean()
        x = x + step * grad
    return float(np.sum(x * (2.0 / r + b[1:] - x)))
