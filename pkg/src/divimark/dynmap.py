"""Trajectories of qubit dynamical maps, time-local generators, two-time
propagators, and divisibility verdicts in the Schrodinger and the Heisenberg
picture.

A trajectory stores the affine Bloch matrices ``M(t_k)`` of the map on a
uniform time grid (optionally with analytic time derivatives supplied by the
model).  The left and right generators are

    L(t) = dM/dt  M^{-1}          R(t) = M^{-1}  dM/dt

and their Heisenberg counterparts are the transposes.  Divisibility of the
evolution from ``s`` to ``t >= s`` is carried by the left propagator
``M(t) M(s)^{-1}`` in the Schrodinger picture and by the right propagator
``M(s)^{-1} M(t)`` in the Heisenberg picture; complete positivity is decided
on the Choi matrix of each consecutive-step propagator, plain positivity
either through the symmetrized generator form (unital maps) or through the
Bloch-ball image surrogate (general maps).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import bloch, smallmat
from .errors import GridAlignmentError, SingularMapError, ValidationError
from .rng import Xorshift64Star, haar_basis
from .tolerances import TOLS

DEFAULT_T_END = 10.0
DEFAULT_STEPS = 2001

_PICTURES = ("schrodinger", "heisenberg")
_ALIASES = {"s": "schrodinger", "h": "heisenberg"}


def canonical_picture(picture: str) -> str:
    p = _ALIASES.get(picture.lower(), picture.lower())
    if p not in _PICTURES:
        raise ValidationError(f"unknown picture {picture!r}")
    return p


@dataclass(frozen=True)
class MapTrajectory:
    """Uniformly sampled dynamical map, starting from the identity."""

    times: np.ndarray                  # (T,)
    mats: np.ndarray                   # (T, 4, 4) affine Bloch matrices
    dmats: np.ndarray | None = None    # optional analytic d/dt of mats
    breakpoints: tuple = ()            # kink times; must lie on the grid

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        mats = np.asarray(self.mats, dtype=float)
        if times.ndim != 1 or len(times) < 2:
            raise ValidationError("need at least two grid times")
        if mats.shape != (len(times), 4, 4):
            raise ValidationError(f"sample shape {mats.shape} does not match grid")
        steps = np.diff(times)
        if np.any(steps <= 0):
            raise ValidationError("grid times must be strictly increasing")
        if np.max(np.abs(steps - steps[0])) > TOLS.grid_uniform * max(1.0, times[-1]):
            raise ValidationError("grid spacing is not uniform")
        if np.max(np.abs(mats[0] - np.eye(4))) > TOLS.roundtrip:
            raise ValidationError("trajectory must start at the identity map")
        if np.max(np.abs(mats[:, 0, 0] - 1.0)) > TOLS.roundtrip or \
                np.max(np.abs(mats[:, 0, 1:])) > TOLS.roundtrip:
            raise ValidationError("each sample must have first row (1, 0, 0, 0)")
        for b in self.breakpoints:
            k = int(round((b - times[0]) / steps[0]))
            if k < 0 or k >= len(times) or abs(times[k] - b) > TOLS.grid_align:
                raise GridAlignmentError(
                    f"breakpoint t={b} does not lie on the grid (step {steps[0]:.3g})")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "mats", mats)
        if self.dmats is not None:
            dm = np.asarray(self.dmats, dtype=float)
            if dm.shape != mats.shape:
                raise ValidationError("derivative samples must match the grid")
            object.__setattr__(self, "dmats", dm)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def index_of(self, t: float) -> int:
        k = int(round((t - self.times[0]) / self.dt))
        if k < 0 or k >= len(self.times) or abs(self.times[k] - t) > TOLS.grid_align:
            raise ValidationError(f"t={t} is not a grid time")
        return k


@dataclass(frozen=True)
class GeneratorSample:
    """Bloch matrix of a time-local generator at one grid time.

    ``side`` names the generator family: 'left' for L and its Heisenberg dual
    L*, 'right' for R and R*.  Note the role swap under duality: in the
    Heisenberg picture the evolution between intermediate times is generated
    by R*, not by L*.
    """

    time: float
    matrix: np.ndarray
    picture: str
    side: str


@dataclass(frozen=True)
class DivisibilityVerdict:
    picture: str
    criterion: str                      # 'P' or 'CP'
    divisible: bool
    first_violation_time: float | None
    worst_value: float


# --- derivatives -------------------------------------------------------------

def derivative_matrices(traj: MapTrajectory) -> np.ndarray:
    """dM/dt on the grid: analytic samples when the model supplied them,
    otherwise second-order finite differences whose stencils never straddle a
    breakpoint (the breakpoint itself takes the forward-looking stencil)."""
    if traj.dmats is not None:
        return traj.dmats
    m = traj.mats
    dt = traj.dt
    out = np.empty_like(m)
    cut = sorted({0, len(traj.times) - 1}
                 | {traj.index_of(b) for b in traj.breakpoints})
    seg_edges = [0] + [c for c in cut if 0 < c < len(traj.times) - 1] + [len(traj.times) - 1]
    for lo, hi in zip(seg_edges[:-1], seg_edges[1:]):
        # interior of [lo, hi]: central differences
        if hi - lo >= 2:
            out[lo + 1:hi] = (m[lo + 2:hi + 1] - m[lo:hi - 1]) / (2.0 * dt)
        # one-sided second-order stencils at the segment edges
        out[lo] = (-3.0 * m[lo] + 4.0 * m[lo + 1] - m[lo + 2]) / (2.0 * dt) \
            if hi - lo >= 2 else (m[hi] - m[lo]) / dt
        if hi == len(traj.times) - 1:
            out[hi] = (3.0 * m[hi] - 4.0 * m[hi - 1] + m[hi - 2]) / (2.0 * dt) \
                if hi - lo >= 2 else (m[hi] - m[lo]) / dt
    return out


def _inverse(m4: np.ndarray, time: float) -> np.ndarray:
    det = float(np.linalg.det(m4[1:, 1:]))
    if abs(det) <= TOLS.det_min:
        raise SingularMapError(time, det)
    return np.linalg.inv(m4)


def _all_inverses(traj: MapTrajectory) -> np.ndarray:
    dets = np.linalg.det(traj.mats[:, 1:, 1:])
    bad = np.nonzero(np.abs(dets) <= TOLS.det_min)[0]
    if bad.size:
        k = int(bad[0])
        raise SingularMapError(float(traj.times[k]), float(dets[k]))
    return np.linalg.inv(traj.mats)


# --- generators ----------------------------------------------------------------

def left_generator(traj: MapTrajectory, t: float) -> GeneratorSample:
    """L(t) = dM/dt M^{-1} in Bloch form (trace-annihilating: first row 0)."""
    k = traj.index_of(t)
    dm = derivative_matrices(traj)[k]
    inv = _inverse(traj.mats[k], t)
    return GeneratorSample(time=t, matrix=dm @ inv, picture="schrodinger", side="left")


def right_generator(traj: MapTrajectory, t: float) -> GeneratorSample:
    """R(t) = M^{-1} dM/dt in Bloch form."""
    k = traj.index_of(t)
    dm = derivative_matrices(traj)[k]
    inv = _inverse(traj.mats[k], t)
    return GeneratorSample(time=t, matrix=inv @ dm, picture="schrodinger", side="right")


def heisenberg_generators(traj: MapTrajectory, t: float):
    """Dual generators (L*, R*) as transposes of the Schrodinger matrices.

    L* generates the Heisenberg right master equation, R* the left one; the
    evolution of an effect between intermediate times is driven by R*.
    """
    gl = left_generator(traj, t)
    gr = right_generator(traj, t)
    return (
        GeneratorSample(time=t, matrix=gl.matrix.T.copy(), picture="heisenberg", side="left"),
        GeneratorSample(time=t, matrix=gr.matrix.T.copy(), picture="heisenberg", side="right"),
    )


def commutativity_defect(traj: MapTrajectory, t: float, t_prime: float) -> float:
    """Max-entry norm of [L(t), L(t')]; zero means left = right generator."""
    a = left_generator(traj, t).matrix
    b = left_generator(traj, t_prime).matrix
    return float(np.max(np.abs(a @ b - b @ a)))


# --- propagators -----------------------------------------------------------------

def propagator(traj: MapTrajectory, s: float, t: float, side: str = "left") -> bloch.BlochAffine:
    """Two-time propagator between grid times ``s <= t``.

    side='left':  M(t) M(s)^{-1}   (state evolution from s to t)
    side='right': M(s)^{-1} M(t)   (its Heisenberg-dual drives effects)
    """
    if t < s:
        raise ValidationError("need s <= t")
    ks, kt = traj.index_of(s), traj.index_of(t)
    inv_s = _inverse(traj.mats[ks], s)
    if side == "left":
        m = traj.mats[kt] @ inv_s
    elif side == "right":
        m = inv_s @ traj.mats[kt]
    else:
        raise ValidationError(f"unknown side {side!r}")
    return bloch.BlochAffine.from_matrix(m, tol=1e-9)


def _step_propagators(traj: MapTrajectory, side: str) -> np.ndarray:
    inv = _all_inverses(traj)
    if side == "left":
        return np.matmul(traj.mats[1:], inv[:-1])
    return np.matmul(inv[:-1], traj.mats[1:])


# --- divisibility ---------------------------------------------------------------

def cp_divisibility(traj: MapTrajectory, picture: str,
                    tol: float = TOLS.verdict) -> DivisibilityVerdict:
    """CP-divisibility verdict from the Choi matrices of the consecutive-step
    propagators (left propagators for the Schrodinger picture, right for the
    Heisenberg one)."""
    picture = canonical_picture(picture)
    side = "left" if picture == "schrodinger" else "right"
    props = _step_propagators(traj, side)
    worst = np.inf
    first: float | None = None
    for k, prop in enumerate(props):
        low = float(smallmat.herm_eigvals(smallmat.choi_from_bloch(prop))[0])
        if low < worst:
            worst = low
        if first is None and low < -tol:
            first = float(traj.times[k])
    return DivisibilityVerdict(picture=picture, criterion="CP",
                               divisible=first is None,
                               first_violation_time=first, worst_value=worst)


def _is_unital(traj: MapTrajectory) -> bool:
    return float(np.max(np.abs(traj.mats[:, 1:, 0]))) <= TOLS.roundtrip


def p_divisibility(traj: MapTrajectory, picture: str,
                   tol: float = TOLS.verdict, n_sphere: int = 10_000) -> DivisibilityVerdict:
    """P-divisibility verdict.

    Unital trajectories: largest eigenvalue over the grid of the symmetric
    form ``X_S = dLam Lam^{-1} + (dLam Lam^{-1})^T`` (Schrodinger) or
    ``X_H = Lam^{-1} dLam + (Lam^{-1} dLam)^T`` (Heisenberg); divisible iff
    it stays <= tol.  Non-unital trajectories: Bloch-ball image surrogate on
    every consecutive-step propagator; divisible iff the largest image norm
    stays <= 1 + tol.
    """
    picture = canonical_picture(picture)
    if _is_unital(traj):
        dmats = derivative_matrices(traj)
        lam = traj.mats[:, 1:, 1:]
        dlam = dmats[:, 1:, 1:]
        dets = np.linalg.det(lam)
        bad = np.nonzero(np.abs(dets) <= TOLS.det_min)[0]
        if bad.size:
            k = int(bad[0])
            raise SingularMapError(float(traj.times[k]), float(dets[k]))
        inv = np.linalg.inv(lam)
        half = np.matmul(dlam, inv) if picture == "schrodinger" else np.matmul(inv, dlam)
        worst = -np.inf
        first: float | None = None
        for k in range(len(traj.times)):
            x = half[k] + half[k].T
            top = float(smallmat.sym_eigvals(x)[-1])
            if top > worst:
                worst = top
            if first is None and top > tol:
                first = float(traj.times[k])
        return DivisibilityVerdict(picture=picture, criterion="P",
                                   divisible=first is None,
                                   first_violation_time=first, worst_value=worst)

    side = "left" if picture == "schrodinger" else "right"
    props = _step_propagators(traj, side)
    pts = bloch.fibonacci_sphere(n_sphere)
    lams = props[:, 1:, 1:]
    vs = props[:, 1:, 0]
    norms = np.linalg.norm(np.einsum("kij,nj->kni", lams, pts) + vs[:, None, :], axis=2)
    top_idx = np.argsort(norms, axis=1)[:, -5:]
    worst = -np.inf
    first: float | None = None
    for k in range(props.shape[0]):
        val, _ = bloch._refine_direction(lams[k], vs[k], pts[top_idx[k]])
        top = float(np.max(val))
        if top > worst:
            worst = top
        if first is None and top > 1.0 + tol:
            first = float(traj.times[k])
    return DivisibilityVerdict(picture=picture, criterion="P",
                               divisible=first is None,
                               first_violation_time=first, worst_value=worst)


def kossakowski_p_check(rate_ops, n_bases: int = 200, rng: Xorshift64Star | None = None,
                        tol: float = TOLS.verdict):
    """Sampled positivity check of sum_a gamma_a |<phi_mu|L_a|phi_mu'>|^2.

    Scans ``n_bases`` Haar-random qubit bases and both ordered pairs
    mu != mu'.  A negative minimum refutes P-divisibility of the generator;
    a nonnegative one certifies it only up to the sampling density.
    Returns ``(passes, min_value)``.
    """
    rng = rng or Xorshift64Star(0x5EED)
    worst = np.inf
    for _ in range(n_bases):
        phi0, phi1 = haar_basis(rng)
        for bra, ket in ((phi0, phi1), (phi1, phi0)):
            val = 0.0
            for gamma, op in rate_ops:
                amp = np.vdot(bra, np.asarray(op, dtype=complex) @ ket)
                val += gamma * float(abs(amp) ** 2)
            worst = min(worst, val)
    return worst >= -tol, float(worst)
