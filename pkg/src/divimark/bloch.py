"""Bloch-vector calculus for qubit states, effects, and affine maps.

States live on ``(1, x, y, z)`` with ``||r|| <= 1``; effects on
``(a0, alpha)`` with ``0 <= a0 <= 2`` and ``||alpha|| <= min(a0, 2 - a0)``.
A trace-preserving qubit map is the 4x4 real matrix

    M = [[1, 0, 0, 0],
         [v,   Lambda ]]

acting on state 4-vectors; its Heisenberg dual acts on effect 4-vectors as
``M.T``, which realizes the pairing tr(E Phi[rho]) = tr(Phi*[E] rho).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import smallmat
from .errors import ValidationError
from .tolerances import TOLS


# --- states and effects ----------------------------------------------------

def state_bloch(x: float, y: float, z: float) -> np.ndarray:
    r4 = np.array([1.0, x, y, z])
    check_state(r4)
    return r4


def check_state(r4: np.ndarray, tol: float = TOLS.bloch_norm) -> np.ndarray:
    r4 = np.asarray(r4, dtype=float)
    if r4.shape != (4,):
        raise ValidationError(f"state 4-vector expected, got shape {r4.shape}")
    if abs(r4[0] - 1.0) > tol:
        raise ValidationError(f"state leading component must be 1, got {r4[0]!r}")
    n = np.linalg.norm(r4[1:])
    if n > 1.0 + tol:
        raise ValidationError(f"Bloch vector norm {n} exceeds 1")
    return r4


def effect_bloch(a0: float, ax: float, ay: float, az: float) -> np.ndarray:
    a4 = np.array([a0, ax, ay, az], dtype=float)
    check_effect(a4)
    return a4


def check_effect(a4: np.ndarray, tol: float = TOLS.bloch_norm) -> np.ndarray:
    a4 = np.asarray(a4, dtype=float)
    if a4.shape != (4,):
        raise ValidationError(f"effect 4-vector expected, got shape {a4.shape}")
    a0 = a4[0]
    if a0 < -tol or a0 > 2.0 + tol:
        raise ValidationError(f"effect bias a0={a0} outside [0, 2]")
    n = np.linalg.norm(a4[1:])
    if n > min(a0, 2.0 - a0) + tol:
        raise ValidationError(f"effect vector norm {n} exceeds min(a0, 2-a0)={min(a0, 2 - a0)}")
    return a4


def state_matrix(r4: np.ndarray) -> np.ndarray:
    """Density matrix of a state 4-vector."""
    check_state(r4)
    return smallmat.bloch4_to_matrix(r4)


def state_from_matrix(rho: np.ndarray, tol: float = TOLS.state_psd) -> np.ndarray:
    """Bloch 4-vector of a density matrix (unit trace, PSD within ``tol``)."""
    m = smallmat.check_hermitian(rho)
    if m.shape != (2, 2):
        raise ValidationError("density matrix must be 2x2")
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"density matrix trace {tr} != 1")
    if smallmat.herm_eigvals(m)[0] < -tol:
        raise ValidationError("density matrix has a negative eigenvalue")
    r4 = smallmat.matrix_to_bloch4(m)
    r4[0] = 1.0
    return r4


def effect_matrix(a4: np.ndarray) -> np.ndarray:
    """Effect operator (1/2)(a0*I + alpha.sigma) of an effect 4-vector."""
    check_effect(a4)
    return smallmat.bloch4_to_matrix(a4)


def effect_from_matrix(e: np.ndarray, tol: float = TOLS.effect_bounds) -> np.ndarray:
    """Bloch 4-vector of an effect matrix (0 <= E <= I within ``tol``)."""
    m = smallmat.check_hermitian(e)
    if m.shape != (2, 2):
        raise ValidationError("effect matrix must be 2x2")
    vals = smallmat.herm_eigvals(m)
    if vals[0] < -tol or vals[-1] > 1.0 + tol:
        raise ValidationError(f"effect eigenvalues {vals} outside [0, 1]")
    return smallmat.matrix_to_bloch4(m)


# --- affine maps -------------------------------------------------------------

@dataclass(frozen=True)
class BlochAffine:
    """Affine Bloch form of a trace-preserving qubit map: r -> lam @ r + v."""

    v: np.ndarray
    lam: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float).reshape(3)
        lam = np.asarray(self.lam, dtype=float).reshape(3, 3)
        if not (np.all(np.isfinite(v)) and np.all(np.isfinite(lam))):
            raise ValidationError("affine map contains non-finite entries")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "lam", lam)

    def matrix(self) -> np.ndarray:
        m = np.zeros((4, 4))
        m[0, 0] = 1.0
        m[1:, 0] = self.v
        m[1:, 1:] = self.lam
        return m

    @staticmethod
    def from_matrix(m4: np.ndarray, tol: float = TOLS.roundtrip) -> "BlochAffine":
        m4 = np.asarray(m4, dtype=float)
        if m4.shape != (4, 4):
            raise ValidationError(f"expected 4x4 matrix, got {m4.shape}")
        if abs(m4[0, 0] - 1.0) > tol or np.max(np.abs(m4[0, 1:])) > tol:
            raise ValidationError("first row must be (1, 0, 0, 0)")
        return BlochAffine(v=m4[1:, 0], lam=m4[1:, 1:])

    @staticmethod
    def identity() -> "BlochAffine":
        return BlochAffine(v=np.zeros(3), lam=np.eye(3))

    def compose(self, other: "BlochAffine") -> "BlochAffine":
        """Map equal to applying ``other`` first, then ``self``."""
        return BlochAffine(v=self.v + self.lam @ other.v, lam=self.lam @ other.lam)


def apply_map(m4: np.ndarray, x4: np.ndarray) -> np.ndarray:
    """Schrodinger action on a Bloch 4-vector (leading component preserved)."""
    return np.asarray(m4, dtype=float) @ np.asarray(x4, dtype=float)


def dual_map(m4: np.ndarray) -> np.ndarray:
    """Heisenberg (dual) form of an affine map matrix: the transpose."""
    return np.asarray(m4, dtype=float).T.copy()


# --- positivity surrogate -----------------------------------------------------

def fibonacci_sphere(n: int) -> np.ndarray:
    """n near-uniform unit vectors from the Fibonacci lattice."""
    i = np.arange(n)
    z = 1.0 - 2.0 * (i + 0.5) / n
    phi = i * np.pi * (3.0 - np.sqrt(5.0))
    s = np.sqrt(1.0 - z * z)
    return np.column_stack([s * np.cos(phi), s * np.sin(phi), z])


def _refine_direction(lam, v, starts, steps=20):
    """Ascent of ||lam r + v||^2 over unit vectors.

    Each step moves to the unit vector maximizing the linearization (the
    normalized gradient), which is monotone for this convex objective and
    converges geometrically to a local maximum.
    """
    r = starts / np.linalg.norm(starts, axis=-1, keepdims=True)
    best = np.linalg.norm(r @ lam.T + v, axis=-1)
    best_r = r.copy()
    for _ in range(steps):
        grad = 2.0 * (r @ lam.T + v) @ lam
        gnorm = np.linalg.norm(grad, axis=-1, keepdims=True)
        r = np.where(gnorm > 1e-14, grad / np.maximum(gnorm, 1e-300), r)
        val = np.linalg.norm(r @ lam.T + v, axis=-1)
        improved = val > best
        best = np.where(improved, val, best)
        best_r[improved] = r[improved]
    return best, best_r


def ball_image_max(lam: np.ndarray, v: np.ndarray, n: int = 10_000,
                   refine_steps: int = 20, n_refine: int = 5):
    """Largest ||lam r + v|| over unit Bloch vectors r.

    Deterministic low-discrepancy sampling plus local ascent from the best
    samples; the map is positive iff the result is <= 1 (within
    ``TOLS.ball_excess``).  Returns ``(max_norm, argmax_direction)``.
    """
    lam = np.asarray(lam, dtype=float)
    v = np.asarray(v, dtype=float)
    pts = fibonacci_sphere(n)
    norms = np.linalg.norm(pts @ lam.T + v, axis=1)
    top = np.argsort(norms)[-n_refine:]
    vals, dirs = _refine_direction(lam, v, pts[top], steps=refine_steps)
    k = int(np.argmax(vals))
    return float(vals[k]), dirs[k]


def is_positive_map(m: "BlochAffine | np.ndarray", tol: float = TOLS.ball_excess,
                    n: int = 10_000) -> bool:
    """Whether the affine map sends the closed Bloch ball into itself."""
    if isinstance(m, BlochAffine):
        lam, v = m.lam, m.v
    else:
        aff = BlochAffine.from_matrix(m)
        lam, v = aff.lam, aff.v
    val, _ = ball_image_max(lam, v, n=n)
    return val <= 1.0 + tol
