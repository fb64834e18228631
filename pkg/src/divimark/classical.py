"""Classical 2-state stochastic dynamics.

The map is the column-stochastic matrix

    S(t) = [[a(t), 1 - b(t)],
            [1 - a(t), b(t)]]

with S(0) = I.  Its left and right generators L = dS S^{-1} and
R = S^{-1} dS have zero column sums and off-diagonal entries

    l1 = (-w - db) / (a + b - 1)      r1 = -da / (a + b - 1)
    l2 = ( w - da) / (a + b - 1)      r2 = -db / (a + b - 1)

with w = da b - a db.  Nonnegative l_k make the evolution divisible in the
Schrodinger picture (Kolmogorov conditions on L); nonnegative r_k make it
divisible in the Heisenberg picture.  Nonnegative r_k imply nonnegative l_k
for this system, so Heisenberg divisibility is the stronger property.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynmap import DEFAULT_STEPS, DEFAULT_T_END, DivisibilityVerdict, canonical_picture
from .errors import SingularMapError, ValidationError
from .models import TimeFunction, const, exp_decay
from .rng import Xorshift64Star
from .tolerances import TOLS

_SIDES = {"left": "schrodinger", "right": "heisenberg",
          "schrodinger": "schrodinger", "heisenberg": "heisenberg",
          "s": "schrodinger", "h": "heisenberg"}


def _canonical_side(side: str) -> str:
    try:
        return "left" if _SIDES[side.lower()] == "schrodinger" else "right"
    except KeyError:
        raise ValidationError(f"unknown side {side!r}") from None


@dataclass(frozen=True)
class ClassicalRates:
    l1: np.ndarray
    l2: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    w: np.ndarray


@dataclass(frozen=True)
class ClassicalModel:
    a: TimeFunction
    b: TimeFunction

    @staticmethod
    def scenario_ab1() -> "ClassicalModel":
        """a = (1 + e^{-t})/2, b = (1 + e^{-2t})/2: divisible on both sides."""
        return ClassicalModel(
            a=TimeFunction(lambda t: 0.5 * (1.0 + np.exp(-t)),
                           lambda t: -0.5 * np.exp(-t), label="ab1.a"),
            b=TimeFunction(lambda t: 0.5 * (1.0 + np.exp(-2.0 * t)),
                           lambda t: -np.exp(-2.0 * t), label="ab1.b"))

    @staticmethod
    def scenario_ab2() -> "ClassicalModel":
        """a = (3 + e^{-t})/4, b = (1 + 3 e^{-2t} cos t)/4: Schrodinger
        divisible, Heisenberg indivisible."""
        return ClassicalModel(
            a=TimeFunction(lambda t: 0.25 * (3.0 + np.exp(-t)),
                           lambda t: -0.25 * np.exp(-t), label="ab2.a"),
            b=TimeFunction(lambda t: 0.25 * (1.0 + 3.0 * np.exp(-2.0 * t) * np.cos(t)),
                           lambda t: -0.75 * np.exp(-2.0 * t) * (2.0 * np.cos(t) + np.sin(t)),
                           label="ab2.b"))

    def _det(self, t):
        det = self.a(t) + self.b(t) - 1.0
        bad = np.nonzero(np.atleast_1d(np.abs(det)) <= TOLS.det_min)[0]
        if bad.size:
            tt = np.atleast_1d(np.asarray(t, dtype=float))
            raise SingularMapError(float(tt[bad[0]]), float(np.atleast_1d(det)[bad[0]]))
        return det

    def s_matrix(self, t: float) -> np.ndarray:
        a, b = float(self.a(t)), float(self.b(t))
        if not (-TOLS.bloch_norm <= a <= 1 + TOLS.bloch_norm
                and -TOLS.bloch_norm <= b <= 1 + TOLS.bloch_norm):
            raise ValidationError(f"a(t), b(t) must lie in [0, 1]; got {a}, {b} at t={t}")
        return np.array([[a, 1.0 - b], [1.0 - a, b]])

    def s_dot(self, t: float) -> np.ndarray:
        da, db = float(self.a.deriv(t)), float(self.b.deriv(t))
        return np.array([[da, -db], [-da, db]])

    def rates(self, t) -> ClassicalRates:
        t = np.asarray(t, dtype=float)
        den = self._det(t)
        a, b = self.a(t), self.b(t)
        da, db = self.a.deriv(t), self.b.deriv(t)
        w = da * b - a * db
        return ClassicalRates(l1=(-w - db) / den, l2=(w - da) / den,
                              r1=-da / den, r2=-db / den, w=w)

    def generator(self, t: float, side: str = "left") -> np.ndarray:
        r = self.rates(t)
        if _canonical_side(side) == "left":
            k1, k2 = float(r.l1), float(r.l2)
        else:
            k1, k2 = float(r.r1), float(r.r2)
        return np.array([[-k1, k2], [k1, -k2]])

    def divisibility(self, side: str, t0: float = 0.0, t_end: float = DEFAULT_T_END,
                     steps: int = DEFAULT_STEPS, tol: float = TOLS.verdict) -> DivisibilityVerdict:
        """Sign check of the off-diagonal generator entries over the grid."""
        side = _canonical_side(side)
        times = np.linspace(t0, t_end, steps)
        r = self.rates(times)
        pair = (r.l1, r.l2) if side == "left" else (r.r1, r.r2)
        stacked = np.minimum(pair[0], pair[1])
        worst = float(np.min(stacked))
        bad = np.nonzero(stacked < -tol)[0]
        first = float(times[bad[0]]) if bad.size else None
        return DivisibilityVerdict(
            picture="schrodinger" if side == "left" else "heisenberg",
            criterion="P", divisible=first is None,
            first_violation_time=first, worst_value=worst)

    def norm_monotonicity(self, side: str, x, t0: float = 0.0,
                          t_end: float = DEFAULT_T_END, steps: int = DEFAULT_STEPS):
        """Discrete derivative of ||S x||_1 (left) or ||S^T x||_inf (right).

        Nonpositive derivatives everywhere witness divisibility on that side.
        Returns (times of the increments, derivative values).
        """
        side = _canonical_side(side)
        times = np.linspace(t0, t_end, steps)
        self._det(times)
        a, b = self.a(times), self.b(times)
        x = np.asarray(x, dtype=float)
        y0 = a * x[0] + (1.0 - b) * x[1]
        y1 = (1.0 - a) * x[0] + b * x[1]
        if side == "left":
            curve = np.abs(y0) + np.abs(y1)
        else:
            z0 = a * x[0] + (1.0 - a) * x[1]
            z1 = (1.0 - b) * x[0] + b * x[1]
            curve = np.maximum(np.abs(z0), np.abs(z1))
        dt = times[1] - times[0]
        return times[:-1], np.diff(curve) / dt

    def implication_check(self, t0: float = 0.0, t_end: float = DEFAULT_T_END,
                          steps: int = DEFAULT_STEPS, tol: float = TOLS.ball_excess) -> bool:
        """If the right rates are nonnegative on the grid, assert the left
        ones are too; vacuously true otherwise."""
        times = np.linspace(t0, t_end, steps)
        r = self.rates(times)
        if min(np.min(r.r1), np.min(r.r2)) < -tol:
            return True
        return bool(min(np.min(r.l1), np.min(r.l2)) >= -tol)


def random_heisenberg_divisible_model(rng: Xorshift64Star) -> ClassicalModel:
    """Random smooth monotone (a, b) with nonnegative right rates.

    Half the draws keep a + b > 1 with both functions decreasing, the other
    half keep a + b < 1 with both increasing; either way r_k >= 0 by
    construction.
    """
    if rng.random() < 0.5:
        a_inf = rng.uniform(0.55, 0.85)
        b_inf = rng.uniform(0.55, 0.85)
        a0 = rng.uniform(a_inf, 1.0)
        b0 = rng.uniform(b_inf, 1.0)
    else:
        a_inf = rng.uniform(0.15, 0.45)
        b_inf = rng.uniform(0.15, 0.45)
        a0 = rng.uniform(0.0, a_inf)
        b0 = rng.uniform(0.0, b_inf)
    ka = rng.uniform(0.3, 3.0)
    kb = rng.uniform(0.3, 3.0)

    def make(asym, start, k, label):
        return TimeFunction(lambda t: asym + (start - asym) * np.exp(-k * t),
                            lambda t: -k * (start - asym) * np.exp(-k * t),
                            label=label)

    return ClassicalModel(a=make(a_inf, a0, ka, "rand.a"), b=make(b_inf, b0, kb, "rand.b"))
