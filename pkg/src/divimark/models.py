"""Built-in qubit dynamics.

Two families are provided:

* phase-covariant maps, ``Lambda = diag(lam, lam, lam_z)`` with a bias
  ``v = (0, 0, lam_T)`` along z, including the stock parameter set whose
  left rates stay positive while the right rates do not;
* dephasing followed by a rotation, ``Lambda = O D`` (variant 1) or
  ``Lambda = D O^T`` (variant 2) with ``D = diag(lam, lam, 1)`` frozen after
  the switch time and ``O`` a rotation about x that only starts there.

Model parameters are time functions carrying their analytic first
derivative, so trajectories come with exact derivative samples; finite
differences remain available by request for convergence checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bloch import BlochAffine
from .dynmap import DEFAULT_STEPS, DEFAULT_T_END, MapTrajectory
from .errors import ModelError, ValidationError
from .tolerances import TOLS

L_X = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])


@dataclass(frozen=True)
class TimeFunction:
    """Scalar function of time with analytic derivative and known kinks."""

    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    breakpoints: tuple = ()
    label: str = ""

    def __call__(self, t):
        return np.asarray(self.f(np.asarray(t, dtype=float)), dtype=float)

    def deriv(self, t):
        return np.asarray(self.df(np.asarray(t, dtype=float)), dtype=float)


# --- named builders (also the vocabulary of the CLI config format) ----------

def exp_decay(rate: float = 1.0, scale: float = 1.0) -> TimeFunction:
    return TimeFunction(lambda t: scale * np.exp(-rate * t),
                        lambda t: -rate * scale * np.exp(-rate * t),
                        label=f"exp_decay(rate={rate},scale={scale})")


def half_sine(freq: float = 1.0, amp: float = 0.5) -> TimeFunction:
    return TimeFunction(lambda t: amp * np.sin(freq * t),
                        lambda t: amp * freq * np.cos(freq * t),
                        label=f"half_sine(freq={freq},amp={amp})")


def const(value: float = 1.0) -> TimeFunction:
    return TimeFunction(lambda t: np.full_like(t, float(value)),
                        lambda t: np.zeros_like(t),
                        label=f"const(value={value})")


def cos_plateau(t_knee: float = 1.0, floor: float = 0.5) -> TimeFunction:
    """Smooth decay from 1 to ``floor`` over [0, t_knee], constant after."""
    amp = 1.0 - floor

    def f(t):
        return np.where(t < t_knee, floor + amp * 0.5 * (1.0 + np.cos(np.pi * t / t_knee)),
                        floor)

    def df(t):
        return np.where(t < t_knee, -amp * 0.5 * np.pi / t_knee * np.sin(np.pi * t / t_knee),
                        0.0)

    return TimeFunction(f, df, breakpoints=(t_knee,),
                        label=f"cos_plateau(t_knee={t_knee},floor={floor})")


def rot_saturate(t_knee: float = 1.0, rate: float = 3.0,
                 angle: float = math.pi / 2) -> TimeFunction:
    """Zero before ``t_knee``, then ``angle (1 - exp(-rate (t - t_knee)))``.

    At the knee the right derivative is ``angle * rate``; trajectory grids
    must therefore contain the knee, and the derivative there is the
    forward-looking one.
    """

    def f(t):
        return np.where(t >= t_knee, angle * (1.0 - np.exp(-rate * (t - t_knee))), 0.0)

    def df(t):
        return np.where(t >= t_knee, angle * rate * np.exp(-rate * (t - t_knee)), 0.0)

    return TimeFunction(f, df, breakpoints=(t_knee,),
                        label=f"rot_saturate(t_knee={t_knee},rate={rate},angle={angle})")


def poly(*coeffs: float) -> TimeFunction:
    cs = np.asarray(coeffs if coeffs else (0.0,), dtype=float)
    dcs = cs[1:] * np.arange(1, len(cs))

    def f(t):
        return sum(c * t ** k for k, c in enumerate(cs))

    def df(t):
        return sum(c * t ** k for k, c in enumerate(dcs)) if len(dcs) else np.zeros_like(t)

    return TimeFunction(f, df, label="poly(" + ",".join(map(str, cs)) + ")")


def spline(ts, vs) -> TimeFunction:
    """Natural cubic through the given knots (piecewise-cubic table)."""
    from scipy.interpolate import CubicSpline

    cs = CubicSpline(np.asarray(ts, dtype=float), np.asarray(vs, dtype=float),
                     bc_type="natural")
    dcs = cs.derivative()
    return TimeFunction(lambda t: cs(t), lambda t: dcs(t),
                        label="spline")


TIME_FUNCTIONS = {
    "exp_decay": exp_decay,
    "half_sine": half_sine,
    "const": const,
    "cos_plateau": cos_plateau,
    "rot_saturate": rot_saturate,
    "poly": poly,
    "spline": spline,
}


# --- phase covariant dynamics -------------------------------------------------

@dataclass(frozen=True)
class PhaseCovariantParams:
    """Phase-covariant qubit dynamics (lam_T, lam, lam_z).

    Admissibility at every sampled time: |lam_T| + |lam_z| <= 1 and
    4 lam^2 + lam_T^2 <= (1 + lam_z)^2; invertibility needs lam_z > 0.
    """

    lam_T: TimeFunction
    lam: TimeFunction
    lam_z: TimeFunction

    @staticmethod
    def counterexample() -> "PhaseCovariantParams":
        """Stock parameters: sinusoidal bias over exponential damping.

        Left rates are nonnegative for all times while the '+' right rate
        changes sign near t = 1.88, so the evolution is CP-divisible in the
        Schrodinger picture yet not even P-divisible in the Heisenberg one.
        """
        return PhaseCovariantParams(lam_T=half_sine(), lam=exp_decay(rate=0.5),
                                    lam_z=exp_decay(rate=1.0))

    @staticmethod
    def dephasing(rate: float = 1.0) -> "PhaseCovariantParams":
        return PhaseCovariantParams(lam_T=const(0.0), lam=exp_decay(rate=rate),
                                    lam_z=const(1.0))

    @staticmethod
    def depolarizing(rate: float = 1.0) -> "PhaseCovariantParams":
        return PhaseCovariantParams(lam_T=const(0.0), lam=exp_decay(rate=rate),
                                    lam_z=exp_decay(rate=rate))

    @property
    def breakpoints(self) -> tuple:
        return tuple(sorted(set(self.lam_T.breakpoints) | set(self.lam.breakpoints)
                            | set(self.lam_z.breakpoints)))

    def validate(self, times, tol: float = 1e-9) -> None:
        t = np.atleast_1d(np.asarray(times, dtype=float))
        lt, l, lz = self.lam_T(t), self.lam(t), self.lam_z(t)
        bad = np.abs(lt) + np.abs(lz) > 1.0 + tol
        bad |= 4.0 * l ** 2 + lt ** 2 > (1.0 + lz) ** 2 + tol
        if np.any(bad):
            k = int(np.nonzero(bad)[0][0])
            raise ModelError(f"complete-positivity conditions fail at t={t[k]:.6g}")
        if np.any(lz <= 0):
            k = int(np.nonzero(lz <= 0)[0][0])
            raise ModelError(f"lam_z <= 0 at t={t[k]:.6g}: map not invertible")

    def affine(self, t: float) -> BlochAffine:
        self.validate([t])
        lt, l, lz = float(self.lam_T(t)), float(self.lam(t)), float(self.lam_z(t))
        return BlochAffine(v=np.array([0.0, 0.0, lt]), lam=np.diag([l, l, lz]))

    def rates(self, t, side: str = "left"):
        """GKLS rates of the left generator (gamma_+, gamma_-, gamma_z) or of
        the right generator (xi_+, xi_-, xi_z)."""
        t = np.asarray(t, dtype=float)
        lt, lz, l = self.lam_T(t), self.lam_z(t), self.lam(t)
        dlt, dlz, dl = self.lam_T.deriv(t), self.lam_z.deriv(t), self.lam.deriv(t)
        if np.any(lz <= 0):
            raise ModelError("lam_z <= 0: rates undefined")
        g_z = 0.25 * (dlz / lz - 2.0 * dl / l)
        if side == "left":
            g_p = (dlt * lz - (1.0 + lt) * dlz) / (2.0 * lz)
            g_m = (-dlt * lz - (1.0 - lt) * dlz) / (2.0 * lz)
            return g_p, g_m, g_z
        if side == "right":
            x_p = (dlt - dlz) / (2.0 * lz)
            x_m = (-dlt - dlz) / (2.0 * lz)
            return x_p, x_m, g_z
        raise ValidationError(f"unknown side {side!r}")

    def rate_conversion_residual(self, t) -> float:
        """Residual of expressing the right rates through the left ones,
        xi_pm = [g_+ (lz -+ lT +- 1) + g_- (lz -+ lT -+ 1)] / (2 lz)."""
        t = np.asarray(t, dtype=float)
        g_p, g_m, _ = self.rates(t, "left")
        x_p, x_m, _ = self.rates(t, "right")
        lt, lz = self.lam_T(t), self.lam_z(t)
        pred_p = (g_p * (lz - lt + 1.0) + g_m * (lz - lt - 1.0)) / (2.0 * lz)
        pred_m = (g_p * (lz + lt - 1.0) + g_m * (lz + lt + 1.0)) / (2.0 * lz)
        return float(max(np.max(np.abs(x_p - pred_p)), np.max(np.abs(x_m - pred_m))))

    def jump_rate_ops(self, t: float, side: str = "left"):
        """(rate, jump operator) triples at time t, for the sampled
        positivity check."""
        from .smallmat import SIGMA_X, SIGMA_Y, SIGMA_Z

        sp = 0.5 * (SIGMA_X + 1j * SIGMA_Y)
        sm_ = 0.5 * (SIGMA_X - 1j * SIGMA_Y)
        r_p, r_m, r_z = (float(x) for x in self.rates(t, side))
        return [(r_p, sp), (r_m, sm_), (r_z, SIGMA_Z)]

    def trajectory(self, t0: float = 0.0, t_end: float = DEFAULT_T_END,
                   steps: int = DEFAULT_STEPS, analytic: bool = True) -> MapTrajectory:
        times = np.linspace(t0, t_end, steps)
        self.validate(times)
        lt, l, lz = self.lam_T(times), self.lam(times), self.lam_z(times)
        mats = np.zeros((steps, 4, 4))
        mats[:, 0, 0] = 1.0
        mats[:, 1, 1] = l
        mats[:, 2, 2] = l
        mats[:, 3, 3] = lz
        mats[:, 3, 0] = lt
        dmats = None
        if analytic:
            dlt, dl, dlz = self.lam_T.deriv(times), self.lam.deriv(times), self.lam_z.deriv(times)
            dmats = np.zeros_like(mats)
            dmats[:, 1, 1] = dl
            dmats[:, 2, 2] = dl
            dmats[:, 3, 3] = dlz
            dmats[:, 3, 0] = dlt
        return MapTrajectory(times=times, mats=mats, dmats=dmats,
                             breakpoints=self.breakpoints)


def xi_plus_crossing(params: PhaseCovariantParams, lo: float = 0.0, hi: float = 5.0,
                     tol: float = 1e-10) -> float:
    """First sign change of the '+' right rate, located by bisection."""
    def xi_p(t):
        return float(params.rates(t, "right")[0])

    t = np.linspace(lo, hi, 2001)
    vals = np.array([xi_p(x) for x in t])
    sign_flip = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if not sign_flip.size:
        raise ValidationError("no sign change of xi_+ in the window")
    a, b = t[sign_flip[0]], t[sign_flip[0] + 1]
    fa = xi_p(a)
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = xi_p(mid)
        if fa * fm <= 0:
            b = mid
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


# --- dephasing + rotation ---------------------------------------------------------

@dataclass(frozen=True)
class DephRotParams:
    """Dephasing D = diag(lam, lam, 1) up to t1, rotation about x afterwards.

    variant 1 composes the rotation after the dephasing (Lambda = O D): the
    image ellipsoid rigidly rotates; variant 2 puts the transposed rotation
    first (Lambda = D O^T): the ellipsoid stays put while surface points
    slide along it.  Requirements: lam(0) = 1, lam nonincreasing before t1
    and constant after, beta = 0 before t1.
    """

    variant: int
    lam: TimeFunction
    beta: TimeFunction
    t1: float = 1.0

    @staticmethod
    def default(variant: int, t1: float = 1.0) -> "DephRotParams":
        return DephRotParams(variant=variant, lam=cos_plateau(t_knee=t1, floor=0.5),
                             beta=rot_saturate(t_knee=t1, rate=3.0), t1=t1)

    def __post_init__(self):
        if self.variant not in (1, 2):
            raise ModelError("variant must be 1 or 2")

    @property
    def breakpoints(self) -> tuple:
        return tuple(sorted({self.t1} | set(self.lam.breakpoints)
                            | set(self.beta.breakpoints)))

    def validate(self, times, tol: float = 1e-9) -> None:
        t = np.atleast_1d(np.asarray(times, dtype=float))
        lam = self.lam(t)
        if abs(float(self.lam(0.0)) - 1.0) > tol:
            raise ModelError("lam(0) must be 1")
        if np.any(lam <= 0):
            raise ModelError("lam must stay positive (invertibility)")
        dlam = self.lam.deriv(t)
        if np.any(dlam[t < self.t1] > tol):
            raise ModelError("lam must be nonincreasing before t1")
        if np.any(np.abs(dlam[t >= self.t1]) > tol):
            raise ModelError("lam must be constant after t1")
        if np.any(np.abs(self.beta(t[t < self.t1])) > tol):
            raise ModelError("beta must vanish before t1")

    def _pieces(self, t):
        t = np.asarray(t, dtype=float)
        lam = self.lam(t)
        beta = np.where(t >= self.t1, self.beta(t), 0.0)
        dbeta = np.where(t >= self.t1, self.beta.deriv(t), 0.0)
        return lam, self.lam.deriv(t), beta, dbeta

    def affine(self, t: float) -> BlochAffine:
        lam, _, beta, _ = self._pieces(t)
        d = np.diag([float(lam), float(lam), 1.0])
        c, s = math.cos(float(beta)), math.sin(float(beta))
        o = np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
        block = o @ d if self.variant == 1 else d @ o.T
        return BlochAffine(v=np.zeros(3), lam=block)

    def trajectory(self, t0: float = 0.0, t_end: float = DEFAULT_T_END,
                   steps: int = DEFAULT_STEPS, analytic: bool = True) -> MapTrajectory:
        times = np.linspace(t0, t_end, steps)
        self.validate(times)
        lam, dlam, beta, dbeta = self._pieces(times)
        c, s = np.cos(beta), np.sin(beta)
        o = np.zeros((steps, 3, 3))
        o[:, 0, 0] = 1.0
        o[:, 1, 1] = c
        o[:, 2, 2] = c
        o[:, 1, 2] = -s
        o[:, 2, 1] = s
        d = np.zeros((steps, 3, 3))
        d[:, 0, 0] = lam
        d[:, 1, 1] = lam
        d[:, 2, 2] = 1.0
        dd = np.zeros((steps, 3, 3))
        dd[:, 0, 0] = dlam
        dd[:, 1, 1] = dlam
        do = dbeta[:, None, None] * np.einsum("ij,tjk->tik", L_X, o)
        if self.variant == 1:
            block = np.matmul(o, d)
            dblock = np.matmul(do, d) + np.matmul(o, dd)
        else:
            ot = np.transpose(o, (0, 2, 1))
            dot = np.transpose(do, (0, 2, 1))
            block = np.matmul(d, ot)
            dblock = np.matmul(dd, ot) + np.matmul(d, dot)
        mats = np.zeros((steps, 4, 4))
        mats[:, 0, 0] = 1.0
        mats[:, 1:, 1:] = block
        dmats = None
        if analytic:
            dmats = np.zeros_like(mats)
            dmats[:, 1:, 1:] = dblock
        return MapTrajectory(times=times, mats=mats, dmats=dmats,
                             breakpoints=self.breakpoints)
