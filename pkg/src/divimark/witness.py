"""Distinguishability witnesses and non-Markovianity measures.

The Schrodinger-picture quantifier is the trace distance between evolved
states; its Heisenberg counterpart is the operator distance between evolved
effects, tied to the task of guessing which of two effects was measured:

    P_guess(states)  = (1 + D_1)/2        D_1 = ||rho - sigma||_1 / 2
    P_guess(effects) = (1 + D_inf)/2      D_inf = ||E - F||_inf

A Schrodinger P-divisible map never increases D_1, a Heisenberg P-divisible
map never increases D_inf; the measures N_S and N_H integrate the positive
part of the respective derivative and maximize over input pairs.  On qubits
the trace-distance supremum is attained on antipodal pure-state pairs, which
is the documented candidate family for N_S (spot-checked against arbitrary
pairs in the tests); for N_H the difference E - F is parametrized directly
over the feasible set { (d0, d) : |d0| + ||d|| <= 2 }, every point of which
splits into a valid effect pair through its positive and negative parts.

The module also houses the two brute-force oracles: a direct minimization of
the effect-guessing error over pure states, and the two-qubit dilation bound
limiting how much either distance can revive between two times.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import bloch, smallmat
from .dynmap import MapTrajectory, canonical_picture
from .errors import ValidationError
from .rng import Xorshift64Star, random_hermitian
from .tolerances import TOLS

_CURVE_RANGES = {
    "D1": (0.0, 1.0),
    "Dinf": (0.0, 1.0),
    "Pguess_s": (0.5, 1.0),
    "Pguess_e": (0.5, 1.0),
    "incompat": (0.0, 1.0),
    "sharpness": (0.0, 1.0),
}


@dataclass(frozen=True)
class TrajectoryCurve:
    times: np.ndarray
    values: np.ndarray
    label: str

    def __post_init__(self):
        if self.label not in _CURVE_RANGES:
            raise ValidationError(f"unknown curve label {self.label!r}")
        lo, hi = _CURVE_RANGES[self.label]
        v = np.asarray(self.values, dtype=float)
        if v.shape != np.asarray(self.times).shape:
            raise ValidationError("curve values must match the time grid")
        if np.min(v) < lo - TOLS.curve_range or np.max(v) > hi + TOLS.curve_range:
            raise ValidationError(
                f"{self.label} values outside [{lo}, {hi}]: [{np.min(v)}, {np.max(v)}]")
        object.__setattr__(self, "times", np.asarray(self.times, dtype=float))
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class EffectDifference:
    """Difference E - F of two effects in Bloch form (d0, d)."""

    delta0: float
    delta: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.delta, dtype=float).reshape(3)
        if abs(self.delta0) + np.linalg.norm(d) > 2.0 + TOLS.bloch_norm:
            raise ValidationError("|d0| + ||d|| must not exceed 2")
        object.__setattr__(self, "delta", d)

    def split(self) -> tuple[np.ndarray, np.ndarray]:
        """Effect pair (E, F) with E - F realizing this difference, via the
        positive/negative parts of (d0 I + d.sigma)/2."""
        norm = float(np.linalg.norm(self.delta))
        unit = self.delta / norm if norm > 1e-15 else np.array([0.0, 0.0, 1.0])
        mu_hi = 0.5 * (self.delta0 + norm)
        mu_lo = 0.5 * (self.delta0 - norm)
        e_hi, e_lo = max(mu_hi, 0.0), max(mu_lo, 0.0)
        f_hi, f_lo = max(-mu_hi, 0.0), max(-mu_lo, 0.0)
        e4 = np.concatenate(([e_hi + e_lo], (e_hi - e_lo) * unit))
        f4 = np.concatenate(([f_hi + f_lo], (f_hi - f_lo) * unit))
        bloch.check_effect(e4)
        bloch.check_effect(f4)
        return e4, f4


# --- distances and guessing probabilities ------------------------------------

def d1(r4_a: np.ndarray, r4_b: np.ndarray) -> float:
    """Trace distance between two states given as Bloch 4-vectors."""
    rho = bloch.state_matrix(r4_a)
    sig = bloch.state_matrix(r4_b)
    return 0.5 * smallmat.trace_norm(rho - sig)


def dinf(e4: np.ndarray, f4: np.ndarray) -> float:
    """Operator distance between two effects given as Bloch 4-vectors."""
    return smallmat.op_norm(bloch.effect_matrix(e4) - bloch.effect_matrix(f4))


def p_guess_state(r4_a: np.ndarray, r4_b: np.ndarray) -> float:
    return 0.5 * (1.0 + d1(r4_a, r4_b))


def p_guess_effect(e4: np.ndarray, f4: np.ndarray) -> float:
    return 0.5 * (1.0 + dinf(e4, f4))


def p_guess_effect_bruteforce(e4: np.ndarray, f4: np.ndarray,
                              n_states: int = 2000, refine_steps: int = 20) -> float:
    """Effect-guessing probability by direct error minimization over states.

    The error of the best guess given preparation rho is
    1/2 - |tr[(E - F) rho]| / 2; pure states from a low-discrepancy sphere
    sample are refined by ascent on |tr[(E - F) rho]|.  Serves as the
    independent oracle for :func:`p_guess_effect`.
    """
    bloch.check_effect(e4)
    bloch.check_effect(f4)
    d0 = float(e4[0] - f4[0])
    dv = np.asarray(e4[1:] - f4[1:], dtype=float)
    pts = bloch.fibonacci_sphere(n_states)
    # tr[(E-F) rho] = (d0 + d . r)/2 for rho on the Bloch sphere
    vals = np.abs(d0 + pts @ dv) * 0.5
    order = np.argsort(vals)[-5:]
    best = float(np.max(vals))
    for r in pts[order]:
        for _ in range(refine_steps):
            grad = np.sign(d0 + float(dv @ r)) * dv
            gn = np.linalg.norm(grad)
            if gn < 1e-14:
                break
            r = grad / gn
            val = abs(d0 + float(dv @ r)) * 0.5
            if val > best:
                best = val
    return 0.5 + 0.5 * best


# --- curves along a trajectory --------------------------------------------------

def evolve_states(traj: MapTrajectory, r4: np.ndarray) -> np.ndarray:
    """Schrodinger orbit of a state 4-vector: shape (T, 4)."""
    return np.einsum("tij,j->ti", traj.mats, np.asarray(r4, dtype=float))


def evolve_effects(traj: MapTrajectory, a4: np.ndarray) -> np.ndarray:
    """Heisenberg orbit of an effect 4-vector (dual, transposed action)."""
    return np.einsum("tji,j->ti", traj.mats, np.asarray(a4, dtype=float))


def distance_trajectory(traj: MapTrajectory, pair, picture: str) -> TrajectoryCurve:
    """D_1 (Schrodinger) or D_inf (Heisenberg) between the evolved pair."""
    picture = canonical_picture(picture)
    a, b = pair
    if picture == "schrodinger":
        bloch.check_state(a)
        bloch.check_state(b)
        diff = evolve_states(traj, np.asarray(a) - np.asarray(b))
        values = 0.5 * np.linalg.norm(diff[:, 1:], axis=1)
        return TrajectoryCurve(times=traj.times, values=values, label="D1")
    bloch.check_effect(a)
    bloch.check_effect(b)
    diff = evolve_effects(traj, np.asarray(a) - np.asarray(b))
    values = 0.5 * (np.abs(diff[:, 0]) + np.linalg.norm(diff[:, 1:], axis=1))
    return TrajectoryCurve(times=traj.times, values=values, label="Dinf")


def positive_gain(values: np.ndarray) -> float:
    """Integral of the positive part of the curve derivative (trapezoid on
    the grid: the sum of positive increments)."""
    return float(np.sum(np.clip(np.diff(np.asarray(values, dtype=float)), 0.0, None)))


def revival_intervals(curve: TrajectoryCurve, tol: float = 1e-9):
    """Maximal intervals where the discrete derivative exceeds +tol, each
    reported as (t_start, t_end, integrated gain)."""
    t = curve.times
    dt = float(t[1] - t[0])
    diffs = np.diff(curve.values)
    rising = diffs / dt > tol
    out = []
    k = 0
    while k < len(rising):
        if rising[k]:
            j = k
            while j + 1 < len(rising) and rising[j + 1]:
                j += 1
            out.append((float(t[k]), float(t[j + 1]), float(np.sum(diffs[k:j + 1]))))
            k = j + 1
        else:
            k += 1
    return out


# --- non-Markovianity measures ----------------------------------------------------

@dataclass(frozen=True)
class NMResult:
    value: float
    curve: TrajectoryCurve
    pair: tuple


def _antipodal_curves(traj: MapTrajectory, dirs: np.ndarray) -> np.ndarray:
    lam = traj.mats[:, 1:, 1:]
    return np.linalg.norm(np.einsum("tij,nj->tni", lam, dirs), axis=2)


def _difference_curves(traj: MapTrajectory, d0s: np.ndarray, deltas: np.ndarray) -> np.ndarray:
    lam = traj.mats[:, 1:, 1:]
    v = traj.mats[:, 1:, 0]
    bias = d0s[None, :] + np.einsum("ti,ni->tn", v, deltas)
    norm = np.linalg.norm(np.einsum("tji,nj->tni", lam, deltas), axis=2)
    return 0.5 * (np.abs(bias) + norm)


def nm_measure_details(traj: MapTrajectory, picture: str,
                       n_candidates: int | None = None, n_refine: int = 5) -> NMResult:
    """Measure of divisibility violation with the optimizing pair and curve.

    Schrodinger: antipodal pure-state pairs seeded on a Fibonacci sphere;
    Heisenberg: effect differences (d0, d) on the boundary |d0| + ||d|| = 2.
    The best seeds are polished by Nelder-Mead on the positive-gain integral;
    ties resolve to the lowest candidate index.
    """
    picture = canonical_picture(picture)
    if picture == "schrodinger":
        n = n_candidates or 200
        dirs = bloch.fibonacci_sphere(n)
        curves = _antipodal_curves(traj, dirs)
        gains = np.sum(np.clip(np.diff(curves, axis=0), 0.0, None), axis=0)
        seeds = np.argsort(-gains, kind="stable")[:n_refine]

        def objective(x):
            th, ph = x
            r = np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
            return -positive_gain(_antipodal_curves(traj, r[None, :])[:, 0])

        best_gain = float(gains[seeds[0]])
        best_dir = dirs[seeds[0]]
        for k in seeds:
            r = dirs[k]
            x0 = np.array([np.arccos(np.clip(r[2], -1, 1)), np.arctan2(r[1], r[0])])
            res = minimize(objective, x0, method="Nelder-Mead",
                           options={"maxiter": 120, "xatol": 1e-6, "fatol": 1e-12})
            if -res.fun > best_gain + 1e-15:
                best_gain = float(-res.fun)
                th, ph = res.x
                best_dir = np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph),
                                     np.cos(th)])
        values = _antipodal_curves(traj, best_dir[None, :])[:, 0]
        curve = TrajectoryCurve(times=traj.times, values=np.clip(values, 0.0, 1.0),
                                label="D1")
        pair = (np.concatenate(([1.0], best_dir)), np.concatenate(([1.0], -best_dir)))
        return NMResult(value=best_gain, curve=curve, pair=pair)

    n_dirs = max(10, (n_candidates or 500) // 10)
    dirs = bloch.fibonacci_sphere(n_dirs)
    d0_grid = np.linspace(-1.9, 1.9, 10)
    d0s = np.repeat(d0_grid, n_dirs)
    deltas = np.tile(dirs, (len(d0_grid), 1)) * (2.0 - np.abs(d0s))[:, None]
    curves = _difference_curves(traj, d0s, deltas)
    gains = np.sum(np.clip(np.diff(curves, axis=0), 0.0, None), axis=0)
    seeds = np.argsort(-gains, kind="stable")[:n_refine]

    def h_objective(x):
        c, th, ph = x
        if abs(c) > 1.999:
            return 1e3 * (abs(c) - 1.999)
        rad = 2.0 - abs(c)
        d = rad * np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
        return -positive_gain(_difference_curves(traj, np.array([c]), d[None, :])[:, 0])

    best_gain = float(gains[seeds[0]])
    best_d0 = float(d0s[seeds[0]])
    best_delta = deltas[seeds[0]]
    for k in seeds:
        d = deltas[k]
        nr = np.linalg.norm(d)
        u = d / nr if nr > 1e-14 else np.array([0.0, 0.0, 1.0])
        x0 = np.array([d0s[k], np.arccos(np.clip(u[2], -1, 1)), np.arctan2(u[1], u[0])])
        res = minimize(h_objective, x0, method="Nelder-Mead",
                       options={"maxiter": 200, "xatol": 1e-6, "fatol": 1e-12})
        if -res.fun > best_gain + 1e-15:
            best_gain = float(-res.fun)
            c, th, ph = res.x
            best_d0 = float(np.clip(c, -1.999, 1.999))
            best_delta = (2.0 - abs(best_d0)) * np.array(
                [np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
    diff = EffectDifference(delta0=best_d0, delta=best_delta)
    values = _difference_curves(traj, np.array([best_d0]), best_delta[None, :])[:, 0]
    curve = TrajectoryCurve(times=traj.times, values=np.clip(values, 0.0, 1.0),
                            label="Dinf")
    return NMResult(value=best_gain, curve=curve, pair=diff.split())


def nm_measure(traj: MapTrajectory, picture: str, n_candidates: int | None = None) -> float:
    """N_S / N_H: largest positive-gain integral over candidate input pairs."""
    return nm_measure_details(traj, picture, n_candidates=n_candidates).value


# --- two-qubit dilation bound -----------------------------------------------------

@dataclass(frozen=True)
class DilationModel:
    """Two-qubit unitary dilation: system + one environment qubit.

    ``h_se`` generates U(t) = exp(-i H t); ``rho_e`` is the initial
    environment state; ``rho_s`` and ``rho_s2`` the two initial system states
    for the state-distance bound; ``x1``, ``x2`` the system effect pair for
    the effect-distance bound.
    """

    h_se: np.ndarray
    rho_e: np.ndarray     # Bloch 4-vector
    rho_s: np.ndarray     # Bloch 4-vector
    rho_s2: np.ndarray    # Bloch 4-vector
    x1: np.ndarray        # effect 4-vector
    x2: np.ndarray        # effect 4-vector

    def __post_init__(self):
        smallmat.check_hermitian(self.h_se)
        bloch.check_state(self.rho_e)
        bloch.check_state(self.rho_s)
        bloch.check_state(self.rho_s2)
        bloch.check_effect(self.x1)
        bloch.check_effect(self.x2)


@dataclass(frozen=True)
class DilationBoundResult:
    lhs_states: float
    rhs_states: float
    holds_states: bool
    lhs_effects: float
    rhs_effects: float
    holds_effects: bool


def random_dilation(rng: Xorshift64Star, scale: float = 1.0) -> DilationModel:
    from .rng import random_effect_bloch, random_state_bloch

    return DilationModel(h_se=random_hermitian(rng, 4, scale=scale),
                         rho_e=random_state_bloch(rng),
                         rho_s=random_state_bloch(rng),
                         rho_s2=random_state_bloch(rng),
                         x1=random_effect_bloch(rng),
                         x2=random_effect_bloch(rng))


def _heisenberg_snapshot(model: DilationModel, tau: float):
    u = smallmat.expi(model.h_se, tau)
    rho_e = bloch.state_matrix(model.rho_e)
    rho_s = bloch.state_matrix(model.rho_s)
    out = []
    for x4 in (model.x1, model.x2):
        x_se = u.conj().T @ np.kron(bloch.effect_matrix(x4), np.eye(2)) @ u
        x_s = smallmat.ptrace(np.kron(np.eye(2), rho_e) @ x_se, keep=0)
        x_e = smallmat.ptrace(np.kron(rho_s, np.eye(2)) @ x_se, keep=1)
        out.append((x_se, 0.5 * (x_s + x_s.conj().T), 0.5 * (x_e + x_e.conj().T)))
    return out


def _schrodinger_snapshot(model: DilationModel, tau: float):
    u = smallmat.expi(model.h_se, tau)
    rho_e = bloch.state_matrix(model.rho_e)
    out = []
    for r4 in (model.rho_s, model.rho_s2):
        rho_se = u @ np.kron(bloch.state_matrix(r4), rho_e) @ u.conj().T
        out.append((rho_se, smallmat.ptrace(rho_se, keep=0), smallmat.ptrace(rho_se, keep=1)))
    return out


def dilation_bound_check(model: DilationModel, s: float, t: float,
                         tol: float = TOLS.ball_excess) -> DilationBoundResult:
    """Both revival bounds between times s <= t.

    Each side bounds the distance gain of the reduced pair by the distance of
    the environment marginals at s plus the two system-environment
    correlation distances at s.
    """
    if not 0.0 <= s <= t:
        raise ValidationError("need 0 <= s <= t")

    eff_t = _heisenberg_snapshot(model, t)
    eff_s = _heisenberg_snapshot(model, s)
    lhs_e = smallmat.op_norm(eff_t[0][1] - eff_t[1][1]) \
        - smallmat.op_norm(eff_s[0][1] - eff_s[1][1])
    rhs_e = smallmat.op_norm(eff_s[0][2] - eff_s[1][2])
    for x_se, x_s, x_e in eff_s:
        rhs_e += smallmat.op_norm(x_se - np.kron(x_s, x_e))

    st_t = _schrodinger_snapshot(model, t)
    st_s = _schrodinger_snapshot(model, s)
    lhs_s = 0.5 * smallmat.trace_norm(st_t[0][1] - st_t[1][1]) \
        - 0.5 * smallmat.trace_norm(st_s[0][1] - st_s[1][1])
    rhs_s = 0.5 * smallmat.trace_norm(st_s[0][2] - st_s[1][2])
    for rho_se, rho_s, rho_e in st_s:
        rhs_s += 0.5 * smallmat.trace_norm(rho_se - np.kron(rho_s, rho_e))

    return DilationBoundResult(
        lhs_states=float(lhs_s), rhs_states=float(rhs_s),
        holds_states=bool(lhs_s <= rhs_s + tol),
        lhs_effects=float(lhs_e), rhs_effects=float(rhs_e),
        holds_effects=bool(lhs_e <= rhs_e + tol))
