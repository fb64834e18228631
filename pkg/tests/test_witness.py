import numpy as np
import pytest

from divimark import bloch, smallmat, witness
from divimark.models import DephRotParams, PhaseCovariantParams, xi_plus_crossing
from divimark.rng import Xorshift64Star, random_effect_bloch, random_state_bloch
from divimark.witness import (DilationModel, EffectDifference, TrajectoryCurve,
                              dilation_bound_check, random_dilation)


def test_distance_examples():
    up = bloch.state_bloch(0, 0, 1)
    down = bloch.state_bloch(0, 0, -1)
    assert witness.d1(up, down) == pytest.approx(1.0, abs=1e-12)
    proj = bloch.effect_bloch(1, 0, 0, 1)
    comp = bloch.effect_bloch(1, 0, 0, -1)
    assert witness.dinf(proj, comp) == pytest.approx(1.0, abs=1e-12)
    assert witness.dinf(proj, proj) == 0.0


def test_p_guess_examples():
    up = bloch.state_bloch(0, 0, 1)
    down = bloch.state_bloch(0, 0, -1)
    assert witness.p_guess_state(up, up) == pytest.approx(0.5, abs=1e-12)
    assert witness.p_guess_state(up, down) == pytest.approx(1.0, abs=1e-12)
    proj = bloch.effect_bloch(1, 0, 0, 1)
    half = bloch.effect_bloch(1, 0, 0, 0)
    assert witness.p_guess_effect(proj, half) == pytest.approx(0.75, abs=1e-12)


def test_bruteforce_guessing_examples():
    proj0 = bloch.effect_bloch(1, 0, 0, 1)
    proj1 = bloch.effect_bloch(1, 0, 0, -1)
    assert witness.p_guess_effect_bruteforce(proj0, proj1) == pytest.approx(1.0, abs=1e-9)
    assert witness.p_guess_effect_bruteforce(proj0, proj0) == pytest.approx(0.5, abs=1e-12)


def test_bruteforce_matches_closed_form_on_random_pairs():
    rng = Xorshift64Star(101)
    worst = 0.0
    for _ in range(100):
        e4 = random_effect_bloch(rng)
        f4 = random_effect_bloch(rng)
        brute = witness.p_guess_effect_bruteforce(e4, f4)
        exact = witness.p_guess_effect(e4, f4)
        worst = max(worst, abs(brute - exact))
    assert worst < 1e-6


def test_effect_difference_split():
    rng = Xorshift64Star(55)
    for _ in range(200):
        d0 = rng.uniform(-2.0, 2.0)
        d = rng.unit_vector() * rng.random() * (2.0 - abs(d0))
        diff = EffectDifference(delta0=d0, delta=d)
        e4, f4 = diff.split()
        assert np.max(np.abs((e4 - f4) - np.concatenate(([d0], d)))) < 1e-12


def test_distance_trajectory_counterexample_revives_dinf_not_d1():
    p = PhaseCovariantParams.counterexample()
    traj = p.trajectory(0.0, 5.0, 2001)
    # effect pair whose difference lies along -I/2 + sigma_z/2
    e4, f4 = EffectDifference(delta0=-1.0, delta=np.array([0, 0, 1.0])).split()
    curve = witness.distance_trajectory(traj, (e4, f4), "heisenberg")
    revivals = witness.revival_intervals(curve, tol=1e-9)
    assert revivals, "expected a D_inf revival"
    t_star = xi_plus_crossing(p)
    assert abs(revivals[0][0] - t_star) <= 2 * traj.dt
    # trace distance between any pure antipodal pair decays monotonically
    up = bloch.state_bloch(0, 1, 0)
    dn = bloch.state_bloch(0, -1, 0)
    d1_curve = witness.distance_trajectory(traj, (up, dn), "schrodinger")
    assert np.max(np.diff(d1_curve.values)) <= 1e-9


def test_distance_trajectory_dephrot_patterns():
    traj = DephRotParams.default(1).trajectory(0.0, 8.0, 1601)
    up = bloch.state_bloch(0, 1, 0)
    dn = bloch.state_bloch(0, -1, 0)
    d1_curve = witness.distance_trajectory(traj, (up, dn), "schrodinger")
    assert np.max(np.diff(d1_curve.values)) <= 1e-12
    e4 = bloch.effect_bloch(1, 0, 1, 0)
    f4 = bloch.effect_bloch(1, 0, -1, 0)
    dinf_curve = witness.distance_trajectory(traj, (e4, f4), "heisenberg")
    assert witness.revival_intervals(dinf_curve, tol=1e-9)
    # distances agree with the matrix-level definitions at sampled times
    for k in (0, 100, 800, 1600):
        evolved_e = witness.evolve_effects(traj, e4)[k]
        evolved_f = witness.evolve_effects(traj, f4)[k]
        assert dinf_curve.values[k] == pytest.approx(
            witness.dinf(evolved_e, evolved_f), abs=1e-12)


def test_unitary_dynamics_keeps_distances_constant():
    # pure rotation: both curves stay flat
    from divimark.dynmap import MapTrajectory

    times = np.linspace(0.0, 2.0, 101)
    mats = np.zeros((101, 4, 4))
    mats[:, 0, 0] = 1.0
    c, s = np.cos(times), np.sin(times)
    mats[:, 1, 1] = 1.0
    mats[:, 2, 2] = c
    mats[:, 3, 3] = c
    mats[:, 2, 3] = -s
    mats[:, 3, 2] = s
    traj = MapTrajectory(times=times, mats=mats)
    up = bloch.state_bloch(0, 1, 0)
    dn = bloch.state_bloch(0, -1, 0)
    d1_curve = witness.distance_trajectory(traj, (up, dn), "schrodinger")
    assert np.max(np.abs(d1_curve.values - d1_curve.values[0])) < 1e-12
    e4 = bloch.effect_bloch(1, 0, 1, 0)
    f4 = bloch.effect_bloch(1, 0, -1, 0)
    dinf_curve = witness.distance_trajectory(traj, (e4, f4), "heisenberg")
    assert np.max(np.abs(dinf_curve.values - dinf_curve.values[0])) < 1e-12


def test_revival_intervals_synthetic():
    times = np.linspace(0.0, 1.0, 101)
    flat = TrajectoryCurve(times=times, values=np.linspace(1.0, 0.5, 101), label="D1")
    assert witness.revival_intervals(flat) == []
    const = TrajectoryCurve(times=times, values=np.full(101, 0.5), label="D1")
    assert witness.revival_intervals(const) == []
    vals = np.where(times < 0.5, 1.0 - times, 0.5 + (times - 0.5))
    bump = TrajectoryCurve(times=times, values=vals, label="D1")
    ivs = witness.revival_intervals(bump)
    assert len(ivs) == 1
    assert ivs[0][0] == pytest.approx(0.5, abs=0.011)
    assert ivs[0][2] == pytest.approx(0.5, abs=1e-9)


def test_nm_measures_on_models():
    p = PhaseCovariantParams.counterexample()
    traj = p.trajectory(0.0, 5.0, 1001)
    assert witness.nm_measure(traj, "schrodinger") < 1e-6
    res = witness.nm_measure_details(traj, "heisenberg")
    assert res.value > 1e-3
    onset = witness.revival_intervals(res.curve, tol=1e-9)[0][0]
    assert abs(onset - xi_plus_crossing(p)) <= 2 * traj.dt

    t1 = DephRotParams.default(1).trajectory(0.0, 6.0, 601)
    t2 = DephRotParams.default(2).trajectory(0.0, 6.0, 601)
    assert witness.nm_measure(t1, "schrodinger") < 1e-6
    assert witness.nm_measure(t1, "heisenberg") > 1e-3
    assert witness.nm_measure(t2, "schrodinger") > 1e-3
    assert witness.nm_measure(t2, "heisenberg") < 1e-6


def test_nm_measure_stable_under_candidate_doubling():
    traj = DephRotParams.default(1).trajectory(0.0, 6.0, 601)
    a = witness.nm_measure(traj, "heisenberg", n_candidates=500)
    b = witness.nm_measure(traj, "heisenberg", n_candidates=1000)
    assert abs(a - b) < 1e-4


def test_antipodal_pairs_dominate_arbitrary_pairs():
    # documented assumption behind N_S: arbitrary state pairs never beat the
    # antipodal optimum by more than tolerance
    traj = DephRotParams.default(2).trajectory(0.0, 6.0, 301)
    best = witness.nm_measure(traj, "schrodinger")
    rng = Xorshift64Star(77)
    worst = 0.0
    for _ in range(500):
        a = random_state_bloch(rng)
        b = random_state_bloch(rng)
        curve = witness.distance_trajectory(traj, (a, b), "schrodinger")
        worst = max(worst, witness.positive_gain(curve.values))
    assert worst <= best + 1e-9


def test_unital_positive_maps_contract_operator_norm():
    rng = Xorshift64Star(123)
    for _ in range(100):
        # random unital positive qubit map: rotations around a contraction
        u1, _ = np.linalg.qr(rng.normals(3, 3))
        u2, _ = np.linalg.qr(rng.normals(3, 3))
        scales = np.array([rng.random(), rng.random(), rng.random()])
        lam = u1 @ np.diag(scales) @ u2.T
        alpha = rng.normals(3)
        a0 = rng.uniform(-1, 1)
        x = smallmat.bloch4_to_matrix(np.concatenate(([a0], alpha)))
        out = smallmat.bloch4_to_matrix(np.concatenate(([a0], lam.T @ alpha)))
        assert smallmat.op_norm(out) <= smallmat.op_norm(x) + 1e-12


def test_dilation_bound_trivial_cases():
    rng = Xorshift64Star(5)
    base = random_dilation(rng)
    # no evolution
    model = DilationModel(h_se=np.zeros((4, 4)), rho_e=base.rho_e, rho_s=base.rho_s,
                          rho_s2=base.rho_s2, x1=base.x1, x2=base.x2)
    res = dilation_bound_check(model, 0.5, 1.5)
    assert res.holds_states and res.holds_effects
    assert abs(res.lhs_states) < 1e-12 and abs(res.lhs_effects) < 1e-12
    # product Hamiltonian: reduced dynamics unitary, distances constant
    from divimark.rng import random_hermitian

    h = np.kron(random_hermitian(rng, 2), np.eye(2)) + np.kron(np.eye(2), random_hermitian(rng, 2))
    model = DilationModel(h_se=h, rho_e=base.rho_e, rho_s=base.rho_s,
                          rho_s2=base.rho_s2, x1=base.x1, x2=base.x2)
    res = dilation_bound_check(model, 0.3, 2.1)
    assert res.holds_states and res.holds_effects
    assert res.lhs_states < 1e-10 and res.lhs_effects < 1e-10


def test_dilation_bound_random_instances():
    rng = Xorshift64Star(2024)
    for _ in range(25):
        model = random_dilation(rng)
        s = rng.uniform(0.0, 1.5)
        t = s + rng.uniform(0.0, 1.5)
        res = dilation_bound_check(model, s, t)
        assert res.holds_states
        assert res.holds_effects
