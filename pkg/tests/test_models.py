import numpy as np
import pytest

from divimark import dynmap, models
from divimark.errors import GridAlignmentError, ModelError
from divimark.models import DephRotParams, PhaseCovariantParams, xi_plus_crossing


def test_counterexample_identity_at_zero():
    p = PhaseCovariantParams.counterexample()
    aff = p.affine(0.0)
    assert np.max(np.abs(aff.matrix() - np.eye(4))) < 1e-14


def test_unital_when_bias_vanishes():
    p = PhaseCovariantParams.dephasing()
    for t in (0.0, 0.5, 2.0):
        assert np.max(np.abs(p.affine(t).v)) == 0.0


def test_counterexample_at_t_one():
    p = PhaseCovariantParams.counterexample()
    aff = p.affine(1.0)
    assert np.allclose(np.diag(aff.lam), [np.exp(-0.5), np.exp(-0.5), np.exp(-1.0)])
    assert np.allclose(aff.v, [0.0, 0.0, 0.5 * np.sin(1.0)])


def test_cp_violating_parameters_fail_loudly():
    bad = PhaseCovariantParams(lam_T=models.const(0.0), lam=models.const(1.2),
                               lam_z=models.const(1.0))
    with pytest.raises(ModelError):
        bad.validate([0.0, 1.0])


def test_counterexample_left_rates():
    p = PhaseCovariantParams.counterexample()
    g_p, g_m, g_z = p.rates(0.0, "left")
    assert g_p == pytest.approx(0.75, abs=1e-12)
    assert g_m == pytest.approx(0.25, abs=1e-12)
    assert g_z == pytest.approx(0.0, abs=1e-12)
    t = np.linspace(0.0, 5.0, 2001)
    g_p, g_m, g_z = p.rates(t, "left")
    assert np.max(np.abs(g_z)) < 1e-12
    assert np.min(g_p) >= 0.0
    assert np.min(g_m) >= 0.0
    # both left rates bottom out at (2 - sqrt 2)/4
    assert min(np.min(g_p), np.min(g_m)) == pytest.approx((2 - np.sqrt(2)) / 4, abs=1e-5)


def test_left_rates_match_trajectory_extraction():
    # independent oracle: finite-difference generator of the actual map,
    # with the GKLS rates read off the Bloch generator matrix
    p = PhaseCovariantParams.counterexample()
    traj = p.trajectory(0.0, 3.0, 3001, analytic=False)
    for t in (0.5, 1.0, 1.5708, 2.5):
        g = dynmap.left_generator(traj, np.round(t / traj.dt) * traj.dt)
        blk = g.matrix[1:, 1:]
        shift = g.matrix[3, 0]
        s = -blk[2, 2]
        g_p_fd = 0.5 * (s + shift)
        g_m_fd = 0.5 * (s - shift)
        g_z_fd = -0.5 * (blk[0, 0] + 0.5 * s)
        g_p, g_m, g_z = (float(x) for x in p.rates(g.time, "left"))
        assert g_p_fd == pytest.approx(g_p, abs=2e-5)
        assert g_m_fd == pytest.approx(g_m, abs=2e-5)
        assert g_z_fd == pytest.approx(g_z, abs=2e-5)


def test_counterexample_right_rates_and_crossing():
    p = PhaseCovariantParams.counterexample()
    t = np.linspace(0.0, 5.0, 501)
    x_p, x_m, x_z = p.rates(t, "right")
    assert np.allclose(x_p, 0.5 + np.exp(t) * np.cos(t) / 4.0, atol=1e-12)
    assert np.allclose(x_m, 0.5 - np.exp(t) * np.cos(t) / 4.0, atol=1e-12)
    assert np.max(np.abs(x_z)) < 1e-12
    t_star = xi_plus_crossing(p)
    assert abs(t_star - 1.88) < 0.02
    # the crossing solves e^t cos t = -2
    assert np.exp(t_star) * np.cos(t_star) == pytest.approx(-2.0, abs=1e-8)


def test_rate_conversion_residual():
    p = PhaseCovariantParams.counterexample()
    assert p.rate_conversion_residual(np.linspace(0.0, 5.0, 401)) < 1e-10
    # unital case: xi equals gamma exactly
    u = PhaseCovariantParams.depolarizing()
    t = np.linspace(0.0, 4.0, 101)
    for a, b in zip(u.rates(t, "left"), u.rates(t, "right")):
        assert np.max(np.abs(a - b)) < 1e-12
    assert u.rate_conversion_residual(t) < 1e-12


def test_dephrot_variants_agree_before_t1():
    for variant in (1, 2):
        p = DephRotParams.default(variant)
        for t in (0.0, 0.4, 0.9):
            lam = float(p.lam(t))
            assert np.allclose(p.affine(t).lam, np.diag([lam, lam, 1.0]), atol=1e-12)


def test_dephrot_variant1_rotates_image_variant2_preserves_it():
    p1 = DephRotParams.default(1)
    p2 = DephRotParams.default(2)
    # singular values of the Bloch block are those of D for both variants
    for t in (1.5, 3.0, 6.0):
        lam = float(p1.lam(t))
        for p in (p1, p2):
            sing = np.sort(np.sqrt(np.linalg.eigvalsh(p.affine(t).lam.T @ p.affine(t).lam)))
            assert np.allclose(sing, sorted([lam, lam, 1.0]), atol=1e-10)
    # the image ellipsoid is the set {Lam r}: characterized by Lam Lam^T.
    # variant 2 leaves it fixed at D(t1)^2, variant 1 rotates it
    d1 = p1.affine(p1.t1).lam
    for t in (2.0, 3.0, 6.0):
        lam2 = p2.affine(t).lam
        assert np.max(np.abs(lam2 @ lam2.T - d1 @ d1.T)) < 1e-12
        lam1 = p1.affine(t).lam
        assert np.max(np.abs(lam1 @ lam1.T - d1 @ d1.T)) > 0.1
    # yet variant 1 moves no point of the image once beta saturates only by
    # rotation: image of e_y leaves the xy-plane
    out1 = p1.affine(3.0).lam @ np.array([0.0, 1.0, 0.0])
    assert abs(out1[2]) > 0.1


def test_dephrot_invariants_of_default_functions():
    p = DephRotParams.default(1)
    t = np.linspace(0.0, 8.0, 1601)
    lam = p.lam(t)
    assert float(p.lam(0.0)) == pytest.approx(1.0, abs=1e-12)
    pre = lam[t <= p.t1]
    assert np.all(np.diff(pre) <= 1e-12)
    post = lam[t >= p.t1]
    assert np.max(np.abs(post - post[0])) < 1e-12
    assert np.max(np.abs(p.beta(t[t < p.t1]))) == 0.0
    p.validate(t)


def test_dephrot_bad_functions_rejected():
    grow = models.TimeFunction(lambda t: 1.0 + t, lambda t: np.ones_like(t))
    p = DephRotParams(variant=1, lam=grow, beta=models.rot_saturate(), t1=1.0)
    with pytest.raises(ModelError):
        p.validate(np.linspace(0, 2, 21))


def test_trajectory_breakpoint_must_be_on_grid():
    p = DephRotParams.default(1)
    with pytest.raises(GridAlignmentError):
        p.trajectory(0.0, 10.0, 1000)  # step does not divide t1 = 1
    traj = p.trajectory(0.0, 10.0, 2001)
    assert traj.breakpoints == (1.0,)


def test_phase_covariant_trajectory_shape_and_start():
    p = PhaseCovariantParams.counterexample()
    traj = p.trajectory(0.0, 5.0, 501)
    assert traj.mats.shape == (501, 4, 4)
    assert np.max(np.abs(traj.mats[0] - np.eye(4))) < 1e-14
    assert traj.dmats is not None
