import numpy as np
import pytest

from divimark.classical import (ClassicalModel, random_heisenberg_divisible_model)
from divimark.errors import SingularMapError
from divimark.models import TimeFunction, const
from divimark.rng import Xorshift64Star


def test_generators_reproduce_matrix_definitions():
    for model in (ClassicalModel.scenario_ab1(), ClassicalModel.scenario_ab2()):
        for t in (0.3, 1.1, 2.7, 4.0):
            s = model.s_matrix(t)
            ds = model.s_dot(t)
            s_inv = np.linalg.inv(s)
            assert np.max(np.abs(model.generator(t, "left") - ds @ s_inv)) < 1e-10
            assert np.max(np.abs(model.generator(t, "right") - s_inv @ ds)) < 1e-10


def test_generator_columns_sum_to_zero():
    model = ClassicalModel.scenario_ab2()
    for t in (0.0, 1.0, 3.0):
        for side in ("left", "right"):
            g = model.generator(t, side)
            assert np.max(np.abs(g.sum(axis=0))) < 1e-12


def test_ab1_rates_at_zero_and_closed_forms():
    model = ClassicalModel.scenario_ab1()
    r = model.rates(0.0)
    assert float(r.l1) == pytest.approx(0.5, abs=1e-12)
    assert float(r.l2) == pytest.approx(1.0, abs=1e-12)
    assert float(r.r1) == pytest.approx(0.5, abs=1e-12)
    assert float(r.r2) == pytest.approx(1.0, abs=1e-12)
    t = np.linspace(0.0, 8.0, 401)
    r = model.rates(t)
    assert np.max(np.abs(r.r1 - 1.0 / (1.0 + np.exp(-t)))) < 1e-10
    assert np.max(np.abs(r.r2 - 2.0 / (np.exp(t) + 1.0))) < 1e-10
    assert np.min(r.r1) >= 0.0 and np.min(r.r2) >= 0.0


def test_scenario_verdicts():
    ab1 = ClassicalModel.scenario_ab1()
    assert ab1.divisibility("left").divisible
    assert ab1.divisibility("right").divisible
    ab2 = ClassicalModel.scenario_ab2()
    left = ab2.divisibility("left")
    right = ab2.divisibility("right")
    assert left.divisible
    assert not right.divisible
    assert right.worst_value < -1e-3
    assert right.first_violation_time is not None


def test_bistochastic_left_equals_right():
    f = TimeFunction(lambda t: 0.5 * (1.0 + np.exp(-t)), lambda t: -0.5 * np.exp(-t))
    model = ClassicalModel(a=f, b=f)
    for t in (0.2, 1.0, 2.0):
        assert np.max(np.abs(model.generator(t, "left") - model.generator(t, "right"))) < 1e-12
    assert model.divisibility("left").divisible == model.divisibility("right").divisible


def test_norm_monotonicity_scenarios():
    rng = Xorshift64Star(44)
    ab1 = ClassicalModel.scenario_ab1()
    ab2 = ClassicalModel.scenario_ab2()
    worst_ab1 = -np.inf
    worst_ab2 = -np.inf
    for _ in range(20):
        x = np.array([rng.uniform(-1, 1), rng.uniform(-1, 1)])
        _, d1 = ab1.norm_monotonicity("right", x, t_end=8.0, steps=1601)
        worst_ab1 = max(worst_ab1, float(np.max(d1)))
        _, d2 = ab2.norm_monotonicity("right", x, t_end=8.0, steps=1601)
        worst_ab2 = max(worst_ab2, float(np.max(d2)))
        # left 1-norm contraction holds in both scenarios
        _, e1 = ab1.norm_monotonicity("left", x, t_end=8.0, steps=1601)
        _, e2 = ab2.norm_monotonicity("left", x, t_end=8.0, steps=1601)
        assert np.max(e1) <= 1e-9 and np.max(e2) <= 1e-9
    assert worst_ab1 <= 1e-9
    assert worst_ab2 > 1e-3


def test_right_divisibility_implies_left():
    rng = Xorshift64Star(99)
    for _ in range(100):
        model = random_heisenberg_divisible_model(rng)
        r = model.rates(np.linspace(0.0, 10.0, 801))
        assert min(np.min(r.r1), np.min(r.r2)) >= -1e-12  # by construction
        assert model.implication_check(t_end=10.0, steps=801)


def test_singular_map_detected():
    model = ClassicalModel(a=const(0.3), b=const(0.7))
    with pytest.raises(SingularMapError):
        model.rates(1.0)
