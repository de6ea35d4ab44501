import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from nonlocal_fronts.errors import ParameterError
from nonlocal_fronts.model import ModelParams, equilibria, reaction_factored, reaction_local, validate


def test_equilibria_at_d_016():
    eq = equilibria(0.16)
    assert eq.A == pytest.approx(0.8, abs=1e-15)
    assert eq.a == pytest.approx(0.2, abs=1e-15)
    assert eq.zero == 0.0 and not eq.outside_theorem_range


def test_equilibria_at_d_zero_is_exact():
    eq = equilibria(0.0)
    assert eq.a == 0.0 and eq.A == 1.0


@given(st.floats(0.0, 0.2499, allow_nan=False))
def test_equilibria_are_roots(d):
    eq = equilibria(d)
    assert abs(eq.a + eq.A - 1.0) < 1e-14
    assert abs(eq.a * eq.A - d) < 1e-14
    assert 0.0 <= eq.a < eq.A <= 1.0
    for s in (eq.a, eq.A):
        assert abs(reaction_local(s, d)) < 1e-14


@given(st.floats(0.0, 0.2499), st.floats(-1.0, 2.0))
def test_factored_form_matches(d, u):
    assert reaction_factored(u, d) == pytest.approx(reaction_local(u, d), abs=1e-13)


def test_outside_range_is_flagged():
    assert equilibria(0.23).outside_theorem_range
    for bad in (-0.01, 0.25, 0.3, math.nan):
        with pytest.raises(ParameterError):
            equilibria(bad)


def test_model_params_guard_theorem_range():
    with pytest.raises(ParameterError):
        ModelParams(0.23, 0.1)
    m = ModelParams(0.23, 0.1, allow_outside=True)
    assert not m.guaranteed
    assert m.as_dict()["theoretical_guarantee"] is False


def test_validate_names_first_violation():
    assert validate(ModelParams(0.16, 0.1, 0.1), "zero_to_A").passed
    assert validate(ModelParams(0.0, 0.1, 0.1), "zero_to_A").violated == "d>0 required"
    assert validate(ModelParams(0.16, 0.1, 0.2), "zero_to_A").violated == "d0<d required"
    assert validate(ModelParams(0.16, 0.1, None), "zero_to_A").violated == "d0>0 required"
    assert validate(ModelParams(0.16, 0.0), "a_to_A").violated == "sigma>0"
    rep = validate(ModelParams(0.0, 0.1), "a_to_A")
    assert rep.passed and rep.as_dict()["mode"] == "a_to_A"
    with pytest.raises(ParameterError):
        validate(ModelParams(0.1, 0.1), "other")


def test_reaction_vectorised():
    u = np.linspace(0, 1, 11)
    assert reaction_local(u, 0.1).shape == u.shape
