"""Bound formulas: hand-computed values, gates, and error conditions."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lchkit.bounds import (
    DegenerateCobordism,
    EmptyGrid,
    NonPositive,
    NotSeparating,
    ParameterOutOfRange,
    RatioMismatch,
    chord_bound_autonomous,
    chord_bound_timedep,
    chord_time_vs_pb,
    cooperative_bound,
    delta_separation_value,
    pb_plus_lower_bound,
    two_chords_bound,
)
from lchkit.models import OrderingViolation
from lchkit.persistence import LminValue


def test_delta_separation_is_a_difference():
    assert delta_separation_value(F(5), F(3)) == F(2)
    assert delta_separation_value(F(1), F(4)) == F(-3)


# ----------------------------------------------------------------------
# pb+ lower bound


def test_pb_plus_by_hand():
    out = pb_plus_lower_bound(F(2), s_minus=F(1, 3), s_plus=F(1, 2))
    assert out.applicable
    assert out.value == F(3)  # 1 / ((1/2 - 1/3) * 2)
    assert out.formula_id == "pb_plus_from_lmin"


def test_pb_plus_infinite_lmin_is_inapplicable():
    out = pb_plus_lower_bound(None, s_minus=F(1, 3), s_plus=F(1, 2))
    assert not out.applicable
    assert out.value is None
    assert out.violated_conditions == ("l_min_finite",)


def test_pb_plus_argument_errors():
    with pytest.raises(DegenerateCobordism):
        pb_plus_lower_bound(F(1), s_minus=F(1, 2), s_plus=F(1, 3))
    with pytest.raises(DegenerateCobordism):
        pb_plus_lower_bound(F(1), s_minus=F(0), s_plus=F(1, 2))
    with pytest.raises(NonPositive):
        pb_plus_lower_bound(F(0), s_minus=F(1, 3), s_plus=F(1, 2))


def test_pb_plus_checks_lmin_ratio():
    good = LminValue(value=F(2), ratio=F(3, 2))  # 3/2 = (1/2)/(1/3)
    assert pb_plus_lower_bound(good, F(1, 3), F(1, 2)).value == F(3)
    bad = LminValue(value=F(2), ratio=F(2))
    with pytest.raises(RatioMismatch):
        pb_plus_lower_bound(bad, F(1, 3), F(1, 2))


def test_pb_plus_accepts_uncertain_lmin_silently():
    # an uncertain value is still an upper estimate of l_min, hence a valid
    # input; the uncertainty flag is the caller's to propagate
    shaky = LminValue(value=F(2), ratio=F(3, 2), uncertain=True)
    assert pb_plus_lower_bound(shaky, F(1, 3), F(1, 2)).value == F(3)


# ----------------------------------------------------------------------
# autonomous chord bound


def test_autonomous_by_hand():
    out = chord_bound_autonomous(F(2), F(1, 3), F(1, 2), delta=F(1, 2))
    assert out.applicable
    assert out.value == F(2, 3)  # (1/6) * 2 / (1/2)
    assert out.formula_id == "chord_time_autonomous"


def test_autonomous_requires_positive_separation():
    with pytest.raises(NotSeparating):
        chord_bound_autonomous(F(2), F(1, 3), F(1, 2), delta=F(0))
    with pytest.raises(NotSeparating):
        chord_bound_autonomous(F(2), F(1, 3), F(1, 2), delta=F(-1))


def test_autonomous_infinite_lmin_is_inapplicable():
    out = chord_bound_autonomous(None, F(1, 3), F(1, 2), delta=F(1))
    assert not out.applicable and out.value is None


# ----------------------------------------------------------------------
# time-dependent chord bound


def test_timedep_by_hand():
    out = chord_bound_timedep(
        F(2), F(1, 3), F(1, 2),
        delta=F(4), e=F(1, 4), sup_dHdt_on_window=F(1),
        c_min=F(0), c_max=F(1),
    )
    assert out.applicable
    assert out.value == F(1, 6)  # (1/6)*2 / ((1/2)*4)
    assert out.details["E"] == F(1)
    assert out.details["threshold"] == F(6)
    assert out.details["window"] == (F(-1), F(2))


def test_timedep_gate_is_strict():
    # sup exactly at the threshold fails the gate; value is still reported
    out = chord_bound_timedep(
        F(2), F(1, 3), F(1, 2),
        delta=F(4), e=F(1, 4), sup_dHdt_on_window=F(6),
        c_min=F(0), c_max=F(1),
    )
    assert not out.applicable
    assert out.violated_conditions == ("dHdt_below_threshold",)
    assert out.value == F(1, 6)
    below = chord_bound_timedep(
        F(2), F(1, 3), F(1, 2),
        delta=F(4), e=F(1, 4), sup_dHdt_on_window=F(6) - F(1, 1000),
        c_min=F(0), c_max=F(1),
    )
    assert below.applicable


def test_timedep_nonpositive_delta_is_inapplicable_not_an_error():
    out = chord_bound_timedep(
        F(2), F(1, 3), F(1, 2),
        delta=F(-1), e=F(1, 4), sup_dHdt_on_window=F(0),
        c_min=F(0), c_max=F(1),
    )
    assert not out.applicable
    assert "delta_positive" in out.violated_conditions
    assert out.details["E"] is None


def test_timedep_argument_errors():
    common = dict(delta=F(4), sup_dHdt_on_window=F(1), c_min=F(0), c_max=F(1))
    with pytest.raises(ParameterOutOfRange):
        chord_bound_timedep(F(2), F(1, 3), F(1, 2), e=F(1, 2), **common)
    with pytest.raises(ParameterOutOfRange):
        chord_bound_timedep(F(2), F(1, 3), F(1, 2), e=F(0), **common)
    with pytest.raises(DegenerateCobordism):
        chord_bound_timedep(F(2), F(1, 2), F(1, 3), e=F(1, 4), **common)
    with pytest.raises(ValueError):
        chord_bound_timedep(
            F(2), F(1, 3), F(1, 2),
            delta=F(4), e=F(1, 4), sup_dHdt_on_window=F(1),
            c_min=F(2), c_max=F(1),
        )
    with pytest.raises(NonPositive):
        chord_bound_timedep(
            F(2), F(1, 3), F(1, 2),
            delta=F(4), e=F(1, 4), sup_dHdt_on_window=F(-1),
            c_min=F(0), c_max=F(1),
        )


# ----------------------------------------------------------------------
# cooperative bound


def _lmin_table(table):
    def fn(s):
        return LminValue(value=table.get(s), ratio=s)
    return fn


def test_cooperative_by_hand_grid_branch():
    fn = _lmin_table({F(2): F(4), F(3): F(3)})
    out = cooperative_bound(
        fn, inf_h=F(2), C=F(3), l_min_inf=F(5), grid=[F(5, 4), F(2), F(3)]
    )
    assert out.applicable
    # s=2: (2-1)*4/(4-3) = 4; s=3: (3-1)*3/(6-3) = 2; mu = 5/2
    assert out.value == F(2)
    assert out.details["branch"] == "grid"
    assert out.details["winning_s"] == F(3)
    assert out.details["grid_size"] == 2  # 5/4 never clears C/inf_h
    assert out.details["mu"] == F(5, 2)


def test_cooperative_infinite_branch_wins():
    fn = _lmin_table({F(2): F(4), F(3): F(3)})
    out = cooperative_bound(
        fn, inf_h=F(2), C=F(3), l_min_inf=F(1), grid=[F(2), F(3)]
    )
    assert out.value == F(1, 2)
    assert out.details["branch"] == "infinite_bars"


def test_cooperative_all_lmin_infinite_is_inapplicable():
    fn = _lmin_table({})
    out = cooperative_bound(fn, inf_h=F(2), C=F(3), l_min_inf=None, grid=[F(2)])
    assert not out.applicable
    assert out.violated_conditions == ("l_min_finite_somewhere",)


def test_cooperative_errors():
    fn = _lmin_table({F(2): F(1)})
    with pytest.raises(EmptyGrid):
        cooperative_bound(fn, inf_h=F(2), C=F(3), l_min_inf=None, grid=[F(5, 4)])
    with pytest.raises(ParameterOutOfRange):
        cooperative_bound(fn, inf_h=F(2), C=F(2), l_min_inf=None, grid=[F(2)])
    with pytest.raises(NonPositive):
        cooperative_bound(fn, inf_h=F(0), C=F(3), l_min_inf=None, grid=[F(2)])


def test_cooperative_refining_the_grid_never_raises_the_bound():
    table = {F(2): F(4), F(5, 2): F(7, 2), F(3): F(3), F(4): F(3)}
    fn = _lmin_table(table)
    coarse = cooperative_bound(fn, F(2), F(3), None, grid=[F(2), F(3)])
    fine = cooperative_bound(fn, F(2), F(3), None, grid=list(table))
    assert fine.value <= coarse.value


# ----------------------------------------------------------------------
# two parallel chords


def test_two_chords_by_hand():
    out = two_chords_bound(a_len=F(1), A_len=F(3, 2), c=F(2), Cup=F(2))
    assert out.applicable
    assert out.value == F(1, 2)  # 1*(1/2) / (3/2*2 - 1*2)
    assert out.details["C_over_c"] == F(1)
    assert out.details["A_over_a"] == F(3, 2)


def test_two_chords_slope_gate():
    out = two_chords_bound(a_len=F(1), A_len=F(3, 2), c=F(2), Cup=F(7, 2))
    assert not out.applicable
    assert out.violated_conditions == ("C_over_c_below_A_over_a",)
    assert out.value is None
    # equality also fails: the gate is strict
    eq = two_chords_bound(a_len=F(1), A_len=F(3, 2), c=F(2), Cup=F(3))
    assert not eq.applicable


def test_two_chords_errors():
    with pytest.raises(OrderingViolation):
        two_chords_bound(F(2), F(1), F(1), F(1))
    with pytest.raises(NonPositive):
        two_chords_bound(F(1), F(2), F(0), F(1))
    with pytest.raises(ParameterOutOfRange):
        two_chords_bound(F(1), F(2), F(2), F(1))


# ----------------------------------------------------------------------
# chaining the pb+ bound into the chord bound


def test_chord_time_vs_pb_by_hand():
    assert chord_time_vs_pb(F(3), F(1, 2)) == F(2, 3)
    with pytest.raises(NonPositive):
        chord_time_vs_pb(F(0), F(1))
    with pytest.raises(NonPositive):
        chord_time_vs_pb(F(1), F(0))


@settings(max_examples=200, deadline=None)
@given(
    l_min=st.fractions(min_value=F(1, 50), max_value=F(50)),
    s_minus=st.fractions(min_value=F(1, 50), max_value=F(20)),
    gap=st.fractions(min_value=F(1, 50), max_value=F(20)),
    delta=st.fractions(min_value=F(1, 50), max_value=F(50)),
)
def test_chaining_equals_the_direct_formula(l_min, s_minus, gap, delta):
    s_plus = s_minus + gap
    direct = chord_bound_autonomous(l_min, s_minus, s_plus, delta)
    p = pb_plus_lower_bound(l_min, s_minus, s_plus)
    assert direct.applicable and p.applicable
    assert chord_time_vs_pb(p.value, delta) == direct.value
