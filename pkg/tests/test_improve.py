import math

import pytest

from rectpack.exact import q3_to_real
from rectpack.compactor import is_jammed
from rectpack.geom import check_feasible, detect_rattlers, measure
from rectpack.improve import (
    KNOWN_DELTA_INDEX,
    InfeasibleImprovement,
    apply_improvement,
    delta_closed_form,
    delta_param,
    delta_value,
    found_spec,
    irregular_spec,
    perimeter_after_improvement,
    right_column,
    solve_found,
    solve_irregular,
)
from rectpack.contacts import nonbond_slack
from rectpack.restricted import RnTuple, best_in_rn, tuple_dims


def test_closed_forms():
    assert delta_closed_form(1) == pytest.approx(2 - math.sqrt(2 * math.sqrt(3)), abs=1e-15)
    assert delta_closed_form(1) == pytest.approx(0.13879028, abs=1e-8)
    assert delta_closed_form(2) == pytest.approx(0.05728065, abs=1e-8)
    with pytest.raises(ValueError):
        delta_closed_form(3)


@pytest.mark.parametrize("i", [1, 2])
def test_solved_templates_agree_with_closed_forms(i):
    from rectpack.improve import _solved_delta

    assert _solved_delta(i) == pytest.approx(delta_closed_form(i), abs=1e-12)


def test_delta_order_and_param():
    vals = [delta_value(i) for i in (1, 2, 3, 4)]
    assert vals == sorted(vals, reverse=True)
    assert delta_param(3).closed_form is None
    with pytest.raises(ValueError):
        delta_value(5)


@pytest.mark.parametrize("n,i", sorted(KNOWN_DELTA_INDEX.items()))
def test_improvements_are_feasible_and_match(n, i):
    t = next(t for t in best_in_rn(n).minimizers if t.v >= 1 and t.s == 0)
    p = apply_improvement(t, i)
    assert p.n == n
    assert check_feasible(p).ok
    assert p.perimeter == pytest.approx(perimeter_after_improvement(best_in_rn(n).value, i), abs=1e-9)
    W = q3_to_real(tuple_dims(t)[0])
    assert p.width == pytest.approx(W - delta_value(i), abs=1e-9)


def test_rattler_appears_in_n26():
    t = RnTuple(5, 6, 3, 0, 0, 1)
    p = apply_improvement(t, 2)
    assert detect_rattlers(p)


def test_square_rows_have_no_right_column_move():
    with pytest.raises(InfeasibleImprovement):
        right_column(RnTuple(4, 0, 0, 3, 0, 1))


def test_irregular_13():
    p = solve_irregular(13)
    m = measure(p)
    assert m.P == pytest.approx(29.851847510, abs=1e-9)
    assert m.core_W == pytest.approx(5.463267269314, abs=1e-11)
    assert check_feasible(p).ok
    spec = irregular_spec(13)
    assert nonbond_slack(p, spec.system.bonds, skip=set(spec.system.rattlers)) > 1e-3


def test_irregular_21_is_feasible_and_beats_lattice():
    p = solve_irregular(21)
    assert check_feasible(p).ok
    assert p.perimeter < q3_to_real(best_in_rn(21).value) - 0.01


def test_unknown_irregular_size():
    with pytest.raises(ValueError):
        irregular_spec(31)


FOUND = {43: 51.99022912718230, 57: 59.45433074232005, 58: 59.70452561472416}


@pytest.mark.parametrize("n", sorted(FOUND))
def test_found_packings_resolve_feasible_and_jammed(n):
    p = solve_found(n)
    assert p.n == n
    assert p.perimeter == pytest.approx(FOUND[n], abs=1e-11)
    assert check_feasible(p, 1e-12).ok
    assert is_jammed(p)
    spec = found_spec(n)
    assert nonbond_slack(p, spec.system.bonds, skip=set(spec.system.rattlers)) > 1e-3


def test_found_57_extends_43():
    a, b = solve_found(43), solve_found(57)
    assert b.width - a.width == pytest.approx(2.0, abs=1e-12)
    assert b.height - a.height == pytest.approx(math.sqrt(3), abs=1e-12)


@pytest.mark.parametrize("n", [43, 57, 58])
def test_found_beat_lattice_and_known_moves(n):
    base = q3_to_real(best_in_rn(n).value)
    assert solve_found(n).perimeter < base
    if n in KNOWN_DELTA_INDEX:
        assert solve_found(n).perimeter < perimeter_after_improvement(best_in_rn(n).value, KNOWN_DELTA_INDEX[n])


def test_unknown_found_size():
    with pytest.raises(ValueError):
        found_spec(44)
