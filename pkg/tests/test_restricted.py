import pytest
from hypothesis import given, settings, strategies as st

from golden import DIMORPHIC_UP_TO_62, HYBRID_UP_TO_62
from rectpack.exact import Q3, q3_cmp, q3_to_real
from rectpack.geom import check_feasible
from rectpack.restricted import (
    RnTuple,
    aspect_ratio,
    best_in_rn,
    dimorphism_hybrid_scan,
    enumerate_tuples,
    is_irregular_candidate,
    is_valid,
    make_table,
    minimizers,
    tuple_area,
    tuple_dims,
    tuple_perimeter,
    tuple_to_packing,
)


def brute_force(n, objective="perimeter"):
    f = tuple_perimeter if objective == "perimeter" else tuple_area
    best, found = None, []
    for t in enumerate_tuples(n):
        v = f(t)
        c = 1 if best is None else q3_cmp(v, best)
        if best is None or c < 0:
            best, found = v, [t]
        elif c == 0:
            found.append(t)
    return best, sorted(found)


@pytest.mark.parametrize("n", list(range(1, 121)))
def test_branch_and_bound_matches_brute_force(n):
    assert minimizers(n) == brute_force(n)


@pytest.mark.parametrize("n", [1, 2, 7, 13, 30, 57, 100])
def test_area_objective_matches_brute_force(n):
    assert minimizers(n, "area") == brute_force(n, "area")


def test_known_values():
    assert best_in_rn(13).value == Q3(16, 8)
    assert best_in_rn(13).reported == (RnTuple(3, 5, 2, 0, 0, 0),)
    assert best_in_rn(1).value == Q3(8, 0)
    assert best_in_rn(2).value == Q3(12, 0)
    assert best_in_rn(7).value == Q3(16, 4)


def test_dims_of_tuples():
    W, H = tuple_dims(RnTuple(3, 5, 2, 0, 0, 0))
    assert W == Q3(6, 0) and H == Q3(2, 4)
    W, H = tuple_dims(RnTuple(4, 0, 0, 3, 0, 0))
    assert W == Q3(8, 0) and H == Q3(6, 0)
    assert aspect_ratio(RnTuple(4, 0, 0, 3, 0, 0)) == pytest.approx(8 / 6)


def test_enumeration_counts_and_validity():
    for n in range(1, 40):
        ts = list(enumerate_tuples(n))
        assert len(ts) == len(set(ts))
        assert all(is_valid(t, n) for t in ts)


def test_invalid_tuples_rejected():
    assert not is_valid(RnTuple(3, 1, 0, 0, 0, 0))  # a single hexagonal row is a square row
    assert not is_valid(RnTuple(0, 2, 0, 0, 0, 0))
    assert not is_valid(RnTuple(3, 3, 3, 0, 0, 0))
    with pytest.raises(ValueError):
        list(enumerate_tuples(0))
    with pytest.raises(ValueError):
        best_in_rn(5, "volume")


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 150), st.data())
def test_tuple_packings_are_feasible(n, data):
    t = data.draw(st.sampled_from(list(enumerate_tuples(n))))
    p = tuple_to_packing(t)
    assert p.n == n
    assert check_feasible(p).ok
    W, H = tuple_dims(t)
    assert p.width == pytest.approx(q3_to_real(W), rel=1e-13)
    assert p.height == pytest.approx(q3_to_real(H), rel=1e-13)


def test_small_flags():
    rows = make_table(1, 62)
    dim = sorted({r.n for r in rows if r.dimorphic})
    hyb = sorted({r.n for r in rows if r.hybrid})
    assert tuple(dim) == DIMORPHIC_UP_TO_62
    assert tuple(hyb) == HYBRID_UP_TO_62


def test_scan_small_range():
    entries = dict(dimorphism_hybrid_scan(120))
    assert 106 in entries and 69 in entries and 11 in entries


def test_irregular_candidate_rule():
    assert [n for n in range(1, 60) if is_irregular_candidate(n)] == [13, 21, 31, 43, 57]
    assert is_irregular_candidate(507)


def test_parallel_table_matches_serial():
    assert make_table(90, 130, jobs=2) == make_table(90, 130)
