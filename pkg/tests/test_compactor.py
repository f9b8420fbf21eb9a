import numpy as np
import pytest

from rectpack.compactor import (
    CompactorParams,
    compact,
    is_jammed,
    random_start,
    restart_seeds,
    run_once,
    search,
)
from rectpack.exact import q3_to_real
from rectpack.geom import Packing, check_feasible, measure
from rectpack.restricted import RnTuple, best_in_rn, tuple_to_packing


def test_params_validation():
    with pytest.raises(ValueError):
        CompactorParams(initial_fill=0.95)
    with pytest.raises(ValueError):
        CompactorParams(shrink_rate=0)
    with pytest.raises(ValueError):
        CompactorParams(stall_tolerance=0)
    with pytest.raises(ValueError):
        CompactorParams(restarts=0)


def test_random_start():
    p = random_start(13, 42, 0.35)
    assert p.n == 13 and check_feasible(p).ok
    assert measure(p).density == pytest.approx(0.35, rel=1e-9)
    assert 0.5 <= p.width / p.height <= 2.0
    assert np.array_equal(p.centers, random_start(13, 42, 0.35).centers)
    assert check_feasible(random_start(1, 5, 0.3)).ok
    with pytest.raises(ValueError):
        random_start(0, 1)


def test_single_circle_reaches_square():
    rec = search(1, CompactorParams(restarts=1))
    assert rec.best_perimeter == 8.0


def test_two_circles():
    rec = search(2, CompactorParams(restarts=3))
    assert rec.best_perimeter == pytest.approx(12.0, abs=1e-9)


def test_trace_monotone_and_feasible():
    out = run_once(9, 11, CompactorParams())
    trace = out.meta["trace"]
    assert all(b <= a for a, b in zip(trace, trace[1:]))
    assert check_feasible(out).ok
    assert out.perimeter == trace[-1]


def test_output_jammed():
    out = run_once(8, 4, CompactorParams())
    assert is_jammed(out)


def test_loose_packing_is_not_jammed():
    assert not is_jammed(Packing(10, 10, [[3, 3], [6, 6]]))
    assert is_jammed(tuple_to_packing(RnTuple(3, 0, 0, 3, 0, 0)))


def test_compact_rejects_infeasible_start():
    with pytest.raises(ValueError):
        compact(Packing(3, 3, [[1, 1], [1.5, 1]]))


def test_step_budget_flag():
    out = compact(random_start(10, 1, 0.3), CompactorParams(max_steps=1, shrink_rate=0.05))
    assert out.meta["converged"] is False
    assert check_feasible(out).ok


def test_search_is_deterministic_and_parallel_agrees():
    a = search(5, CompactorParams(seed=9, restarts=4))
    b = search(5, CompactorParams(seed=9, restarts=4))
    c = search(5, CompactorParams(seed=9, restarts=4, jobs=2))
    assert a.best_perimeter == b.best_perimeter == c.best_perimeter
    assert a.seed_of_best == b.seed_of_best == c.seed_of_best
    assert np.array_equal(a.best_packing.centers, c.best_packing.centers)
    assert restart_seeds(9, 4) == restart_seeds(9, 4)


@pytest.mark.parametrize("n", [3, 4, 5, 6, 8, 9, 10])
def test_small_sizes_reach_lattice_optimum(n):
    rec = search(n, CompactorParams(seed=1, restarts=12))
    assert rec.best_perimeter == pytest.approx(q3_to_real(best_in_rn(n).value), rel=1e-6)


def test_progress_and_checkpoint_events():
    events, checkpoints = [], []
    search(3, CompactorParams(restarts=3), progress=events.append, checkpoint=checkpoints.append)
    assert [e["attempt"] for e in events] == [0, 1, 2]
    assert all(e["best"] <= e["perimeter"] for e in events)
    assert checkpoints and checkpoints[-1].best_perimeter == events[-1]["best"]
