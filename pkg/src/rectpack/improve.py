"""Width reductions of hexagonal patterns with holes.

A hole at the right-hand end of a short row lets the circles of the
right-most column slide vertically towards it.  The long-row ends can then
all move off the old wall position by the same amount, so the rectangle
loses width while its height stays fixed.  Four such moves are known; their
width reductions are the constants ``delta_1 > delta_2 > delta_3 > delta_4``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from itertools import combinations

import numpy as np

from .contacts import ContactSystem, SolverError, solve_contacts
from .exact import Q3, q3_to_real
from .geom import BondGraph, Packing, check_feasible, detect_rattlers, extract_bonds
from .restricted import RnTuple, is_valid, tuple_dims, tuple_to_packing

SQRT3 = math.sqrt(3.0)

DELTA_CLOSED_FORMS = {
    1: "2 - sqrt(2*sqrt(3))",
    2: "2 - sqrt(3)/2 - 3**(1/4)*(2*sqrt(3) - 1)/(2*sqrt(4 - sqrt(3)))",
}

# delta index used for the starred rows up to 62, plus the three sizes whose
# improved packing is known but not optimal
KNOWN_DELTA_INDEX = {
    7: 1, 17: 2, 22: 2, 26: 2, 37: 1, 38: 3, 41: 2, 45: 3, 51: 3, 55: 3, 58: 4, 62: 3,
    31: 3, 43: 3, 57: 2,
}

MATCH_TOL = 1e-9


class InfeasibleImprovement(ValueError):
    """No arrangement of the holes yields the requested width reduction."""


@dataclass(frozen=True)
class DeltaParam:
    index: int
    value: float
    closed_form: str | None = None


def _check_index(i: int) -> None:
    if i not in (1, 2, 3, 4):
        raise ValueError(f"delta index must be 1..4, got {i}")


def delta_closed_form(i: int) -> float:
    if i == 1:
        return 2.0 - math.sqrt(2.0 * SQRT3)
    if i == 2:
        return 2.0 - 0.5 * SQRT3 - 3.0**0.25 * (2.0 * SQRT3 - 1.0) / (2.0 * math.sqrt(4.0 - SQRT3))
    raise ValueError(f"delta_{i} has no closed form")


def load_template(i: int) -> dict:
    _check_index(i)
    text = resources.files("rectpack.data").joinpath(f"delta{i}.json").read_text()
    return json.loads(text)


def template_system(i: int) -> tuple[ContactSystem, Packing, float]:
    """Contact system defining ``delta_i``, a precursor-based start and the precursor width."""
    tpl = load_template(i)
    t = RnTuple(*tpl["tuple"])
    full = tuple_to_packing(t._replace(v=0))
    c = np.delete(np.array(full.centers), tpl["holes"], axis=0)
    W0, H0 = (q3_to_real(q) for q in tuple_dims(t))
    moving = set(tpl["moving"])
    pinned = tuple(k for k in range(len(c)) if k not in moving)
    sys = ContactSystem(
        len(c), BondGraph.from_json(tpl["bonds"]), free_height=False, height=H0, pinned=pinned
    )
    return sys, Packing(W0, H0, c), W0


@lru_cache(maxsize=None)
def _solved_delta(i: int) -> float:
    sys, start, W0 = template_system(i)
    moving = sys.moving
    last: Exception | None = None
    # the bare lattice is a symmetric, singular start; nudge it deterministically
    for seed in range(10):
        c = np.array(start.centers)
        c[moving] += np.random.default_rng(seed).normal(0.0, 0.05, (len(moving), 2))
        try:
            out, _ = solve_contacts(sys, start.replace(centers=c))
        except SolverError as exc:
            last = exc
            continue
        if check_feasible(out).ok:
            return W0 - out.width
    raise SolverError(f"template for delta_{i} did not converge: {last}")


def delta_value(i: int) -> float:
    """Width reduction of the ``i``-th move (closed form for 1, 2; solved for 3, 4)."""
    _check_index(i)
    if i in DELTA_CLOSED_FORMS:
        return delta_closed_form(i)
    return _solved_delta(i)


def delta_param(i: int) -> DeltaParam:
    return DeltaParam(i, delta_value(i), DELTA_CLOSED_FORMS.get(i))


def perimeter_after_improvement(P: Q3, i: int) -> float:
    return q3_to_real(P) - 2.0 * delta_value(i)


# ---------------------------------------------------------------------------
# generic right-column search


@dataclass(frozen=True)
class Column:
    centers: np.ndarray  # full precursor, no holes
    width: float
    height: float
    column: tuple[int, ...]  # right-most circle of every row, bottom to top
    short_ends: tuple[int, ...]  # members of ``column`` not touching the wall


def right_column(t: RnTuple) -> Column:
    if not is_valid(t):
        raise ValueError(f"invalid tuple {t}")
    if t.h == 0 or t.s > 0:
        raise InfeasibleImprovement("only purely hexagonal patterns are handled")
    full = tuple_to_packing(t._replace(v=0))
    c = np.array(full.centers)
    W0, H0 = (q3_to_real(q) for q in tuple_dims(t))
    col = [k for k in range(len(c)) if c[k, 0] > W0 - 2.5]
    col.sort(key=lambda k: c[k, 1])
    short = tuple(k for k in col if c[k, 0] < W0 - 1.5)
    return Column(c, W0, H0, tuple(col), short)


def hole_placements(t: RnTuple, limit: int = 500):
    """Candidate hole sets: ``v`` distinct short-row ends of the right column."""
    col = right_column(t)
    if t.v < 1:
        raise InfeasibleImprovement("the pattern has no hole to exploit")
    if t.v > len(col.short_ends):
        raise InfeasibleImprovement("more holes than short-row ends")
    for k, holes in enumerate(combinations(col.short_ends, t.v)):
        if k >= limit:
            return
        yield holes


def _slide(c, free, W0, H0, x0, y0):
    """Minimise the width with only ``free`` circles movable (SLSQP)."""
    from scipy.optimize import minimize

    f = len(free)
    free_set = set(free)
    reach = min(W0 - 7.0, float(np.min(x0)) - 3.0)
    fixed = np.array([c[k] for k in range(len(c)) if k not in free_set and c[k, 0] > reach])
    fixed = fixed.reshape(-1, 2)
    A, B = np.triu_indices(f, 1)
    A2, J2 = (a.ravel() for a in np.meshgrid(np.arange(f), np.arange(len(fixed)), indexing="ij"))

    def cons(z):
        x, y, W = z[:f], z[f : 2 * f], z[-1]
        return np.concatenate(
            [
                (x[A] - x[B]) ** 2 + (y[A] - y[B]) ** 2 - 4.0,
                (x[A2] - fixed[J2, 0]) ** 2 + (y[A2] - fixed[J2, 1]) ** 2 - 4.0,
                W - 1.0 - x,
            ]
        )

    def cons_jac(z):
        x, y = z[:f], z[f : 2 * f]
        m1, m2 = len(A), len(A2)
        J = np.zeros((m1 + m2 + f, 2 * f + 1))
        r = np.arange(m1)
        dx, dy = x[A] - x[B], y[A] - y[B]
        J[r, A] = 2 * dx
        J[r, B] = -2 * dx
        J[r, f + A] = 2 * dy
        J[r, f + B] = -2 * dy
        r = m1 + np.arange(m2)
        J[r, A2] = 2 * (x[A2] - fixed[J2, 0])
        J[r, f + A2] = 2 * (y[A2] - fixed[J2, 1])
        r = m1 + m2 + np.arange(f)
        J[r, np.arange(f)] = -1.0
        J[r, 2 * f] = 1.0
        return J

    goal = np.zeros(2 * f + 1)
    goal[-1] = 1.0
    z0 = np.concatenate([x0, y0, [max(W0, float(np.max(x0)) + 1.0) + 0.5]])
    lo = min(W0 - 4.0, float(np.min(x0)) - 1.0)
    bounds = [(lo, W0)] * f + [(1.0, H0 - 1.0)] * f + [(W0 - 4.0, W0 + 2.0)]
    res = minimize(
        lambda z: z[-1],
        z0,
        jac=lambda z: goal,
        bounds=bounds,
        constraints=[{"type": "ineq", "fun": cons, "jac": cons_jac}],
        method="SLSQP",
        options={"maxiter": 3000, "ftol": 1e-15},
    )
    if cons(res.x).min() < -1e-9:
        return None
    return res.x


@dataclass(frozen=True)
class Improvement:
    delta: float
    holes: tuple[int, ...]
    packing: Packing


def _polish(c: np.ndarray, free: list[int], W: float, H0: float) -> Packing | None:
    """Snap a slid arrangement onto its exact contacts by Newton's method."""
    p = Packing(W, H0, c)
    # the slide is only accurate to about the SLSQP tolerance, so widen the
    # contact tolerance until the bonds pin everything down
    for tol in (1e-7, 1e-6, 1e-5, 1e-4):
        bonds = extract_bonds(p, tol)
        rattlers = detect_rattlers(p, bonds=bonds, fixed=set(range(len(c))) - set(free))
        moving = [k for k in free if k not in rattlers]
        if not moving:
            continue
        keep_pairs = tuple(
            q for q in bonds.circle_pairs if (q[0] in moving or q[1] in moving) and not set(q) & rattlers
        )
        keep_walls = tuple(q for q in bonds.wall_contacts if q[0] in moving)
        pinned = tuple(k for k in range(len(c)) if k not in moving and k not in rattlers)
        sys = ContactSystem(
            len(c), BondGraph(keep_pairs, keep_walls), free_height=False, height=H0,
            pinned=pinned, rattlers=tuple(sorted(rattlers)),
        )
        try:
            out, _ = solve_contacts(sys, p)
        except SolverError:
            continue
        if check_feasible(out).ok:
            return out
    return None


def improvement_candidates(t: RnTuple, tries: int = 40, seed: int = 0, target: float | None = None):
    """Yield :class:`Improvement` objects found by sliding the right column.

    For every hole placement the column circles start evenly spread over the
    height (first try exact, later tries jittered by a seeded generator).
    With ``target`` set, the search stops at the first matching reduction.
    """
    col = right_column(t)
    rng = np.random.default_rng(seed)
    for holes in hole_placements(t):
        keep = [k for k in range(len(col.centers)) if k not in holes]
        c = col.centers[keep]
        remap = {old: new for new, old in enumerate(keep)}
        column = [remap[k] for k in col.column if k not in holes]
        hole_y = np.array([col.centers[h, 1] for h in holes])
        seen: set[float] = set()
        for attempt in range(tries):
            y_lat = c[column, 1]
            if attempt % 2 == 0:
                # spread the column evenly over the height
                x0 = np.array([col.width - 1.0 - 0.3 * (1 + j % 2) for j in range(len(column))])
                y0 = np.linspace(1.0, col.height - 1.0, len(column))
            else:
                # pull every nearby column circle towards its closest hole
                near = hole_y[np.argmin(np.abs(y_lat[:, None] - hole_y[None, :]), axis=1)]
                shift = 0.5 if attempt == 1 else rng.uniform(0.2, 0.8)
                y0 = y_lat + np.sign(near - y_lat) * shift * (np.abs(near - y_lat) < 4.0)
                x0 = np.full(len(column), col.width - 1.3)
            if attempt > 1:
                x0 = x0 + rng.normal(0.0, 0.05, len(column))
                y0 = y0 + rng.normal(0.0, 0.1, len(column))
            y0 = np.clip(y0, 1.0, col.height - 1.0)
            z = _slide(c, column, col.width, col.height, x0, y0)
            if z is None or col.width - z[-1] < 1e-7:
                continue
            f = len(column)
            trial = c.copy()
            trial[column, 0] = z[:f]
            trial[column, 1] = z[f : 2 * f]
            out = _polish(trial, column, float(z[-1]), col.height)
            if out is None:
                continue
            d = col.width - out.width
            key = round(d, 9)
            if key in seen:
                continue
            seen.add(key)
            yield Improvement(d, tuple(int(h) for h in holes), out)
            if target is not None and abs(d - target) < MATCH_TOL:
                return


def apply_improvement(t: RnTuple, i: int, tries: int = 40, seed: int = 0) -> Packing:
    """Packing of ``t.count`` circles whose width is ``W - delta_i``."""
    _check_index(i)
    target = delta_value(i)
    for cand in improvement_candidates(t, tries, seed, target=target):
        if abs(cand.delta - target) < MATCH_TOL:
            p = cand.packing
            return p.replace(
                bonds=extract_bonds(p),
                provenance="improved",
                meta={"tuple": list(t), "delta_index": i, "delta": cand.delta, "holes": list(cand.holes)},
            )
    raise InfeasibleImprovement(f"no hole arrangement of {t} gives delta_{i}")


# ---------------------------------------------------------------------------
# irregular packings given by their bond graphs

IRREGULAR_SIZES = (13, 21)
# record packings found by this package (compactor, extension, deep slide)
FOUND_SIZES = (43, 57, 58)


@dataclass(frozen=True)
class IrregularSpec:
    system: ContactSystem
    initial: Packing
    nonbonds: tuple[tuple[int, str], ...]  # near contacts declared open


def _load_spec(stem: str, n: int) -> IrregularSpec:
    data = json.loads(resources.files("rectpack.data").joinpath(f"{stem}{n}.json").read_text())
    system = ContactSystem(n, BondGraph.from_json(data["bonds"]), rattlers=tuple(data["rattlers"]))
    init = Packing(data["width"], data["height"], data["centers"], provenance="imported")
    return IrregularSpec(system, init, tuple((int(k), str(w)) for k, w in data.get("nonbonds", [])))


def irregular_spec(n: int) -> IrregularSpec:
    if n not in IRREGULAR_SIZES:
        raise ValueError(f"no bond graph shipped for n={n}; available: {IRREGULAR_SIZES}")
    return _load_spec("irregular", n)


def found_spec(n: int) -> IrregularSpec:
    if n not in FOUND_SIZES:
        raise ValueError(f"no found packing shipped for n={n}; available: {FOUND_SIZES}")
    return _load_spec("found", n)


def solve_found(n: int) -> Packing:
    """Re-solve a shipped record packing on its own contact graph."""
    spec = found_spec(n)
    out, _ = solve_contacts(spec.system, spec.initial)
    return out.replace(meta={"n": n, "rattlers": list(spec.system.rattlers)})


def solve_irregular(n: int) -> Packing:
    spec = irregular_spec(n)
    out, _ = solve_contacts(spec.system, spec.initial)
    return out.replace(meta={"n": n, "rattlers": list(spec.system.rattlers)})
