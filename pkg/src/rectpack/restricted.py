"""Restricted search over hexagonal / square-grid / hybrid / holed patterns.

A configuration is a 6-tuple ``(w, h, hminus, s, sminus, v)``:

* ``w``       circles in the longest row
* ``h``       hexagonally alternating rows, ``hminus`` of which hold ``w - 1``
* ``s``       square-grid rows stacked on top, ``sminus`` of which hold ``w - 1``
* ``v``       mono-vacancies (holes)

with ``w*(h + s) - hminus - sminus - v == n``.  Rectangle dimensions are in
units of the circle radius and are exact members of Z[sqrt(3)].
"""
from __future__ import annotations

import math

import numpy as np
from dataclasses import dataclass
from typing import Iterator, Literal, NamedTuple

from .exact import Q3, SQRT3, q3_cmp, q3_mul, q3_to_real

Objective = Literal["perimeter", "area"]

# float slack used only for pruning; final decisions are exact
_PRUNE_EPS = 1e-7


class RnTuple(NamedTuple):
    w: int
    h: int
    hminus: int
    s: int
    sminus: int
    v: int

    @property
    def rows(self) -> int:
        return self.h + self.s

    @property
    def count(self) -> int:
        return self.w * (self.h + self.s) - self.hminus - self.sminus - self.v

    @property
    def hybrid(self) -> bool:
        return self.h > 0 and self.s > 0

    def __str__(self) -> str:
        return "({},{},{},{},{},{})".format(*self)


def hminus_options(w: int, h: int) -> tuple[int, ...]:
    if h == 0 or w == 1:
        return (0,)
    k, odd = divmod(h, 2)
    return (0, k, k + 1) if odd else (0, k)


def _max_sminus(w: int, h: int, s: int) -> int:
    # a row of w - 1 circles must hold at least one circle
    if w == 1:
        return 0
    return min(s, h + s - 1)


def _max_v(w: int, rows: int) -> int:
    return min(w, rows) - 1


def is_valid(t: RnTuple, n: int | None = None) -> bool:
    w, h, hm, s, sm, v = t
    if min(t) < 0 or w <= 0 or h + s <= 0 or h == 1:
        return False
    if sm > _max_sminus(w, h, s) or hm not in hminus_options(w, h):
        return False
    if v > _max_v(w, h + s):
        return False
    return n is None or t.count == n


def enumerate_tuples(n: int) -> Iterator[RnTuple]:
    """Yield every valid tuple for ``n`` circles in lexicographic order."""
    if n < 1:
        raise ValueError("n >= 1 required")
    for w in range(1, n + 1):
        h = 0
        while h == 0 or _min_count(w, h, max(hminus_options(w, h)), 0) <= n:
            for hm in hminus_options(w, h):
                s = 0 if h > 0 else 1
                while _min_count(w, h, hm, s) <= n:
                    rows = h + s
                    d = w * rows - hm - n
                    vmax = _max_v(w, rows)
                    for sm in range(max(0, d - vmax), min(_max_sminus(w, h, s), d) + 1):
                        yield RnTuple(w, h, hm, s, sm, d - sm)
                    s += 1
            h = 2 if h == 0 else h + 1


def _min_count(w: int, h: int, hm: int, s: int) -> int:
    rows = h + s
    return w * rows - hm - _max_sminus(w, h, s) - _max_v(w, rows)


def tuple_dims(t: RnTuple) -> tuple[Q3, Q3]:
    """Exact ``(W, H)`` of the enclosing rectangle in radius units."""
    w, h, hm, s, _, _ = t
    if h > 0:
        height = Q3(2 * s + 2, h - 1)
        width = Q3(2 * w + (1 if hm == 0 else 0), 0)
    else:
        height = Q3(2 * s, 0)
        width = Q3(2 * w, 0)
    return width, height


def tuple_perimeter(t: RnTuple) -> Q3:
    width, height = tuple_dims(t)
    return Q3(2 * (width.x + height.x), 2 * (width.y + height.y))


def tuple_area(t: RnTuple) -> Q3:
    width, height = tuple_dims(t)
    return q3_mul(width, height)


def aspect_ratio(t: RnTuple) -> float:
    width, height = tuple_dims(t)
    a, b = q3_to_real(width), q3_to_real(height)
    return max(a, b) / min(a, b)


def shape_key(t: RnTuple) -> tuple[Q3, Q3]:
    """Unordered rectangle shape ``{W, H}`` as a sortable pair."""
    width, height = tuple_dims(t)
    return (width, height) if width <= height else (height, width)


def _objective_value(t: RnTuple, objective: Objective) -> Q3:
    return tuple_perimeter(t) if objective == "perimeter" else tuple_area(t)


def _min_height(rows: int) -> float:
    # hexagonal rows are the shortest way to stack ``rows`` rows
    return 2.0 if rows == 1 else 2.0 + (rows - 1) * SQRT3


def _lower_bound(w: int, rows: int, objective: Objective) -> float:
    if objective == "perimeter":
        return 2.0 * (2.0 * w + _min_height(rows))
    return 2.0 * w * _min_height(rows)


def _completions(w: int, h: int, hm: int, s: int, n: int) -> Iterator[RnTuple]:
    rows = h + s
    d = w * rows - hm - n
    if d < 0:
        return
    vmax = _max_v(w, rows)
    for sm in range(max(0, d - vmax), min(_max_sminus(w, h, s), d) + 1):
        yield RnTuple(w, h, hm, s, sm, d - sm)


def minimizers(n: int, objective: Objective = "perimeter") -> tuple[Q3, list[RnTuple]]:
    """Exact minimum of the objective over R_n and every tuple attaining it.

    Branch and bound over ``rows = h + s`` and ``w``; float bounds only prune,
    and every surviving candidate is compared exactly.  Agrees with a full
    scan of :func:`enumerate_tuples` (checked in the test suite).
    """
    if n < 1:
        raise ValueError("n >= 1 required")
    best: Q3 | None = None
    best_f = math.inf
    found: list[RnTuple] = []

    def offer(t: RnTuple) -> None:
        nonlocal best, best_f, found
        val = _objective_value(t, objective)
        c = 1 if best is None else q3_cmp(val, best)
        if c < 0 or best is None:
            best, best_f, found = val, q3_to_real(val), [t]
        elif c == 0:
            found.append(t)

    max_rows = 2 * n + 3
    order = sorted(
        range(1, max_rows + 1),
        key=lambda r: _lower_bound(-(-n // r), r, objective),
    )
    for rows in order:
        w0 = max(1, -(-n // rows))
        if _lower_bound(w0, rows, objective) > best_f + _PRUNE_EPS:
            break
        w = w0
        while _lower_bound(w, rows, objective) <= best_f + _PRUNE_EPS:
            # w*rows minus the largest possible deficit must not exceed n
            if w * rows - (rows + 1) // 2 - (rows - 1) - _max_v(w, rows) > n:
                break
            # pure square grid
            for t in _completions(w, 0, 0, rows, n):
                offer(t)
            # more hexagonal rows means a lower rectangle, so scan h downwards
            for h in range(rows, 1, -1):
                s = rows - h
                hbound = Q3(2 * s + 2, h - 1)
                lb_w = 2 * w
                if objective == "perimeter":
                    lb = 2.0 * (lb_w + q3_to_real(hbound))
                else:
                    lb = lb_w * q3_to_real(hbound)
                if lb > best_f + _PRUNE_EPS:
                    break
                for hm in hminus_options(w, h):
                    for t in _completions(w, h, hm, s, n):
                        offer(t)
            w += 1
    assert best is not None
    found.sort()
    return best, found


def reported_minimizers(found: list[RnTuple]) -> list[RnTuple]:
    """Minimizers as the reference tables list them.

    When a minimizer has holes it is the precursor of a width-reducing local
    modification and is shown instead of the tying hole-free patterns; among
    holed ones the pattern with the most holes is shown.  Rotated copies of
    the same rectangle (``w`` and ``s`` swapped in a square grid) collapse to
    the landscape one.
    """
    vmax = max(t.v for t in found)
    keep = [t for t in found if t.v == vmax]
    by_shape: dict[tuple[Q3, Q3], RnTuple] = {}
    for t in keep:
        key = shape_key(t)
        width, height = tuple_dims(t)
        prev = by_shape.get(key)
        if prev is None:
            by_shape[key] = t
            continue
        pw, ph = tuple_dims(prev)
        # prefer landscape, then the lexicographically larger description
        if (width >= height, t) > (pw >= ph, prev):
            by_shape[key] = t
    return sorted(by_shape.values())


@dataclass(frozen=True)
class SearchResult:
    n: int
    objective: str
    value: Q3
    minimizers: tuple[RnTuple, ...]
    reported: tuple[RnTuple, ...]

    @property
    def regular(self) -> bool:
        return all(t.v == 0 for t in self.minimizers)

    @property
    def dimorphic(self) -> bool:
        return len({shape_key(t) for t in self.reported}) > 1

    @property
    def hybrid(self) -> bool:
        return any(t.hybrid for t in self.reported)

    @property
    def value_float(self) -> float:
        return q3_to_real(self.value)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "objective": self.objective,
            "value": self.value.to_json(),
            "value_str": str(self.value),
            "value_float": self.value_float,
            "minimizers": [list(t) for t in self.minimizers],
            "reported": [list(t) for t in self.reported],
            "regular": self.regular,
            "dimorphic": self.dimorphic,
            "hybrid": self.hybrid,
        }


def best_in_rn(n: int, objective: Objective = "perimeter") -> SearchResult:
    if objective not in ("perimeter", "area"):
        raise ValueError(f"unknown objective {objective!r}")
    value, found = minimizers(n, objective)
    return SearchResult(n, objective, value, tuple(found), tuple(reported_minimizers(found)))


def is_irregular_candidate(n: int, k_max: int = 33) -> bool:
    """``n = k(k+1) + 1`` with ``3 <= k <= k_max``: the exceptional sizes."""
    k = math.isqrt(n)
    while k * (k + 1) + 1 > n:
        k -= 1
    return 3 <= k <= k_max and k * (k + 1) + 1 == n


@dataclass(frozen=True)
class TableRow:
    n: int
    t: RnTuple
    perimeter: Q3
    regular: bool
    dimorphic: bool
    hybrid: bool
    irregular_candidate: bool
    first: bool  # first row of this n's group

    @property
    def stars(self) -> int:
        return self.t.v


CSV_COLUMNS = (
    "n", "w", "h", "hminus", "s", "sminus", "v",
    "perimeter_x", "perimeter_y", "perimeter_float",
    "regular", "dimorphic", "hybrid",
)


def rows_for(res: SearchResult) -> list[TableRow]:
    cand = is_irregular_candidate(res.n)
    return [
        TableRow(res.n, t, tuple_perimeter(t), res.regular, res.dimorphic, res.hybrid, cand, k == 0)
        for k, t in enumerate(res.reported)
    ]


def _search_range(n_from: int, n_to: int, objective: Objective, jobs: int = 1) -> list[SearchResult]:
    ns = range(n_from, n_to + 1)
    if jobs <= 1:
        return [best_in_rn(n, objective) for n in ns]
    from concurrent.futures import ProcessPoolExecutor
    from functools import partial

    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(partial(best_in_rn, objective=objective), ns, chunksize=64))


def make_table(n_from: int, n_to: int, objective: Objective = "perimeter", jobs: int = 1) -> list[TableRow]:
    if not 1 <= n_from <= n_to:
        raise ValueError("need 1 <= n_from <= n_to")
    rows: list[TableRow] = []
    for res in _search_range(n_from, n_to, objective, jobs):
        rows.extend(rows_for(res))
    return rows


def dimorphism_hybrid_scan(n_to: int, jobs: int = 1) -> list[tuple[int, list[RnTuple]]]:
    if n_to < 1:
        raise ValueError("n_to >= 1 required")
    return [
        (res.n, list(res.reported))
        for res in _search_range(1, n_to, "perimeter", jobs)
        if res.dimorphic or res.hybrid
    ]


def tuple_to_packing(t: RnTuple):
    """Canonical witness geometry for a tuple.

    Hexagonal rows are laid bottom-up, alternately offset; with
    ``hminus = k`` the short rows are the 2nd, 4th, ..., with ``hminus = k+1``
    (odd ``h``) the 1st, 3rd, ....  Square rows sit on top with the short
    ones uppermost.  The ``v`` holes are the right-hand ends of the top ``v``
    rows.
    """
    from .geom import Packing, inflate_to_feasible

    if not is_valid(t):
        raise ValueError(f"invalid tuple {t}")
    w, h, hm, s, sm, v = t
    width_q, height_q = tuple_dims(t)
    rows: list[list[tuple[float, float]]] = []
    short_parity = None
    if hm:
        short_parity = 1 if hm == h // 2 else 0
    for i in range(h):
        y = 1.0 + i * SQRT3
        if short_parity is None:
            xs = [1.0 + 2 * j + (i % 2) for j in range(w)]
        elif i % 2 == short_parity:
            xs = [2.0 + 2 * j for j in range(w - 1)]
        else:
            xs = [1.0 + 2 * j for j in range(w)]
        rows.append([(x, y) for x in xs])
    base = 0.0 if h == 0 else 2.0 + (h - 1) * SQRT3
    for j in range(s):
        y = base + 1.0 + 2 * j
        count = w - 1 if j >= s - sm else w
        rows.append([(1.0 + 2 * k, y) for k in range(count)])
    for r in range(len(rows) - v, len(rows)):
        rows[r] = rows[r][:-1]
    centers = np.array([p for row in rows for p in row], dtype=float).reshape(-1, 2)
    c, W, H = inflate_to_feasible(centers, q3_to_real(width_q), q3_to_real(height_q))
    return Packing(W, H, c, provenance="constructed", meta={"tuple": list(t)})
