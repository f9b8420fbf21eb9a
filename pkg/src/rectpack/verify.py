"""Record bookkeeping, non-regularity certificates, sequences and the Oler bound."""
from __future__ import annotations

import csv
import io as _io
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

from .exact import Q3, q3_to_real
from .geom import Packing, check_feasible
from .io import atomic_write_text, packing_from_dict, packing_to_json
from .restricted import best_in_rn

SOURCES = ("restricted", "improved", "compacted", "solved")
STRICT_TOL = 1e-6  # "strictly below" margin for certificates
MONOTONE_TOL = 1e-9
CONSISTENCY_TOL = 1e-9
ENV_RECORDS_DIR = "RECTPACK_RECORDS_DIR"


@dataclass(frozen=True)
class Record:
    n: int
    perimeter: float
    source: str
    packing: Packing | None = None
    exact_value: Q3 | None = None

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")
        if self.packing is not None:
            if self.packing.n != self.n:
                raise ValueError(f"record for n={self.n} holds {self.packing.n} circles")
            if abs(self.packing.perimeter - self.perimeter) > CONSISTENCY_TOL:
                raise ValueError(
                    f"perimeter {self.perimeter!r} disagrees with packing ({self.packing.perimeter!r})"
                )

    def to_json(self) -> dict:
        out = {"n": self.n, "perimeter": self.perimeter, "source": self.source}
        if self.exact_value is not None:
            out["exact_value"] = self.exact_value.to_json()
            out["exact_str"] = str(self.exact_value)
        return out


def _value(r) -> float:
    return r.perimeter if isinstance(r, Record) else float(r)


# ---------------------------------------------------------------------------
# record store


def records_dir(path: str | os.PathLike | None = None) -> Path:
    if path is not None:
        return Path(path)
    return Path(os.environ.get(ENV_RECORDS_DIR, "records"))


class RecordStore:
    """One ``n{n}.json`` per size plus ``index.csv``; every write is atomic."""

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = records_dir(path)

    def _file(self, n: int) -> Path:
        return self.path / f"n{n}.json"

    def get(self, n: int) -> Record | None:
        f = self._file(n)
        if not f.exists():
            return None
        doc = json.loads(f.read_text())
        pk = packing_from_dict(doc["packing"]) if doc.get("packing") else None
        exact = Q3.from_json(doc["exact_value"]) if doc.get("exact_value") else None
        return Record(doc["n"], float(doc["perimeter"]), doc["source"], pk, exact)

    def all(self) -> dict[int, Record]:
        out = {}
        if self.path.is_dir():
            for f in sorted(self.path.glob("n*.json")):
                try:
                    n = int(f.stem[1:])
                except ValueError:
                    continue
                rec = self.get(n)
                if rec is not None:
                    out[n] = rec
        return dict(sorted(out.items()))

    def offer(self, rec: Record) -> bool:
        """Store ``rec`` if it beats the current record; True when it did."""
        if rec.packing is not None:
            rep = check_feasible(rec.packing)
            if not rep.ok:
                raise ValueError(f"infeasible witness for n={rec.n} (worst {rep.worst:.3g})")
        cur = self.get(rec.n)
        if cur is not None and not rec.perimeter < cur.perimeter:
            return False
        doc = rec.to_json()
        body = json.dumps(doc, indent=1)
        if rec.packing is not None:
            body = body[:-2] + ',\n "packing": ' + packing_to_json(rec.packing).strip() + "\n}"
        atomic_write_text(self._file(rec.n), body + "\n")
        self._write_index()
        return True

    def _write_index(self) -> None:
        buf = _io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "perimeter", "source"])
        for n, r in self.all().items():
            w.writerow([n, repr(r.perimeter), r.source])
        atomic_write_text(self.path / "index.csv", buf.getvalue())


# ---------------------------------------------------------------------------
# merged record values


def restricted_records(n_to: int, n_from: int = 1) -> dict[int, Record]:
    out = {}
    for n in range(n_from, n_to + 1):
        res = best_in_rn(n)
        out[n] = Record(n, res.value_float, "restricted", exact_value=res.value)
    return out


def improved_records(n_to: int) -> dict[int, Record]:
    """Values obtained by applying the known width reduction to the R_n optimum."""
    from .improve import KNOWN_DELTA_INDEX, perimeter_after_improvement

    out = {}
    for n, i in sorted(KNOWN_DELTA_INDEX.items()):
        if n <= n_to:
            out[n] = Record(n, perimeter_after_improvement(best_in_rn(n).value, i), "improved")
    return out


def solved_records(n_to: int) -> dict[int, Record]:
    """Irregular and found packings re-solved from their shipped bond graphs."""
    from .improve import FOUND_SIZES, IRREGULAR_SIZES, solve_found, solve_irregular

    out = {}
    for sizes, solve in ((IRREGULAR_SIZES, solve_irregular), (FOUND_SIZES, solve_found)):
        for n in sizes:
            if n <= n_to:
                p = solve(n)
                out[n] = Record(n, p.perimeter, "solved", p.replace(provenance="solved"))
    return out


def merge(*sources: Mapping[int, Record | float]) -> dict[int, Record | float]:
    """Lowest value per n wins; provenance stays with the winning entry."""
    out: dict[int, Record | float] = {}
    for src in sources:
        for n, r in src.items():
            if n not in out or _value(r) < _value(out[n]):
                out[n] = r
    return dict(sorted(out.items()))


def merged_records(n_to: int, store: RecordStore | None = None) -> dict[int, Record | float]:
    parts = [restricted_records(n_to), improved_records(n_to), solved_records(n_to)]
    if store is not None:
        parts.append({n: r for n, r in store.all().items() if n <= n_to})
    return merge(*parts)


# ---------------------------------------------------------------------------
# checks


def records_monotone(records: Mapping[int, Record | float], tol: float = MONOTONE_TOL) -> list[int]:
    """Sizes n with best(n) > best(n+1) + tol.

    Removing a circle keeps a packing feasible, so a violation means either a
    bug or a record at n that can be improved from the one at n+1.
    """
    ns = sorted(records)
    if ns and ns != list(range(ns[0], ns[-1] + 1)):
        raise ValueError("records must cover a contiguous range of n")
    return [n for n in ns[:-1] if _value(records[n]) > _value(records[n + 1]) + tol]


@dataclass(frozen=True)
class Certificate:
    n: int
    regular_possible: bool
    reason: str


def nonregular_certificate(n: int, records: Mapping[int, Record | float] | None = None) -> Certificate:
    """Decide whether an optimal packing of n circles can be regular."""
    res = best_in_rn(n)
    holed = [t for t in res.minimizers if t.v >= 1]
    if holed:
        return Certificate(n, False, f"R_n minimizer {tuple(holed[0])} has {holed[0].v} hole(s)")
    bound = res.value_float
    if records and n in records:
        r = records[n]
        if _value(r) < bound - STRICT_TOL:
            src = r.source if isinstance(r, Record) else "record"
            return Certificate(
                n, False, f"{src} packing with P={_value(r):.12g} beats the R_n optimum {bound:.12g}"
            )
    return Certificate(n, True, f"R_n optimum {res.value} is attained by a regular pattern")


def irregular_candidates(k_max: int) -> list[int]:
    if k_max < 3:
        raise ValueError("k_max >= 3 required")
    return [k * (k + 1) + 1 for k in range(3, k_max + 1)]


INT64_MAX = 2**63 - 1


def square_pairs(k_max: int) -> list[tuple[int, int]]:
    """The recurrences a, b with a_{k+2} = 4 a_{k+1} - a_k (alternate convergents of 1/sqrt 3)."""
    if k_max < 1:
        raise ValueError("k_max >= 1 required")
    a, b = [1, 3], [1, 5]
    while len(a) < k_max:
        a.append(4 * a[-1] - a[-2])
        b.append(4 * b[-1] - b[-2])
    return list(zip(a[:k_max], b[:k_max]))


def square_sequence(k_max: int) -> list[int]:
    """Sizes whose restricted optimum is almost exactly square."""
    out = []
    for a, b in square_pairs(k_max):
        n = (a + 1) * (b + 1) // 2
        if n > INT64_MAX:
            raise OverflowError(f"sequence term exceeds 64-bit range at k={len(out) + 1}")
        out.append(n)
    return out


@dataclass(frozen=True)
class OlerBound:
    m: float
    epsilon_max: float
    ls_bound: float


def oler_epsilon_bound(m: float) -> OlerBound:
    """How far an optimal rectangle of half-perimeter 2m can be from a square.

    Sides are ``m + eps`` and ``m - eps``; comparing the upper bound on the
    number of points it holds with the lower bound for the ``m`` square gives
    ``eps <= sqrt((sqrt 3 / 2)(2m + 1))``.
    """
    if not m > 0:
        raise ValueError("m > 0 required")
    eps = math.sqrt(math.sqrt(3.0) / 2.0 * (2.0 * m + 1.0))
    if m <= eps:
        raise ValueError(f"bound is vacuous for m={m}: epsilon bound {eps:.6g} >= m")
    return OlerBound(m, eps, (m + eps) / (m - eps))


def oler_packing_bound(area: float, perimeter: float) -> float:
    """Upper bound on how many points at mutual distance >= 1 fit in a convex set."""
    if area < 0 or perimeter < 0:
        raise ValueError("area and perimeter must be non-negative")
    return 2.0 / math.sqrt(3.0) * area + perimeter / 2.0 + 1.0


def square_point_lower_bound(side: float) -> float:
    return 2.0 / math.sqrt(3.0) * side * side


def record_table(records: Mapping[int, Record | float]) -> list[dict]:
    rows = []
    for n, r in records.items():
        if isinstance(r, Record):
            rows.append({"n": n, "perimeter": r.perimeter, "source": r.source})
        else:
            rows.append({"n": n, "perimeter": float(r), "source": "value"})
    return rows


def as_float_map(records: Iterable[tuple[int, float]]) -> dict[int, float]:
    return {int(n): float(v) for n, v in records}


def restricted_value(n: int) -> float:
    return q3_to_real(best_in_rn(n).value)
