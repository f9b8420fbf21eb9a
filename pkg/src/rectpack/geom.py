"""Concrete packing geometry in radius units (every circle has radius 1)."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator, Literal

import numpy as np

Wall = Literal["left", "right", "bottom", "top"]
WALLS: tuple[Wall, ...] = ("left", "right", "bottom", "top")

FEASIBILITY_TOL = 1e-9
BOND_TOL = 1e-7


@dataclass(frozen=True)
class BondGraph:
    """Declared exact contacts: circle pairs ``(i, j)`` with ``i < j`` and wall contacts."""

    circle_pairs: tuple[tuple[int, int], ...] = ()
    wall_contacts: tuple[tuple[int, Wall], ...] = ()

    def __post_init__(self):
        pairs = tuple(sorted({(min(i, j), max(i, j)) for i, j in self.circle_pairs}))
        if any(i == j for i, j in pairs):
            raise ValueError("a circle cannot bond to itself")
        walls = tuple(sorted(set((int(i), w) for i, w in self.wall_contacts)))
        for _, w in walls:
            if w not in WALLS:
                raise ValueError(f"unknown wall {w!r}")
        object.__setattr__(self, "circle_pairs", pairs)
        object.__setattr__(self, "wall_contacts", walls)

    def __len__(self) -> int:
        return len(self.circle_pairs) + len(self.wall_contacts)

    def validate(self, n: int) -> None:
        for i, j in self.circle_pairs:
            if not 0 <= i < j < n:
                raise ValueError(f"bond ({i}, {j}) out of range for n={n}")
        for i, _ in self.wall_contacts:
            if not 0 <= i < n:
                raise ValueError(f"wall contact of circle {i} out of range for n={n}")

    def issubset(self, other: BondGraph) -> bool:
        return set(self.circle_pairs) <= set(other.circle_pairs) and set(
            self.wall_contacts
        ) <= set(other.wall_contacts)

    def contacts_of(self, i: int) -> list[int | Wall]:
        out: list[int | Wall] = [b if a == i else a for a, b in self.circle_pairs if i in (a, b)]
        out += [w for k, w in self.wall_contacts if k == i]
        return out

    def to_json(self) -> dict:
        return {
            "pairs": [list(p) for p in self.circle_pairs],
            "walls": [[i, w] for i, w in self.wall_contacts],
        }

    @classmethod
    def from_json(cls, data: dict) -> BondGraph:
        return cls(
            tuple((int(i), int(j)) for i, j in data.get("pairs", [])),
            tuple((int(i), str(w)) for i, w in data.get("walls", [])),
        )


@dataclass(frozen=True, eq=False)
class Packing:
    width: float
    height: float
    centers: np.ndarray
    bonds: BondGraph | None = None
    provenance: str = "constructed"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.array(self.centers, dtype=float).reshape(-1, 2)
        c.setflags(write=False)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "width", float(self.width))
        object.__setattr__(self, "height", float(self.height))

    @property
    def n(self) -> int:
        return len(self.centers)

    @property
    def perimeter(self) -> float:
        return 2.0 * (self.width + self.height)

    def replace(self, **changes) -> Packing:
        kw = dict(
            width=self.width,
            height=self.height,
            centers=self.centers,
            bonds=self.bonds,
            provenance=self.provenance,
            meta=dict(self.meta),
        )
        kw.update(changes)
        return Packing(**kw)

    def transposed(self) -> Packing:
        """Swap the roles of x and y (and of the wall names)."""
        swap = {"left": "bottom", "bottom": "left", "right": "top", "top": "right"}
        bonds = None
        if self.bonds is not None:
            bonds = BondGraph(
                self.bonds.circle_pairs, tuple((i, swap[w]) for i, w in self.bonds.wall_contacts)
            )
        return self.replace(width=self.height, height=self.width, centers=self.centers[:, ::-1], bonds=bonds)


def close_pairs(centers: np.ndarray, cutoff: float) -> Iterator[tuple[int, int, float]]:
    """Yield ``(i, j, distance)`` for all pairs closer than ``cutoff``.

    Uses a uniform grid of cell size ``max(cutoff, 2)`` so jammed packings
    are handled in linear time.
    """
    n = len(centers)
    if n < 2:
        return
    cell = max(cutoff, 2.0)
    keys = np.floor(centers / cell).astype(np.int64)
    buckets: dict[tuple[int, int], list[int]] = defaultdict(list)
    for idx, (kx, ky) in enumerate(keys):
        buckets[(int(kx), int(ky))].append(idx)
    cut2 = cutoff * cutoff
    for (kx, ky), members in buckets.items():
        for dx, dy in ((0, 0), (1, -1), (1, 0), (1, 1), (0, 1)):
            other = buckets.get((kx + dx, ky + dy))
            if other is None:
                continue
            for a in members:
                pa = centers[a]
                for b in other:
                    if dx == 0 and dy == 0 and b <= a:
                        continue
                    diff = centers[b] - pa
                    d2 = diff[0] * diff[0] + diff[1] * diff[1]
                    if d2 < cut2:
                        i, j = (a, b) if a < b else (b, a)
                        yield i, j, math.sqrt(d2)


@dataclass
class FeasibilityReport:
    ok: bool
    overlaps: list[tuple[int, int, float]]
    outside: list[tuple[int, Wall, float]]

    @property
    def violations(self) -> list:
        return [("overlap", i, j, d) for i, j, d in self.overlaps] + [
            ("outside", i, w, g) for i, w, g in self.outside
        ]

    @property
    def worst(self) -> float:
        """Largest violation magnitude (0 when feasible)."""
        vals = [2.0 - d for _, _, d in self.overlaps] + [-g for _, _, g in self.outside]
        return max(vals, default=0.0)


def wall_gaps(p: Packing) -> np.ndarray:
    """Slack of every circle against the four walls, shape ``(n, 4)``."""
    c = p.centers
    return np.stack(
        [c[:, 0] - 1.0, p.width - 1.0 - c[:, 0], c[:, 1] - 1.0, p.height - 1.0 - c[:, 1]], axis=1
    )


def check_feasible(p: Packing, tol: float = FEASIBILITY_TOL) -> FeasibilityReport:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    limit = 2.0 - tol
    overlaps = []
    for i, j, _ in close_pairs(p.centers, 2.0):
        diff = p.centers[j] - p.centers[i]
        d2 = diff[0] * diff[0] + diff[1] * diff[1]
        if d2 < limit * limit:
            overlaps.append((i, j, math.sqrt(d2)))
    outside = []
    gaps = wall_gaps(p)
    for i, k in zip(*np.nonzero(gaps < -tol)):
        outside.append((int(i), WALLS[k], float(gaps[i, k])))
    return FeasibilityReport(not overlaps and not outside, overlaps, outside)


@dataclass(frozen=True)
class Measurement:
    W: float
    H: float
    P: float
    L_over_S: float
    density: float
    # box spanned by the centres, W - 2 by H - 2, and its side ratio
    core_W: float = 0.0
    core_H: float = 0.0
    core_L_over_S: float = 1.0

    def to_json(self) -> dict:
        return dict(self.__dict__)


def measure(p: Packing) -> Measurement:
    W, H = p.width, p.height
    cw, ch = W - 2.0, H - 2.0
    core_ratio = max(cw, ch) / min(cw, ch) if min(cw, ch) > 0 else math.inf
    return Measurement(
        W, H, 2.0 * (W + H), max(W, H) / min(W, H), p.n * math.pi / (W * H), cw, ch, core_ratio
    )


def extract_bonds(p: Packing, tol: float = BOND_TOL) -> BondGraph:
    pairs = [(i, j) for i, j, d in close_pairs(p.centers, 2.0 + tol) if abs(d - 2.0) <= tol]
    gaps = wall_gaps(p)
    walls = [(int(i), WALLS[k]) for i, k in zip(*np.nonzero(np.abs(gaps) <= tol))]
    return BondGraph(tuple(pairs), tuple(walls))


_WALL_NORMAL = {"left": (-1.0, 0.0), "right": (1.0, 0.0), "bottom": (0.0, -1.0), "top": (0.0, 1.0)}


def _immobilized(normals: list[tuple[float, float]], eps: float = 1e-9) -> bool:
    """True iff the unit normals positively span the plane.

    Equivalently no direction makes a non-positive dot product with every
    normal, i.e. the normals do not fit in any closed half-plane.  Checked by
    the largest angular gap between consecutive normals being below pi.
    """
    if len(normals) < 3:
        return False
    ang = sorted(math.atan2(y, x) for x, y in normals)
    gaps = [b - a for a, b in zip(ang, ang[1:])] + [ang[0] + 2 * math.pi - ang[-1]]
    return max(gaps) < math.pi - eps


def detect_rattlers(
    p: Packing, tol: float = BOND_TOL, bonds: BondGraph | None = None, fixed=frozenset()
) -> set[int]:
    """Circles that cannot be held in place to first order by their contacts.

    Contacts with circles already found to be rattlers do not count, so the
    test is repeated until no new rattler appears.  Circles in ``fixed`` are
    treated as immovable and never reported.
    """
    if bonds is None:
        bonds = p.bonds if p.bonds is not None else extract_bonds(p, tol)
    c = p.centers
    rattlers: set[int] = set()
    while True:
        new = set()
        for i in range(p.n):
            if i in rattlers or i in fixed:
                continue
            normals = []
            for other in bonds.contacts_of(i):
                if isinstance(other, str):
                    normals.append(_WALL_NORMAL[other])
                elif other not in rattlers:
                    d = c[other] - c[i]
                    norm = math.hypot(d[0], d[1])
                    normals.append((d[0] / norm, d[1] / norm))
            if not _immobilized(normals):
                new.add(i)
        if not new:
            return rattlers
        rattlers |= new


def inflate_to_feasible(centers: np.ndarray, width: float | None = None, height: float | None = None):
    """Scale an almost-feasible arrangement about the lower-left corner until
    every pair is at distance >= 2 in floating point, then grow the container
    just enough to hold it.

    Returns ``(centers, width, height)``.  Positions are first clamped to the
    ``x, y >= 1`` region.
    """
    c = np.maximum(np.asarray(centers, dtype=float), 1.0)
    bump = 1e-15
    for _ in range(60):
        d2min = min(((c[j] - c[i]) @ (c[j] - c[i]) for i, j, _ in close_pairs(c, 2.0)), default=4.0)
        if d2min >= 4.0:
            break
        c = 1.0 + (c - 1.0) * (math.sqrt(4.0 / d2min) + bump)
        bump *= 2.0
    else:
        raise RuntimeError("could not separate circles")
    w = float(np.max(c[:, 0])) + 1.0 if len(c) else 2.0
    h = float(np.max(c[:, 1])) + 1.0 if len(c) else 2.0
    if width is not None:
        w = max(w, width)
    if height is not None:
        h = max(h, height)
    # guard the wall check against rounding in ``width - 1``
    while np.any(w - 1.0 - c[:, 0] < 0):
        w = np.nextafter(w, np.inf)
    while np.any(h - 1.0 - c[:, 1] < 0):
        h = np.nextafter(h, np.inf)
    return c, float(w), float(h)
