"""Newton solver for bond-graph contact systems.

Every declared bond is an equation: ``|c_i - c_j|^2 = 4`` for a circle
pair, ``x_i = 1`` / ``x_i = W - 1`` / ``y_i = 1`` / ``y_i = H - 1`` for a wall
contact.  Unknowns are the centres of the non-pinned circles (all x, then
all y) followed by whichever of ``W``, ``H`` are free.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geom import WALLS, BondGraph, Packing, close_pairs, wall_gaps

RESIDUAL_TOL = 1e-12
MAX_ITER = 200


class SolverError(RuntimeError):
    pass


class SingularSystem(SolverError):
    def __init__(self, message: str, deficient: list[str]):
        super().__init__(message)
        self.deficient = deficient


class Divergence(SolverError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class ContactSystem:
    n: int
    bonds: BondGraph
    free_width: bool = True
    free_height: bool = True
    width: float | None = None
    height: float | None = None
    pinned: tuple[int, ...] = ()
    rattlers: tuple[int, ...] = ()

    def __post_init__(self):
        self.bonds.validate(self.n)
        if not self.free_width and self.width is None:
            raise ValueError("a fixed width needs a value")
        if not self.free_height and self.height is None:
            raise ValueError("a fixed height needs a value")
        object.__setattr__(self, "pinned", tuple(sorted(set(self.pinned))))
        object.__setattr__(self, "rattlers", tuple(sorted(set(self.rattlers))))

    @property
    def moving(self) -> list[int]:
        """Circles whose centres are unknowns."""
        skip = set(self.pinned) | set(self.rattlers)
        return [i for i in range(self.n) if i not in skip]

    @property
    def n_unknowns(self) -> int:
        return 2 * len(self.moving) + int(self.free_width) + int(self.free_height)

    @property
    def n_equations(self) -> int:
        return len(_equations(self))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "bonds": self.bonds.to_json(),
            "free_width": self.free_width,
            "free_height": self.free_height,
            "width": self.width,
            "height": self.height,
            "pinned": list(self.pinned),
            "rattlers": list(self.rattlers),
        }

    @classmethod
    def from_json(cls, data: dict) -> ContactSystem:
        return cls(
            n=int(data["n"]),
            bonds=BondGraph.from_json(data["bonds"]),
            free_width=bool(data.get("free_width", True)),
            free_height=bool(data.get("free_height", True)),
            width=data.get("width"),
            height=data.get("height"),
            pinned=tuple(data.get("pinned", ())),
            rattlers=tuple(data.get("rattlers", ())),
        )


def _equations(sys: ContactSystem) -> list[tuple]:
    """Equations that involve at least one unknown, in a fixed order."""
    moving = set(sys.moving)
    eqs: list[tuple] = []
    for i, j in sys.bonds.circle_pairs:
        if i in moving or j in moving:
            eqs.append(("pair", i, j))
    for i, w in sys.bonds.wall_contacts:
        if i in moving or (w == "right" and sys.free_width) or (w == "top" and sys.free_height):
            eqs.append(("wall", i, w))
    return eqs


def describe(eq: tuple) -> str:
    return f"{eq[1]}-{eq[2]}" if eq[0] == "pair" else f"{eq[1]}-{eq[2]}wall"


class _Layout:
    def __init__(self, sys: ContactSystem, init: Packing):
        self.sys = sys
        self.moving = sys.moving
        self.m = len(self.moving)
        self.index = {c: k for k, c in enumerate(self.moving)}
        self.base = np.array(init.centers, dtype=float)
        self.width = init.width if sys.width is None else sys.width
        self.height = init.height if sys.height is None else sys.height
        self.eqs = _equations(sys)
        self.wcol = 2 * self.m if sys.free_width else None
        self.hcol = 2 * self.m + int(sys.free_width) if sys.free_height else None

    def pack(self) -> np.ndarray:
        z = [self.base[self.moving, 0], self.base[self.moving, 1]]
        dims = []
        if self.sys.free_width:
            dims.append(self.width)
        if self.sys.free_height:
            dims.append(self.height)
        return np.concatenate(z + [np.array(dims)])

    def unpack(self, z: np.ndarray) -> tuple[np.ndarray, float, float]:
        c = self.base.copy()
        c[self.moving, 0] = z[: self.m]
        c[self.moving, 1] = z[self.m : 2 * self.m]
        W = z[self.wcol] if self.wcol is not None else self.width
        H = z[self.hcol] if self.hcol is not None else self.height
        return c, float(W), float(H)

    def residuals(self, z: np.ndarray) -> np.ndarray:
        c, W, H = self.unpack(z)
        r = np.empty(len(self.eqs))
        for k, eq in enumerate(self.eqs):
            if eq[0] == "pair":
                d = c[eq[1]] - c[eq[2]]
                r[k] = d @ d - 4.0
            else:
                i, w = eq[1], eq[2]
                r[k] = {
                    "left": c[i, 0] - 1.0,
                    "right": W - 1.0 - c[i, 0],
                    "bottom": c[i, 1] - 1.0,
                    "top": H - 1.0 - c[i, 1],
                }[w]
        return r

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        c, _, _ = self.unpack(z)
        m = self.m
        J = np.zeros((len(self.eqs), len(z)))
        for k, eq in enumerate(self.eqs):
            if eq[0] == "pair":
                i, j = eq[1], eq[2]
                d = c[i] - c[j]
                if i in self.index:
                    J[k, self.index[i]] = 2 * d[0]
                    J[k, m + self.index[i]] = 2 * d[1]
                if j in self.index:
                    J[k, self.index[j]] = -2 * d[0]
                    J[k, m + self.index[j]] = -2 * d[1]
            else:
                i, w = eq[1], eq[2]
                ki = self.index.get(i)
                if w == "left" and ki is not None:
                    J[k, ki] = 1.0
                elif w == "right":
                    if ki is not None:
                        J[k, ki] = -1.0
                    if self.wcol is not None:
                        J[k, self.wcol] = 1.0
                elif w == "bottom" and ki is not None:
                    J[k, m + ki] = 1.0
                elif w == "top":
                    if ki is not None:
                        J[k, m + ki] = -1.0
                    if self.hcol is not None:
                        J[k, self.hcol] = 1.0
        return J

    def unknown_names(self) -> list[str]:
        names = [f"x{c}" for c in self.moving] + [f"y{c}" for c in self.moving]
        if self.sys.free_width:
            names.append("W")
        if self.sys.free_height:
            names.append("H")
        return names


def contact_residuals(sys: ContactSystem, p: Packing) -> np.ndarray:
    lay = _Layout(sys, p)
    return lay.residuals(lay.pack())


def contact_jacobian(sys: ContactSystem, p: Packing) -> np.ndarray:
    lay = _Layout(sys, p)
    return lay.jacobian(lay.pack())


def system_functions(sys: ContactSystem, p: Packing):
    """``(z0, residual(z), jacobian(z), unpack(z))`` for external checks."""
    lay = _Layout(sys, p)
    return lay.pack(), lay.residuals, lay.jacobian, lay.unpack


@dataclass
class SolveInfo:
    iterations: int
    residual: float
    rank: int
    n_equations: int
    n_unknowns: int
    redundant: int = field(default=0)


def _deficiency(lay: _Layout, J: np.ndarray) -> list[str]:
    """Names of unknowns and equations spanning the null space of ``J``."""
    _, sv, vt = np.linalg.svd(J)
    rank = int(np.sum(sv > sv[0] * 1e-10)) if len(sv) else 0
    null = vt[rank:]
    names = lay.unknown_names()
    weight = np.abs(null).sum(axis=0) if len(null) else np.zeros(J.shape[1])
    loose = [names[k] for k in np.argsort(-weight) if weight[k] > 1e-6]
    return loose


def solve_contacts(
    sys: ContactSystem, initial: Packing, tol: float = RESIDUAL_TOL, max_iter: int = MAX_ITER
) -> tuple[Packing, SolveInfo]:
    """Damped Gauss-Newton with step halving on the bond equations.

    Raises :class:`SingularSystem` when the bonds leave some unknown
    undetermined and :class:`Divergence` when the residual does not fall
    below ``tol`` within ``max_iter`` iterations.
    """
    if initial.n != sys.n:
        raise ValueError("initial packing has the wrong number of circles")
    lay = _Layout(sys, initial)
    z = lay.pack()
    n_unknowns = len(z)
    r = lay.residuals(z)
    J = lay.jacobian(z)
    if len(r) < n_unknowns or np.linalg.matrix_rank(J) < n_unknowns:
        raise SingularSystem(
            f"bond system is under-determined: {len(r)} equations, {n_unknowns} unknowns",
            _deficiency(lay, J),
        )
    norm = float(np.max(np.abs(r))) if len(r) else 0.0
    it = 0
    while norm > tol and it < max_iter:
        it += 1
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        lam = 1.0
        while lam > 1e-6:
            z_new = z + lam * step
            r_new = lay.residuals(z_new)
            new_norm = float(np.max(np.abs(r_new)))
            if new_norm < norm or new_norm <= tol:
                break
            lam *= 0.5
        else:
            raise Divergence(f"step halving failed at residual {norm:.3e}", norm)
        z, r, norm = z_new, r_new, new_norm
        J = lay.jacobian(z)
    if norm > tol:
        raise Divergence(f"no convergence after {max_iter} iterations, residual {norm:.3e}", norm)
    rank = int(np.linalg.matrix_rank(J))
    if rank < n_unknowns:
        raise SingularSystem("Jacobian singular at the solution", _deficiency(lay, J))
    c, W, H = lay.unpack(z)
    out = Packing(W, H, c, bonds=sys.bonds, provenance="solved", meta=dict(initial.meta))
    if sys.rattlers:
        out = place_rattlers(out, sys.rattlers)
    info = SolveInfo(it, norm, rank, len(r), n_unknowns, len(r) - rank)
    return out, info


def place_rattlers(p: Packing, rattlers) -> Packing:
    """Move each rattler to the point of its cage with the largest clearance."""
    from scipy.optimize import minimize

    c = np.array(p.centers)
    for i in rattlers:
        others = np.delete(c, i, axis=0)

        def clearance(q):
            d = np.sqrt(((others - q) ** 2).sum(axis=1)) - 2.0
            walls = np.array([q[0] - 1, p.width - 1 - q[0], q[1] - 1, p.height - 1 - q[1]])
            return np.concatenate([d, walls])

        def neg_min(q):
            return -np.min(clearance(q))

        res = minimize(neg_min, c[i], method="Nelder-Mead", options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 4000})
        if -res.fun > -np.min(clearance(c[i])):
            c[i] = res.x
    return p.replace(centers=c)


def nonbond_slack(p: Packing, bonds: BondGraph, skip: set[int] = frozenset()) -> float:
    """Smallest gap among circle pairs and wall contacts not declared as bonds."""
    declared = set(bonds.circle_pairs)
    slack = np.inf
    for i, j, d in close_pairs(p.centers, 2.5):
        if (i, j) not in declared and i not in skip and j not in skip:
            slack = min(slack, d - 2.0)
    walls = set(bonds.wall_contacts)
    gaps = wall_gaps(p)
    for i in range(p.n):
        if i in skip:
            continue
        for k, w in enumerate(WALLS):
            if (i, w) not in walls:
                slack = min(slack, gaps[i, k])
    return float(slack)


def bond_residual(p: Packing, bonds: BondGraph) -> float:
    """Largest violation of the declared bonds as distances."""
    worst = 0.0
    c = p.centers
    for i, j in bonds.circle_pairs:
        worst = max(worst, abs(float(np.hypot(*(c[i] - c[j]))) - 2.0))
    gaps = wall_gaps(p)
    for i, w in bonds.wall_contacts:
        worst = max(worst, abs(gaps[i, WALLS.index(w)]))
    return worst
