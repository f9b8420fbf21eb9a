"""Stochastic compaction of n unit disks in a rectangle with free aspect ratio.

Each run starts from a sparse random arrangement and repeatedly solves a
small nonlinear program: minimise W + H with every centre allowed to move at
most ``shrink_rate`` from where it is.  Every accepted state is pushed back to
exact floating-point feasibility, so no overlap is ever stored, and the
perimeter can only go down.  A run stops when a sweep gains less than
``stall_tolerance`` (relative) or the step budget runs out.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import linprog, minimize

from .geom import Packing, check_feasible, close_pairs, extract_bonds, inflate_to_feasible

PACKING_LIMIT = math.pi / (2 * math.sqrt(3))  # hexagonal density, 0.9069
GENERATOR = "numpy.random.PCG64"


@dataclass(frozen=True)
class CompactorParams:
    seed: int = 0
    initial_fill: float = 0.35
    shrink_rate: float = 0.5  # largest centre displacement per sweep, in radii
    max_steps: int = 200
    stall_tolerance: float = 1e-12
    restarts: int = 1
    aspect_every: int = 50
    jobs: int = 1

    def __post_init__(self):
        if not 0 < self.initial_fill < PACKING_LIMIT:
            raise ValueError(f"initial_fill must lie in (0, {PACKING_LIMIT:.4f})")
        if self.shrink_rate <= 0:
            raise ValueError("shrink_rate must be positive")
        if self.stall_tolerance <= 0:
            raise ValueError("stall_tolerance must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.aspect_every < 1 or self.jobs < 1:
            raise ValueError("aspect_every and jobs must be at least 1")


@dataclass
class RunRecord:
    n: int
    best_perimeter: float
    best_packing: Packing
    attempts: int
    seed_of_best: int
    generator: str = GENERATOR
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "best_perimeter": self.best_perimeter,
            "attempts": self.attempts,
            "seed_of_best": self.seed_of_best,
            "generator": self.generator,
            "params": self.params,
            "converged": bool(self.best_packing.meta.get("converged", True)),
        }


# ---------------------------------------------------------------------------
# starting configurations


def random_start(n: int, seed: int, fill: float = 0.35, max_tries: int = 20) -> Packing:
    """Rejection-sample ``n`` disjoint unit disks in a box of the given density."""
    if n < 1:
        raise ValueError("n >= 1 required")
    if not 0 < fill < PACKING_LIMIT:
        raise ValueError(f"fill must lie in (0, {PACKING_LIMIT:.4f})")
    rng = np.random.default_rng(seed)
    aspect = math.exp(rng.uniform(math.log(0.5), math.log(2.0)))
    area = n * math.pi / fill
    for attempt in range(max_tries):
        W = max(2.0, math.sqrt(area * aspect))
        H = max(2.0, area / W)
        pts = np.empty((n, 2))
        k = 0
        misses = 0
        while k < n and misses < 2000 * n:
            q = rng.uniform((1.0, 1.0), (W - 1.0, H - 1.0)) if W > 2 and H > 2 else np.array(
                [rng.uniform(1.0, max(1.0, W - 1.0)), rng.uniform(1.0, max(1.0, H - 1.0))]
            )
            if k == 0 or np.min(np.sum((pts[:k] - q) ** 2, axis=1)) >= 4.0:
                pts[k] = q
                k += 1
            else:
                misses += 1
        if k == n:
            return Packing(W, H, pts, provenance="compacted", meta={"seed": int(seed), "fill": fill})
        area *= 1.25  # too tight for rejection sampling; loosen and retry
    raise RuntimeError(f"could not place {n} circles at fill {fill}; try a lower initial_fill")


# ---------------------------------------------------------------------------
# one compaction sweep


def _sweep(c: np.ndarray, W: float, H: float, trust: float | None):
    n = len(c)
    reach = 2.0 + (2.0 * trust if trust else max(W, H) * 2)
    pairs = [(i, j) for i, j, _ in close_pairs(c, reach)]
    I = np.array([p[0] for p in pairs], dtype=int)
    J = np.array([p[1] for p in pairs], dtype=int)
    m = len(I)
    rows = np.arange(m)
    k = np.arange(n)
    z0 = np.concatenate([c[:, 0], c[:, 1], [W, H]])

    def cons(z):
        x, y = z[:n], z[n : 2 * n]
        dx, dy = x[I] - x[J], y[I] - y[J]
        return np.concatenate([dx * dx + dy * dy - 4.0, x - 1.0, z[-2] - 1.0 - x, y - 1.0, z[-1] - 1.0 - y])

    def jac(z):
        x, y = z[:n], z[n : 2 * n]
        dx, dy = x[I] - x[J], y[I] - y[J]
        A = np.zeros((m + 4 * n, 2 * n + 2))
        A[rows, I] = 2 * dx
        A[rows, J] = -2 * dx
        A[rows, n + I] = 2 * dy
        A[rows, n + J] = -2 * dy
        A[m + k, k] = 1.0
        A[m + n + k, k] = -1.0
        A[m + n + k, 2 * n] = 1.0
        A[m + 2 * n + k, n + k] = 1.0
        A[m + 3 * n + k, n + k] = -1.0
        A[m + 3 * n + k, 2 * n + 1] = 1.0
        return A

    grad = np.zeros(2 * n + 2)
    grad[-2:] = 1.0
    bounds = None
    if trust:
        bounds = [(v - trust, v + trust) for v in z0[: 2 * n]] + [(2.0, None), (2.0, None)]
    res = minimize(
        lambda z: z[-2] + z[-1],
        z0,
        jac=lambda z: grad,
        constraints=[{"type": "ineq", "fun": cons, "jac": jac}],
        method="SLSQP",
        bounds=bounds,
        options={"maxiter": 500, "ftol": 1e-15},
    )
    z = res.x
    if not np.all(np.isfinite(z)):
        return c, W, H
    return np.stack([z[:n], z[n : 2 * n]], axis=1), z[-2], z[-1]


def _settle(c, W, H, trust):
    """One sweep followed by a repair back to exact feasibility."""
    c2, _, _ = _sweep(c, W, H, trust)
    return inflate_to_feasible(c2)


def compact(p: Packing, params: CompactorParams | None = None, rng: np.random.Generator | None = None) -> Packing:
    """Press the walls inward until the disks jam.

    The returned packing carries ``meta["trace"]`` (perimeter after each
    accepted sweep, non-increasing) and ``meta["converged"]``.
    """
    params = params or CompactorParams()
    rep = check_feasible(p)
    if not rep.ok:
        raise ValueError(f"compact needs a feasible start (worst violation {rep.worst:.3g})")
    rng = rng if rng is not None else np.random.default_rng(params.seed)
    c, W, H = np.array(p.centers, dtype=float), p.width, p.height
    P = 2 * (W + H)
    trace = [P]
    converged = False
    for step in range(params.max_steps):
        c2, W2, H2 = _settle(c, W, H, params.shrink_rate)
        if (step + 1) % params.aspect_every == 0:
            # stretch one way, shrink the other, and keep it only if it pays off
            e = rng.uniform(-0.05, 0.05)
            tc = np.column_stack([1 + (c2[:, 0] - 1) * (1 + e), 1 + (c2[:, 1] - 1) / (1 + e)])
            tc, tW, tH = inflate_to_feasible(tc)
            tc, tW, tH = _settle(tc, tW, tH, params.shrink_rate)
            if tW + tH < W2 + H2:
                c2, W2, H2 = tc, tW, tH
        P2 = 2 * (W2 + H2)
        if not P2 < P:
            converged = True
            break
        gain = (P - P2) / P
        c, W, H, P = c2, W2, H2, P2
        trace.append(P)
        if gain < params.stall_tolerance:
            converged = True
            break
    # a final unrestricted solve settles the last contacts
    c2, W2, H2 = _settle(c, W, H, None)
    if 2 * (W2 + H2) < P:
        c, W, H, P = c2, W2, H2, 2 * (W2 + H2)
        trace.append(P)
    meta = dict(p.meta)
    meta.update(trace=trace, converged=converged, sweeps=len(trace) - 1)
    return Packing(W, H, c, provenance="compacted", meta=meta)


# ---------------------------------------------------------------------------
# jamming


def is_jammed(p: Packing, tol: float = 1e-6) -> bool:
    """True if no first-order motion of the circles and walls lowers the perimeter.

    Contacts are all gaps below ``tol``.  The linear program asks for
    velocities keeping every contact gap non-decreasing while W + H goes
    down; the packing is jammed when the best rate is zero.  Rattlers may
    move freely and do not matter.
    """
    bonds = extract_bonds(p, tol)
    n = p.n
    c = p.centers
    rows = []
    # variables: vx (n), vy (n), dW, dH ; constraints in the form A v <= 0
    for i, j in bonds.circle_pairs:
        d = c[i] - c[j]
        r = np.zeros(2 * n + 2)
        r[i], r[n + i] = -d[0], -d[1]
        r[j], r[n + j] = d[0], d[1]
        rows.append(r)
    for i, w in bonds.wall_contacts:
        r = np.zeros(2 * n + 2)
        if w == "left":
            r[i] = -1.0
        elif w == "bottom":
            r[n + i] = -1.0
        elif w == "right":
            r[i], r[2 * n] = 1.0, -1.0
        else:
            r[n + i], r[2 * n + 1] = 1.0, -1.0
        rows.append(r)
    cost = np.zeros(2 * n + 2)
    cost[-2:] = 1.0
    res = linprog(
        cost,
        A_ub=np.array(rows) if rows else None,
        b_ub=np.zeros(len(rows)) if rows else None,
        bounds=[(-1.0, 1.0)] * (2 * n + 2),
        method="highs",
    )
    return bool(res.status == 0 and res.fun > -1e-9)


# ---------------------------------------------------------------------------
# restart harness


def restart_seeds(seed: int, restarts: int) -> list[int]:
    """Per-restart integer seeds derived from the master seed."""
    return [int(s.generate_state(1, np.uint64)[0] >> np.uint64(1)) for s in np.random.SeedSequence(seed).spawn(restarts)]


def run_once(n: int, seed: int, params: CompactorParams) -> Packing:
    """One restart: random start with ``seed``, then compaction with the same seed."""
    start = random_start(n, seed, params.initial_fill)
    out = compact(start, params, rng=np.random.default_rng(seed))
    return out.replace(meta={**out.meta, "seed": seed})


def _worker(args):
    n, seed, params = args
    p = run_once(n, seed, params)
    return seed, p


def search(
    n: int,
    params: CompactorParams | None = None,
    progress: Callable[[dict], None] | None = None,
    checkpoint: Callable[[RunRecord], None] | None = None,
) -> RunRecord:
    """Best packing over ``params.restarts`` independent compaction runs.

    Ties are broken by the lower per-restart seed, so serial and parallel
    runs give the same record.  ``progress`` receives one event dict per
    attempt; ``checkpoint`` is called whenever the record improves.
    """
    params = params or CompactorParams()
    if n < 1:
        raise ValueError("n >= 1 required")
    seeds = restart_seeds(params.seed, params.restarts)
    best: tuple[float, int, Packing] | None = None
    tasks = [(n, s, params) for s in seeds]
    pool = ProcessPoolExecutor(max_workers=params.jobs) if params.jobs > 1 else None
    try:
        results = pool.map(_worker, tasks, chunksize=4) if pool else map(_worker, tasks)
        for attempt, (s, p) in enumerate(results):
            P = p.perimeter
            improved = best is None or (P, s) < (best[0], best[1])
            if improved:
                best = (P, s, p)
            if progress:
                progress({"event": "attempt", "attempt": attempt, "seed": s, "perimeter": P, "best": best[0]})
            if improved and checkpoint:
                checkpoint(_record(n, best, attempt + 1, params))
    finally:
        if pool:
            pool.shutdown(cancel_futures=True)
    assert best is not None
    return _record(n, best, len(seeds), params)


def _record(n, best, attempts, params) -> RunRecord:
    P, s, p = best
    return RunRecord(n, P, p, attempts, s, GENERATOR, asdict(params))


def progress_printer(stream) -> Callable[[dict], None]:
    def emit(ev: dict) -> None:
        stream.write(json.dumps(ev) + "\n")
        stream.flush()

    return emit


def default_restarts(n: int) -> int:
    return 1000 if n <= 21 else 100


def cpu_jobs() -> int:
    return max(1, os.cpu_count() or 1)
