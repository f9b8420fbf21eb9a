"""Packing files, SVG figures and table output."""
from __future__ import annotations

import csv
import io as _io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, TextIO

from .geom import WALLS, BondGraph, Packing, detect_rattlers
from .restricted import CSV_COLUMNS, TableRow, is_irregular_candidate

PROVENANCES = ("constructed", "improved", "compacted", "solved", "imported")

PX_PER_R = 40.0
MARGIN_PX = 20.0
DOT_R = 0.06


class SchemaError(ValueError):
    """A packing document does not follow the schema; ``path`` names the field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# ---------------------------------------------------------------------------
# JSON


def _num(x: float) -> str:
    """17 significant digits: enough for an exact double round trip."""
    if not math.isfinite(x):
        raise ValueError("non-finite number in packing")
    s = format(float(x), ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def packing_to_json(p: Packing) -> str:
    parts = [
        '{\n  "n": %d,' % p.n,
        '  "width": %s,' % _num(p.width),
        '  "height": %s,' % _num(p.height),
        '  "centers": [' + ", ".join("[%s, %s]" % (_num(x), _num(y)) for x, y in p.centers) + "],",
    ]
    if p.bonds is not None:
        parts.append('  "bonds": %s,' % json.dumps(p.bonds.to_json()))
    if p.meta:
        parts.append('  "meta": %s,' % json.dumps(p.meta, sort_keys=True, default=_jsonable))
    parts.append('  "provenance": %s\n}\n' % json.dumps(p.provenance))
    return "\n".join(parts)


def _jsonable(obj):
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if hasattr(obj, "to_json"):
        return obj.to_json()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _require(doc: dict, key: str, kind, path: str = "$"):
    if key not in doc:
        raise SchemaError(f"{path}.{key}", "missing required field")
    val = doc[key]
    if kind is float:
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise SchemaError(f"{path}.{key}", "expected a number")
        return float(val)
    if not isinstance(val, kind) or isinstance(val, bool) and kind is int:
        raise SchemaError(f"{path}.{key}", f"expected {kind.__name__}")
    return val


def packing_from_dict(doc) -> Packing:
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected an object")
    width = _require(doc, "width", float)
    height = _require(doc, "height", float)
    centers = _require(doc, "centers", list)
    pts = []
    for k, c in enumerate(centers):
        if (
            not isinstance(c, list)
            or len(c) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in c)
        ):
            raise SchemaError(f"$.centers[{k}]", "expected [x, y]")
        pts.append((float(c[0]), float(c[1])))
    if "n" in doc:
        n = _require(doc, "n", int)
        if n != len(pts):
            raise SchemaError("$.n", f"says {n} but {len(pts)} centers given")
    bonds = None
    if doc.get("bonds") is not None:
        b = doc["bonds"]
        if not isinstance(b, dict):
            raise SchemaError("$.bonds", "expected an object")
        for k, pair in enumerate(b.get("pairs", [])):
            if not isinstance(pair, list) or len(pair) != 2 or not all(isinstance(i, int) for i in pair):
                raise SchemaError(f"$.bonds.pairs[{k}]", "expected [i, j]")
        for k, wc in enumerate(b.get("walls", [])):
            if not isinstance(wc, list) or len(wc) != 2 or not isinstance(wc[0], int) or wc[1] not in WALLS:
                raise SchemaError(f"$.bonds.walls[{k}]", "expected [i, wall]")
        try:
            bonds = BondGraph.from_json(b)
            bonds.validate(len(pts))
        except ValueError as exc:
            raise SchemaError("$.bonds", str(exc)) from None
    provenance = doc.get("provenance", "imported")
    if provenance not in PROVENANCES:
        raise SchemaError("$.provenance", f"must be one of {', '.join(PROVENANCES)}")
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise SchemaError("$.meta", "expected an object")
    import numpy as np

    return Packing(width, height, np.array(pts, dtype=float).reshape(-1, 2), bonds, provenance, meta)


def read_packing(path: str | os.PathLike) -> Packing:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    return packing_from_dict(doc)


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file and rename, so readers never see half a file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_packing(p: Packing, path: str | os.PathLike) -> None:
    atomic_write_text(path, packing_to_json(p))


# ---------------------------------------------------------------------------
# SVG


def render_svg(
    p: Packing,
    labels: bool = False,
    bonds: bool = True,
    rattlers: set[int] | None = None,
    highlight: dict[int, str] | None = None,
) -> str:
    """SVG drawing with the figure conventions: rattlers unshaded, bonds as dots.

    ``highlight`` maps circle indices to text labels drawn instead of the
    index (e.g. letters naming particular circles).
    """
    s = PX_PER_R
    W, H = p.width, p.height
    total_w = W * s + 2 * MARGIN_PX
    total_h = H * s + 2 * MARGIN_PX
    graph = p.bonds
    if rattlers is None:
        rattlers = detect_rattlers(p, bonds=graph) if graph is not None else set()

    def X(x: float) -> str:
        return f"{MARGIN_PX + x * s:.3f}"

    def Y(y: float) -> str:  # flip so the bottom wall is at the bottom
        return f"{MARGIN_PX + (H - y) * s:.3f}"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w:.3f}" height="{total_h:.3f}" '
        f'viewBox="0 0 {total_w:.3f} {total_h:.3f}">',
        f"<title>{p.n} circles, W={W:.9f} H={H:.9f} P={p.perimeter:.9f}</title>",
        f'<rect x="{X(0)}" y="{Y(H)}" width="{W * s:.3f}" height="{H * s:.3f}" '
        'fill="none" stroke="black" stroke-width="1.5"/>',
    ]
    for k, (x, y) in enumerate(p.centers):
        fill = "white" if k in rattlers else "#b8c4d6"
        out.append(
            f'<circle cx="{X(x)}" cy="{Y(y)}" r="{s:.3f}" fill="{fill}" stroke="black" stroke-width="1"/>'
        )
    if bonds and graph is not None:
        c = p.centers
        dots = []
        for i, j in graph.circle_pairs:
            dots.append(((c[i, 0] + c[j, 0]) / 2, (c[i, 1] + c[j, 1]) / 2))
        for i, w in graph.wall_contacts:
            x, y = c[i]
            dots.append({"left": (0.0, y), "right": (W, y), "bottom": (x, 0.0), "top": (x, H)}[w])
        for x, y in dots:
            out.append(f'<circle cx="{X(x)}" cy="{Y(y)}" r="{DOT_R * s:.3f}" fill="black"/>')
    if labels or highlight:
        names = dict(highlight or {})
        for k, (x, y) in enumerate(p.centers):
            text = names.get(k, str(k) if labels else None)
            if text is None:
                continue
            out.append(
                f'<text x="{X(x)}" y="{Y(y)}" font-size="{0.7 * s:.1f}" text-anchor="middle" '
                f'dominant-baseline="central" font-family="sans-serif">{text}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# tables


def table_csv(rows: Iterable[TableRow], stream: TextIO | None = None) -> str:
    buf = stream if stream is not None else _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(
            [r.n, *r.t, r.perimeter.x, r.perimeter.y, repr(float(r.perimeter)),
             int(r.regular), int(r.dimorphic), int(r.hybrid)]
        )
    return buf.getvalue() if stream is None else ""


def table_text(rows: Iterable[TableRow], paper_format: bool = False, delta_index: dict[int, int] | None = None) -> str:
    """Aligned text table.

    The plain layout lists every field.  ``paper_format`` mimics the
    reference layouts: for sizes up to 62 one line per minimiser with stars
    for holes and a delta column (sizes whose optimum is irregular are left
    out); beyond that a ``v`` column, with a star marking the exceptional
    sizes ``k(k+1)+1``.
    """
    rows = list(rows)
    lines = []
    if not paper_format:
        lines.append(f"{'n':>5} {'w':>4} {'h':>4} {'h-':>4} {'s':>4} {'s-':>4} {'v':>3}  {'P/r':<22} flags")
        for r in rows:
            flags = ",".join(k for k, on in (("regular", r.regular), ("dimorphic", r.dimorphic), ("hybrid", r.hybrid)) if on)
            lines.append(
                f"{r.n:>5} {r.t.w:>4} {r.t.h:>4} {r.t.hminus:>4} {r.t.s:>4} {r.t.sminus:>4} {r.t.v:>3}  "
                f"{str(r.perimeter) + ' = ' + format(float(r.perimeter), '.9f'):<22} {flags}"
            )
        return "\n".join(lines) + "\n"
    small = bool(rows) and max(r.n for r in rows) <= 62
    if small:
        delta_index = delta_index or {}
        lines.append(f"{'n':>5} {'w':>3} {'h':>3} {'h-':>3} {'s':>3}  delta")
        for r in rows:
            if is_irregular_candidate(r.n):
                continue
            star = "*" * r.t.v
            name = f"{star}{r.n}" if r.first else ""
            d = delta_index.get(r.n)
            dcol = f"d{d}" if d and r.t.v else "0"
            lines.append(f"{name:>5} {r.t.w:>3} {r.t.h:>3} {r.t.hminus:>3} {r.t.s:>3}  {dcol}")
    else:
        lines.append(f"{'n':>6} {'w':>3} {'h':>3} {'h-':>3} {'s':>3} {'v':>3}")
        for r in rows:
            name = ("*" if r.irregular_candidate else "") + str(r.n) if r.first else ""
            lines.append(f"{name:>6} {r.t.w:>3} {r.t.h:>3} {r.t.hminus:>3} {r.t.s:>3} {r.t.v:>3}")
    return "\n".join(lines) + "\n"


def scan_text(entries) -> str:
    lines = [f"{'n':>5} {'w':>3} {'h':>3} {'h-':>3} {'s':>3}"]
    for n, tuples in entries:
        for k, t in enumerate(tuples):
            lines.append(f"{n if k == 0 else '':>5} {t.w:>3} {t.h:>3} {t.hminus:>3} {t.s:>3}")
    return "\n".join(lines) + "\n"
