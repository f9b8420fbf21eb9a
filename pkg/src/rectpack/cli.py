"""Command-line entry point: ``rectpack <subcommand> ...``.

Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 solver failure.
Errors are also written to stderr as one JSON object.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code: int, kind: str, message: str, **extra):
        super().__init__(message)
        self.code, self.kind, self.extra = code, kind, extra


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse calls this for bad flags
        raise CliError(EXIT_USAGE, "usage", message, usage=self.format_usage().strip())


def _emit(args, data: dict, text: str) -> None:
    if args.json:
        print(json.dumps(data, indent=1, default=str))
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _read(path: str):
    from .io import read_packing

    if not Path(path).exists():
        raise CliError(EXIT_USAGE, "usage", f"no such file: {path}")
    return read_packing(path)


# ---------------------------------------------------------------------------
# subcommands


def cmd_search_rn(args):
    from .restricted import best_in_rn, tuple_dims
    from .exact import q3_to_real

    res = best_in_rn(args.n, args.objective)
    lines = [f"n={res.n} objective={res.objective} value={res.value} = {res.value_float:.12f}"]
    for t in res.reported:
        w, h = tuple_dims(t)
        lines.append(f"  {tuple(t)}  W={q3_to_real(w):.9f} H={q3_to_real(h):.9f}")
    extra = [t for t in res.minimizers if t not in res.reported]
    if extra:
        lines.append(f"  ({len(extra)} further minimiser(s) with the same rectangle)")
    _emit(args, res.to_json(), "\n".join(lines))


def cmd_table(args):
    from .improve import KNOWN_DELTA_INDEX
    from .io import table_csv, table_text
    from .restricted import make_table

    rows = make_table(args.n_from, args.n_to, jobs=args.jobs)
    if args.json:
        data = [
            {"n": r.n, "tuple": list(r.t), "perimeter": str(r.perimeter), "perimeter_float": float(r.perimeter),
             "regular": r.regular, "dimorphic": r.dimorphic, "hybrid": r.hybrid}
            for r in rows
        ]
        print(json.dumps(data, indent=1))
    elif args.csv:
        sys.stdout.write(table_csv(rows))
    else:
        sys.stdout.write(table_text(rows, args.paper_format, KNOWN_DELTA_INDEX))


def cmd_scan(args):
    from .io import scan_text
    from .restricted import dimorphism_hybrid_scan

    entries = dimorphism_hybrid_scan(args.n_to, jobs=args.jobs)
    data = [{"n": n, "tuples": [list(t) for t in ts]} for n, ts in entries]
    _emit(args, {"rows": data, "count": len(entries)}, scan_text(entries) + f"{len(entries)} sizes\n")


def _store(args):
    from .verify import ENV_RECORDS_DIR, RecordStore
    import os

    if getattr(args, "records_dir", None):
        return RecordStore(args.records_dir)
    if os.environ.get(ENV_RECORDS_DIR):
        return RecordStore()
    return None


def cmd_compact(args):
    from .compactor import CompactorParams, progress_printer, search
    from .io import write_packing
    from .verify import Record

    try:
        params = CompactorParams(
            seed=args.seed, initial_fill=args.fill, shrink_rate=args.shrink_rate, max_steps=args.max_steps,
            restarts=args.restarts, jobs=args.jobs,
        )
    except ValueError as exc:
        raise CliError(EXIT_USAGE, "usage", str(exc)) from None
    store = _store(args)

    def save(rec):
        p = rec.best_packing.replace(meta={**rec.best_packing.meta, "run": rec.to_json()})
        if args.out:
            write_packing(p, args.out)
        if store is not None:
            store.offer(Record(rec.n, rec.best_perimeter, "compacted", p))

    progress = None if args.quiet else progress_printer(sys.stderr)
    try:
        rec = search(args.n, params, progress=progress, checkpoint=save)
    except KeyboardInterrupt:
        raise CliError(EXIT_SOLVER, "interrupted", "interrupted; the last record was checkpointed") from None
    _emit(args, rec.to_json(), f"n={rec.n} best P/r={rec.best_perimeter!r} after {rec.attempts} attempts "
          f"(seed {rec.seed_of_best})")


def cmd_improve(args):
    from .improve import InfeasibleImprovement, apply_improvement, right_column
    from .io import write_packing
    from .restricted import RnTuple, best_in_rn

    if args.tuple:
        cands = [RnTuple(*args.tuple)]
    else:
        cands = [t for t in best_in_rn(args.n).minimizers if t.v >= 1]
        if not cands:
            raise CliError(EXIT_VERIFY, "not-applicable", f"no R_n minimiser of n={args.n} has a hole")
    last = None
    for t in cands:
        try:
            right_column(t)
            p = apply_improvement(t, args.delta)
            break
        except (InfeasibleImprovement, ValueError) as exc:
            last = exc
    else:
        raise CliError(EXIT_SOLVER, "solver", str(last))
    if args.out:
        write_packing(p, args.out)
    _emit(args, {"n": p.n, "width": p.width, "height": p.height, "perimeter": p.perimeter, **p.meta},
          f"n={p.n} tuple={tuple(p.meta['tuple'])} delta_{args.delta}={p.meta['delta']:.12f} "
          f"P/r={p.perimeter!r}")


def cmd_solve(args):
    from .contacts import ContactSystem
    from .geom import check_feasible, measure
    from .improve import solve_found, solve_irregular
    from .io import write_packing

    if args.irregular:
        p = solve_irregular(args.irregular)
        info = None
    elif args.found:
        p = solve_found(args.found)
        info = None
    else:
        if not (args.system and args.init):
            raise CliError(EXIT_USAGE, "usage", "solve needs --system and --init (or --irregular N / --found N)")
        try:
            system = ContactSystem.from_json(json.loads(Path(args.system).read_text()))
        except (OSError, KeyError, ValueError, TypeError) as exc:
            raise CliError(EXIT_USAGE, "usage", f"bad system file: {exc}") from None
        from .contacts import solve_contacts

        p, info = solve_contacts(system, _read(args.init))
    if args.out:
        write_packing(p, args.out)
    m = measure(p)
    ok = check_feasible(p, args.tol).ok
    data = {"feasible": ok, **m.to_json()}
    if info is not None:
        data.update(iterations=info.iterations, residual=info.residual)
    _emit(args, data, f"W/r={p.width:.12f} H/r={p.height:.12f} P/r={p.perimeter:.12f} "
          f"core L/S={m.core_L_over_S:.12f} feasible={ok}")
    if not ok:
        raise CliError(EXIT_VERIFY, "infeasible", "solved packing violates feasibility")


def cmd_verify(args):
    from .compactor import is_jammed
    from .contacts import bond_residual
    from .geom import check_feasible, detect_rattlers, extract_bonds, measure

    p = _read(args.input)
    rep = check_feasible(p, args.tol)
    bonds = extract_bonds(p, args.bond_tol)
    rattlers = sorted(detect_rattlers(p, args.bond_tol, bonds=bonds))
    data = {
        "feasible": rep.ok,
        "worst_violation": rep.worst,
        "violations": [list(v) for v in rep.violations],
        "bonds": bonds.to_json(),
        "n_bonds": len(bonds),
        "rattlers": rattlers,
        "jammed": is_jammed(p, args.bond_tol),
        **measure(p).to_json(),
    }
    if p.bonds is not None:
        data["declared_bond_residual"] = bond_residual(p, p.bonds)
        data["declared_bonds_hold"] = data["declared_bond_residual"] <= args.bond_tol
    text = (
        f"n={p.n} W/r={p.width!r} H/r={p.height!r} P/r={p.perimeter!r}\n"
        f"feasible={rep.ok} (worst violation {rep.worst:.3g}), {len(bonds)} bonds, "
        f"rattlers={rattlers}, jammed={data['jammed']}"
    )
    _emit(args, data, text)
    if not rep.ok or data.get("declared_bonds_hold") is False:
        raise CliError(EXIT_VERIFY, "verification", "packing failed verification", worst=rep.worst)


def cmd_records(args):
    from .verify import RecordStore, merged_records, record_table, records_monotone

    store = RecordStore(args.records_dir) if args.records_dir else _store(args)
    recs = merged_records(args.n_to, store)
    rows = record_table(recs)
    bad = records_monotone(recs) if args.check_monotone else []
    text = "\n".join(f"{r['n']:>5}  {r['perimeter']:.12f}  {r['source']}" for r in rows)
    if args.check_monotone:
        text += f"\nmonotone: {'ok' if not bad else 'violations at ' + str(bad)}"
    _emit(args, {"records": rows, "violations": bad}, text)
    if bad:
        raise CliError(EXIT_VERIFY, "verification", "records are not monotone", violations=bad)


def cmd_oler(args):
    from .verify import oler_epsilon_bound

    try:
        b = oler_epsilon_bound(args.m)
    except ValueError as exc:
        raise CliError(EXIT_VERIFY, "vacuous", str(exc)) from None
    _emit(args, {"m": b.m, "epsilon_max": b.epsilon_max, "ls_bound": b.ls_bound},
          f"m={b.m:g}: epsilon <= {b.epsilon_max:.6f}, L/S <= {b.ls_bound:.6f}")


def cmd_render(args):
    from .io import atomic_write_text, render_svg

    p = _read(args.input)
    svg = render_svg(p, labels=args.labels, bonds=args.bonds)
    atomic_write_text(args.out, svg)
    _emit(args, {"out": args.out, "bytes": len(svg)}, f"wrote {args.out}")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    ap = _Parser(prog="rectpack", description="Circle packings in rectangles of minimum perimeter.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("search-rn", parents=[common], help="exact optimum over the restricted family")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--objective", choices=("perimeter", "area"), default="perimeter")
    s.set_defaults(func=cmd_search_rn)

    s = sub.add_parser("table", parents=[common], help="table of restricted optima")
    s.add_argument("--from", dest="n_from", type=int, required=True)
    s.add_argument("--to", dest="n_to", type=int, required=True)
    s.add_argument("--paper-format", action="store_true")
    s.add_argument("--csv", action="store_true")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("scan-dimorphism", parents=[common], help="sizes with dimorphic or hybrid optima")
    s.add_argument("--to", dest="n_to", type=int, required=True)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("compact", parents=[common], help="stochastic compaction search")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--restarts", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--fill", type=float, default=0.35)
    s.add_argument("--shrink-rate", type=float, default=0.5)
    s.add_argument("--max-steps", type=int, default=200)
    s.add_argument("--records-dir")
    s.add_argument("--quiet", action="store_true", help="no progress events")
    s.set_defaults(func=cmd_compact)

    s = sub.add_parser("improve", parents=[common], help="apply a width-reducing move")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--delta", type=int, required=True, choices=(1, 2, 3, 4))
    s.add_argument("--tuple", type=int, nargs=6, metavar=("W", "H", "HM", "S", "SM", "V"))
    s.add_argument("--out")
    s.set_defaults(func=cmd_improve)

    s = sub.add_parser("solve", parents=[common], help="solve a bond graph for exact positions")
    s.add_argument("--system")
    s.add_argument("--init")
    s.add_argument("--irregular", type=int, choices=(13, 21))
    s.add_argument("--found", type=int, choices=(43, 57, 58), help="shipped record packing")
    s.add_argument("--out")
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify", parents=[common], help="feasibility and contact report")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--bond-tol", type=float, default=1e-7)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("records", parents=[common], help="best known perimeters")
    s.add_argument("--dir", dest="records_dir")
    s.add_argument("--to", dest="n_to", type=int, default=62)
    s.add_argument("--check-monotone", action="store_true")
    s.set_defaults(func=cmd_records)

    s = sub.add_parser("oler", parents=[common], help="asymptotic squareness bound")
    s.add_argument("--m", type=float, required=True)
    s.set_defaults(func=cmd_oler)

    s = sub.add_parser("render", parents=[common], help="SVG drawing of a packing")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--labels", action="store_true")
    s.add_argument("--bonds", action=argparse.BooleanOptionalAction, default=True)
    s.set_defaults(func=cmd_render)
    return ap


def main(argv: list[str] | None = None) -> int:
    from .contacts import SolverError
    from .io import SchemaError

    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "jobs", 1) < 1:
            raise CliError(EXIT_USAGE, "usage", "--jobs must be at least 1")
        if args.command == "compact" and args.restarts is None:
            from .compactor import default_restarts

            args.restarts = default_restarts(args.n)
        args.func(args)
        return EXIT_OK
    except CliError as exc:
        err = {"error": exc.kind, "message": str(exc), **exc.extra}
        code = exc.code
    except SchemaError as exc:
        err, code = {"error": "schema", "path": exc.path, "message": str(exc)}, EXIT_USAGE
    except SolverError as exc:
        err, code = {"error": "solver", "message": str(exc)}, EXIT_SOLVER
    except ValueError as exc:
        err, code = {"error": "usage", "message": str(exc)}, EXIT_USAGE
    sys.stderr.write(json.dumps(err) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
