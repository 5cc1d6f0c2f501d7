"""Command-line entry point.

Exit codes: 0 success, 1 a property or check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

from .admissibility import derive_pattern_catalog, first_violation
from .appendix_verifier import (
    CertificateFailure,
    GOLDEN_FILES,
    TABLE_NAMES,
    not_induced_exhaustive,
    reproduce_all,
    tables_json,
)
from .arrangement2d import Arrangement2D, bijection_report, emit_svg, grid_drawing
from .blocksig import BlockSignotope, induced_orientation
from .grid import GridOrientation, NotAUSO
from .signotope import Signotope, is_signotope
from .sweep import DEFAULT_BUDGET, DEFAULT_SAMPLES, sweep, write_certificates

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
PREDICATES = ("signotope", "uso", "acyclic", "admissible")


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    output: str | None = None
    budget: int = DEFAULT_BUDGET
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if self.budget <= 0:
            raise InputError("--budget must be positive")
        if self.jobs < 1:
            raise InputError("--jobs must be at least 1")


def _read_json(path) -> dict:
    if path is None:
        raise InputError("--input is required")
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path} must hold a JSON object")
    return data


def _write(path, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _parse_blocks(text) -> tuple[int, ...] | None:
    if text is None:
        return None
    try:
        blocks = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise InputError(f"--blocks expects comma-separated integers, got {text!r}") from exc
    if any(b < 1 for b in blocks):
        raise InputError("block sizes must be positive")
    return blocks


def _signotope_unchecked(data) -> Signotope:
    try:
        return Signotope.from_string(int(data["n"]), int(data["rank"]), data["signs"], check=False)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad signotope object: {exc}") from exc


def _block_unchecked(data) -> BlockSignotope:
    if "signotope" not in data or "blocks" not in data:
        raise InputError("block signotope JSON needs 'signotope' and 'blocks'")
    try:
        return BlockSignotope(_signotope_unchecked(data["signotope"]), data["blocks"])
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _orientation_checks(o: GridOrientation) -> dict:
    res = {"uso": o.is_uso()}
    res["acyclic"] = o.is_acyclic()
    if res["uso"]:
        v = first_violation(o)
        res["admissible"] = v is None
        if v is not None:
            res["violation"] = {"subgrid": [list(f) for f in v.subgrid], "paths": v.paths, "required": v.required}
    else:
        res["admissible"] = False
    return res


def validate(data: dict) -> dict:
    """Predicates applicable to a signotope, block signotope or orientation object."""
    if "signotope" in data:
        block = _block_unchecked(data)
        res = {"kind": "block signotope", "signotope": is_signotope(block.chi.n, block.chi.rank, block.chi.signs)}
        if res["signotope"]:
            res.update(_orientation_checks(induced_orientation(block)))
        return res
    if "signs" in data:
        chi = _signotope_unchecked(data)
        return {"kind": "signotope", "signotope": is_signotope(chi.n, chi.rank, chi.signs)}
    if "shape" in data:
        try:
            o = GridOrientation.from_json(data)
        except NotAUSO as exc:
            return {"kind": "orientation", "uso": False, "reason": str(exc)}
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"bad orientation object: {exc}") from exc
        return {"kind": "orientation", **_orientation_checks(o)}
    raise InputError("unrecognised JSON: expected a signotope, block signotope or orientation")


def cmd_validate(args) -> int:
    report = validate(_read_json(args.input))
    required = [p for p in args.require.split(",") if p] if args.require else list(PREDICATES)
    unknown = set(required) - set(PREDICATES)
    if unknown:
        raise InputError(f"unknown predicates {sorted(unknown)}")
    checked = [p for p in required if p in report]
    for p in PREDICATES:
        if p in report:
            print(f"{p}: {'yes' if report[p] else 'no'}")
    if not report.get("uso", True) and "reason" in report:
        print(f"not a USO: {report['reason']}")
    if args.output:
        _write(args.output, json.dumps(report, indent=1) + "\n")
    return EXIT_OK if all(report[p] for p in checked) else EXIT_FAIL


def cmd_induce(args) -> int:
    block = _block_unchecked(_read_json(args.input))
    if not is_signotope(block.chi.n, block.chi.rank, block.chi.signs):
        print("input is not a signotope")
        return EXIT_FAIL
    o = induced_orientation(block)
    checks = _orientation_checks(o)
    form = args.form if checks["uso"] else "edges"
    _write(args.output, o.dumps(form) + "\n")
    print(f"uso: {'yes' if checks['uso'] else 'no'}", file=sys.stderr if args.output is None else sys.stdout)
    print(f"admissible: {'yes' if checks['admissible'] else 'no'}",
          file=sys.stderr if args.output is None else sys.stdout)
    return EXIT_OK if checks["uso"] else EXIT_FAIL


def cmd_sweep(args) -> int:
    if args.n is None or args.rank is None:
        raise InputError("sweep needs --n and --rank")
    try:
        report = sweep(args.n, args.rank, _parse_blocks(args.blocks), budget=args.budget, seed=args.seed,
                       samples=args.samples, jobs=args.jobs)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    print(report.summary())
    if args.output:
        _write(args.output, json.dumps(report.to_json(), indent=1) + "\n")
    cert_path = args.certificates
    if cert_path is None and args.output:
        cert_path = str(Path(args.output).with_suffix("")) + ".certificates.json"
    if cert_path is not None:
        written = write_certificates(report, cert_path)
        if written:
            print(f"certificates written to {written}")
    elif report.certificates():
        print(json.dumps(report.certificates(), indent=1))
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_appendix(args) -> int:
    try:
        results = reproduce_all(args.golden_dir)
    except OSError as exc:
        raise InputError(f"cannot read golden tables: {exc}") from exc
    except CertificateFailure as exc:
        print(f"appendix: {exc}")
        return EXIT_FAIL
    out_dir = Path(args.output) if args.output else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        for r in results:
            (out_dir / GOLDEN_FILES[r.name]).write_text(r.text, encoding="utf-8")
        (out_dir / "tables.json").write_text(tables_json(results), encoding="utf-8")
    ok = True
    for r in results:
        print(f"{r.name}: {len(r.records)} rows, {'identical' if r.matches else 'DIFFERS'}")
        if not r.matches:
            ok = False
            sys.stdout.write(r.diff())
    return EXIT_OK if ok else EXIT_FAIL


def cmd_bijection(args) -> int:
    if args.r is None or args.b is None:
        raise InputError("bijection needs --r and --b")
    if args.r < 1 or args.b < 1 or args.r + args.b > 7:
        raise InputError("bijection needs r, b >= 1 and r + b <= 7")
    rep = bijection_report(args.r, args.b)
    print(
        f"r={rep.r} b={rep.b}: {rep.signotopes} signotopes, {rep.flip_classes} flip classes, "
        f"{rep.pictures} admissible pictures, extension sum {rep.extension_sum}, "
        f"round trips {rep.round_trips - rep.round_trip_failures}/{rep.round_trips}"
    )
    if args.output:
        _write(args.output, json.dumps({**asdict(rep), "ok": rep.ok}, indent=1) + "\n")
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_draw(args) -> int:
    block = _block_unchecked(_read_json(args.input))
    if not is_signotope(block.chi.n, block.chi.rank, block.chi.signs):
        raise InputError("input is not a signotope")
    try:
        arr = Arrangement2D.from_block(block)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _write(args.output, emit_svg(grid_drawing(arr)))
    return EXIT_OK


def cmd_catalog(args) -> int:
    cat = derive_pattern_catalog()
    text = cat.dumps()
    _write(args.output, text)
    status = {name: not_induced_exhaustive(getattr(cat, name)) for name in ("NAC1", "NAC2")}
    print(f"DT shape {cat.dt_shape}; 3-cube USOs {cat.cube_uso_count}; "
          f"NAC1/NAC2 not induced: {status['NAC1']}/{status['NAC2']}",
          file=sys.stderr if args.output is None else sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="usosig", description="Grid USOs induced by block signotopes.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, inp=False):
        if inp:
            sp.add_argument("--input", help="JSON input file")
        sp.add_argument("--output", help="output path (stdout when omitted)")
        return sp

    v = common(sub.add_parser("validate", help="check a signotope, block signotope or orientation"), True)
    v.add_argument("--require", help=f"comma list from {','.join(PREDICATES)} (default: all applicable)")
    v.set_defaults(func=cmd_validate)

    i = common(sub.add_parser("induce", help="orientation induced by a block signotope"), True)
    i.add_argument("--form", choices=("rf", "edges"), default="rf")
    i.set_defaults(func=cmd_induce)

    s = common(sub.add_parser("sweep", help="check every block signotope of a size"))
    s.add_argument("--n", type=int)
    s.add_argument("--rank", type=int)
    s.add_argument("--blocks", help="block sizes a,b,c (default: all partitions)")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="search-tree node budget")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="samples drawn past the budget")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--certificates", help="where to dump counterexamples")
    s.set_defaults(func=cmd_sweep)

    a = common(sub.add_parser("appendix", help="reproduce the three certificate tables"))
    a.add_argument("--golden-dir", help="directory with " + ", ".join(GOLDEN_FILES[t] for t in TABLE_NAMES))
    a.set_defaults(func=cmd_appendix)

    b = common(sub.add_parser("bijection", help="count both sides of the arrangement/USO bijection"))
    b.add_argument("--r", type=int, help="number of red pseudolines")
    b.add_argument("--b", type=int, help="number of blue pseudolines")
    b.set_defaults(func=cmd_bijection)

    d = common(sub.add_parser("draw", help="SVG grid drawing of a two-block arrangement"), True)
    d.set_defaults(func=cmd_draw)

    c = common(sub.add_parser("catalog", help="derive the forbidden patterns DT, NAC1, NAC2"))
    c.set_defaults(func=cmd_catalog)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        RunConfig(args.command, getattr(args, "input", None), args.output,
                  getattr(args, "budget", DEFAULT_BUDGET), getattr(args, "seed", 0), getattr(args, "jobs", 1))
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
