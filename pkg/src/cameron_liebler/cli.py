"""Command-line front end.

Every subcommand prints one JSON (or CSV) document and exits 0 exactly when
every check block in it passes.  Reports are deterministic for a fixed
configuration and seed; wall-clock timing is only recorded with --timing.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from pathlib import Path

from .gf import GF, FieldError, factor_prime_power
from .geometry import PG3
from .pencil import Pencil
from .group_action import GroupAction
from . import klein, lineclass as lc

SCHEMA = 1
CLASSES = ("bruen-drudge", "first-derived", "derived")


class UsageError(Exception):
    pass


# -- configuration ------------------------------------------------------------------


def _field(args) -> GF:
    modulus = None
    if args.modulus:
        modulus = tuple(int(c) for c in args.modulus.split(","))
    try:
        if args.q is not None:
            p, k = factor_prime_power(args.q)
        elif args.p is not None:
            p, k = args.p, args.k
        else:
            raise UsageError("give --q or --p/--k")
        if p == 2:
            raise UsageError("q must be odd")
        return GF(p, k, modulus)
    except (FieldError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _lambda_bar(args, F):
    if not args.lambda_bar:
        return None
    vals = [int(c) for c in args.lambda_bar.split(",")]
    lb = F(vals) if len(vals) > 1 or F.k > 1 else F(vals[0])
    if lb.is_square():
        raise UsageError(f"lambda-bar {args.lambda_bar} is not a non-square")
    return lb


class Context:
    """Field, geometry and pencil built once per invocation."""

    def __init__(self, args):
        self.args = args
        self.F = _field(args)
        self.q = self.F.q
        self.geom = PG3(self.F)
        self.pencil = Pencil(self.geom, _lambda_bar(args, self.F))

    def require_1mod4(self, what: str) -> None:
        if self.q % 4 != 1:
            raise UsageError(f"{what} requires q = 1 (mod 4); q = {self.q} is not")

    def build(self, name: str, side: str = "on") -> lc.LineClass:
        P = self.pencil
        if name == "bruen-drudge":
            return lc.build_bruen_drudge(P, side=side)
        if name == "first-derived":
            base = lc.build_bruen_drudge(P, side="Os", lines="external")
            return lc.build_first_derived(P, base)
        if name == "derived":
            self.require_1mod4("the derived class")
            return lc.build_derived(P)
        raise UsageError(f"unknown class {name!r}")

    def load(self) -> lc.LineClass:
        a = self.args
        if getattr(a, "file", None):
            try:
                mask, meta = lc.load_indices(a.file, self.geom)
            except lc.UniverseMismatch as exc:
                raise UsageError(str(exc)) from None
            x = a.x if a.x is not None else int(meta.get("x", -1))
            name = meta.get("name", Path(a.file).name)
            size = int(mask.sum())
            if x * (self.q * self.q + self.q + 1) != size:
                # keep the set; verify_tight reports the size mismatch
                cls = lc.LineClass.__new__(lc.LineClass)
                cls.name, cls.mask, cls.x = name, mask, x
                return cls
            return lc.LineClass(name, mask, x)
        return self.build(a.cls, getattr(a, "side", "on"))

    def header(self, command: str) -> dict:
        return {"schema": SCHEMA, "command": command, "q": self.q,
                "p": self.F.p, "k": self.F.k,
                "modulus": list(self.F.modulus),
                "lambda_bar": [int(c) for c in self.F.coeffs(self.pencil.lambda_bar.code)],
                "line_table_hash": self.geom.table_hash}


# -- subcommands --------------------------------------------------------------------


def cmd_labels(ctx: Context) -> dict:
    P = ctx.pencil
    pc, lc_ = P.point_census(), P.line_census()
    tallies = P.check_tallies()
    structure = P.check_structure()
    out = ctx.header("labels")
    out["point_census"] = {"observed": pc, "expected": P.expected_point_census(),
                           "pass": pc == P.expected_point_census()}
    out["line_census"] = {"observed": lc_, "expected": P.expected_line_census(),
                          "pass": lc_ == P.expected_line_census()}
    out["tallies"] = tallies
    out["structure"] = {"checks": structure, "pass": all(structure.values())}
    return out


def cmd_orbits(ctx: Context) -> dict:
    G = GroupAction(ctx.geom)
    P, q = ctx.pencil, ctx.q
    out = ctx.header("orbits")
    for kind, want, labeller in (("point", q + 4, P.label_point),
                                 ("line", 3 * q + 5, P.label_line)):
        orb = G.orbits(kind)
        names = [labeller(i).name for i in range(len(orb.orbit_id))]
        rows, refines = [], True
        for k, (size, rep) in enumerate(zip(orb.sizes, orb.representatives)):
            labels = {names[i] for i in orb.members(k)}
            refines &= len(labels) == 1
            rows.append({"id": k, "size": size, "label": names[rep],
                         "representative": rep})
        out[f"{kind}_orbits"] = {
            "expected_count": want, "count": len(orb), "orbits": rows,
            "refines_labels": bool(refines),
            "pass": len(orb) == want and bool(refines)}
    return out


def _write_class(ctx: Context, cls: lc.LineClass) -> str | None:
    if ctx.args.out:
        lc.save_lineclass(ctx.args.out, cls, ctx.geom)
        return str(ctx.args.out)
    return None


def cmd_build(ctx: Context) -> dict:
    cls = ctx.build(ctx.args.cls, ctx.args.side)
    tight = klein.verify_tight(ctx.geom, cls.mask, cls.x)
    out = ctx.header("build")
    out.update({"class": cls.name, "x": cls.x, "size": cls.size,
                "file": _write_class(ctx, cls),
                "tight": tight.as_dict()})
    return out


def cmd_verify(ctx: Context) -> dict:
    cls = ctx.load()
    x = ctx.args.x if ctx.args.x is not None else cls.x
    rep = klein.verify_tight(ctx.geom, cls.mask, x)
    out = ctx.header("verify")
    out.update({"class": cls.name, "tight": rep.as_dict()})
    return out


def cmd_characters(ctx: Context) -> dict:
    cls = ctx.load()
    g = ctx.geom
    out = ctx.header("characters")
    out["class"] = cls.name
    kinds = ("star", "plane") if ctx.args.kind == "both" else (ctx.args.kind,)
    for kind in kinds:
        prof = (lc.star_characters if kind == "star" else lc.plane_characters)(g, cls.mask)
        total = sum(prof.spectrum.values())
        weighted = sum(v * m for v, m in prof.spectrum.items())
        ok = total == g.n_points and weighted == (ctx.q + 1) * cls.size
        block = {"values": prof.values,
                 "spectrum": {str(v): m for v, m in sorted(prof.spectrum.items())},
                 "double_count": {"pass": bool(ok)}}
        if cls.name == "derived":
            fs, fp = lc.derived_character_formulas(ctx.q)
            want = sorted(fs if kind == "star" else fp)
            # small q leaves some point categories empty, so only a subset shows
            block["formula_values"] = {"expected": want,
                                       "pass": set(prof.values) <= set(want)}
    if cls.name == "derived":
        out["breakdown"] = lc.check_derived_breakdown(ctx.pencil, cls.mask)
        out[kind] = block
    return out


def cmd_compare(ctx: Context) -> dict:
    cls = ctx.load()
    g = ctx.geom
    s = lc.star_characters(g, cls.mask).values
    p = lc.plane_characters(g, cls.mask).values
    out = ctx.header("compare-known")
    out.update({"class": cls.name, "star_values": s, "plane_values": p,
                "known": lc.known_family_characters(ctx.q),
                "verdicts": lc.compare_known(ctx.q, s, p)})
    return out


def cmd_spread(ctx: Context) -> dict:
    cls = ctx.load()
    rep = lc.spread_sample_test(ctx.geom, cls.mask, cls.x, n=ctx.args.samples,
                                seed=ctx.args.seed, jobs=ctx.args.jobs)
    out = ctx.header("spread-test")
    out.update({"class": cls.name, "spread": rep})
    return out


def cmd_report(ctx: Context) -> dict:
    cls = ctx.load()
    g, P = ctx.geom, ctx.pencil
    tight = klein.verify_tight(g, cls.mask, cls.x)
    pre = None
    if cls.name == "derived" or ctx.args.cls == "derived":
        L = lc.build_bruen_drudge(P)
        A, B = P.build_A_B()
        pre = lc.check_derivation_preconditions(P, L, A, B)["pass"]
    s = lc.star_characters(g, cls.mask).values
    p = lc.plane_characters(g, cls.mask).values
    verdicts = {k: v["verdict"] for k, v in lc.compare_known(ctx.q, s, p).items()}
    out = ctx.header("report")
    out.update({"class": cls.name, "x": cls.x, "size": cls.size,
                "tight_pass": tight.passed, "precondition_pass": pre,
                "star_values": s, "plane_values": p, "verdicts": verdicts,
                "seed": ctx.args.seed, "runtime_ms": None})
    return out


COMMANDS = {
    "labels": cmd_labels, "orbits": cmd_orbits, "build": cmd_build,
    "verify": cmd_verify, "characters": cmd_characters,
    "compare-known": cmd_compare, "spread-test": cmd_spread,
    "report": cmd_report,
}


# -- pass/fail --------------------------------------------------------------------------


def failures(doc, path: str = "") -> list[str]:
    """Paths of every block whose 'pass' (or 'tight_pass' etc.) is false."""
    bad = []
    if isinstance(doc, dict):
        for key, val in doc.items():
            here = f"{path}.{key}" if path else key
            if (key == "pass" or key.endswith("_pass")) and val is False:
                bad.append(here)
            else:
                bad.extend(failures(val, here))
    elif isinstance(doc, list):
        for i, val in enumerate(doc):
            bad.extend(failures(val, f"{path}[{i}]"))
    return bad


def _flatten(doc, prefix: str = "") -> list[tuple[str, str]]:
    rows = []
    if isinstance(doc, dict):
        for k, v in doc.items():
            rows.extend(_flatten(v, f"{prefix}.{k}" if prefix else k))
    elif isinstance(doc, list) and doc and isinstance(doc[0], (dict, list)):
        for i, v in enumerate(doc):
            rows.extend(_flatten(v, f"{prefix}[{i}]"))
    else:
        val = " ".join(map(str, doc)) if isinstance(doc, list) else doc
        rows.append((prefix, "" if val is None else str(val).lower()
                     if isinstance(val, bool) else str(val)))
    return rows


def render(doc: dict, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(_flatten(doc))
        return buf.getvalue()
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# -- argument parsing -------------------------------------------------------------------


def _env_jobs() -> int:
    try:
        return max(1, int(os.environ.get("CL_JOBS", "1")))
    except ValueError:
        return 1


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, help="field order (odd prime power)")
    common.add_argument("--p", type=int, help="characteristic, with --k")
    common.add_argument("--k", type=int, default=1, help="extension degree")
    common.add_argument("--modulus", help="monic modulus coefficients c0,c1,...,1")
    common.add_argument("--lambda-bar", dest="lambda_bar",
                        help="non-square, as comma-separated coefficients")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=_env_jobs(),
                        help="worker threads (default $CL_JOBS or 1)")
    common.add_argument("--timing", action="store_true",
                        help="record runtime_ms (breaks byte-identical output)")

    def with_class(sp, required=False):
        g = sp.add_mutually_exclusive_group(required=required)
        g.add_argument("--class", dest="cls", choices=CLASSES)
        g.add_argument("--file", help="line-class file written by 'build --out'")
        sp.add_argument("--x", type=int, help="parameter x (default from the file)")
        sp.add_argument("--side", choices=("on", "os"), default="on")

    ap = argparse.ArgumentParser(prog="cameron-liebler",
                                 description="Exact checks of Cameron-Liebler line classes in PG(3,q).")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("labels", parents=[common], help="point/line censuses and tallies")
    sub.add_parser("orbits", parents=[common], help="orbits of G on points and lines")
    sp = sub.add_parser("build", parents=[common], help="construct a line class")
    sp.add_argument("--class", dest="cls", choices=CLASSES, required=True)
    sp.add_argument("--side", choices=("on", "os"), default="on")
    sp.add_argument("--out", help="save the class as a line-index file")
    with_class(sub.add_parser("verify", parents=[common], help="tight-set test"), True)
    sp = sub.add_parser("characters", parents=[common], help="star/plane characters")
    with_class(sp)
    sp.add_argument("--kind", choices=("star", "plane", "both"), default="both")
    with_class(sub.add_parser("compare-known", parents=[common],
                              help="character discriminators vs known families"))
    sp = sub.add_parser("spread-test", parents=[common], help="random regular spreads")
    with_class(sp)
    sp.add_argument("--samples", type=int, default=100)
    with_class(sub.add_parser("report", parents=[common], help="summary report"))
    sub.add_parser("lines", parents=[common], help="CSV of the line table")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    if getattr(args, "cls", None) is None and not getattr(args, "file", None):
        if args.command not in ("labels", "orbits", "lines"):
            args.cls = "derived"
    t0 = time.perf_counter()
    try:
        ctx = Context(args)
        if args.command == "lines":
            text = ctx.geom.lines_csv()
            ok = True
        else:
            doc = COMMANDS[args.command](ctx)
            if args.timing:
                doc["runtime_ms"] = round((time.perf_counter() - t0) * 1000, 3)
            bad = failures(doc)
            doc["failures"] = bad
            ok = not bad
            text = render(doc, args.format)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
