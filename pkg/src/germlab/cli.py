"""Command-line interface: exact orbital integrals and verification suites.

Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 computational
error.  Identical configurations produce byte-identical output files; every
emitted document embeds the run configuration and the measure fingerprint.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .errors import (GermlabError, GridTooLarge, InsufficientPrecision,
                     NotRegular, TailUnstable)
from .padic import FieldConfig, SquareClass
from .sl2 import (ALL_ORBITS, Sl2Element, classify, depth, in_g_nil_r,
                  random_conjugate, rep_elliptic)
from .tree import BASE, make_vertex
from .lcfunc import (LCFunction, indicator_lattice, lcfunction_from_json,
                     unit_ball)
from .orbital import (Normalization, brute_force_cell_oracle,
                      nilpotent_orbital, nilpotent_vector, ss_orbital,
                      tree_oracle_compare)
from .germs import (CSV_HEADER, default_basis, default_pool, extract_germs,
                    homogeneity_extend, reports_to_csv, reports_to_json,
                    verify_claim, verify_theorem)


@dataclass
class RunConfig:
    p: int
    precision: int
    r: int
    seed: int
    fmt: str
    depth_strict: bool
    out: Optional[str]

    def field(self) -> FieldConfig:
        return FieldConfig(self.p, self.precision)

    def as_dict(self) -> dict:
        return asdict(self)


def _parse_fraction(s: str) -> Fraction:
    return Fraction(s.strip())


def parse_x_spec(cfg: FieldConfig, spec: str) -> Sl2Element:
    """Accepts "0", "diag(u,-u)", or "[[a,b],[c,-a]]" with rational entries."""
    s = spec.strip().replace(" ", "")
    if s == "0":
        return Sl2Element.zero(cfg)
    if s.startswith("diag(") and s.endswith(")"):
        u, mu = s[5:-1].split(",")
        if _parse_fraction(u) != -_parse_fraction(mu):
            raise ValueError("diag entries must be (u, -u)")
        return Sl2Element.from_rationals(cfg, _parse_fraction(u), 0, 0)
    if s.startswith("[[") and s.endswith("]]"):
        body = s[2:-2]
        row1, row2 = body.split("],[")
        a, b = (_parse_fraction(t) for t in row1.split(","))
        c, d = (_parse_fraction(t) for t in row2.split(","))
        if d != -a:
            raise ValueError("matrix must be trace-zero: [[a,b],[c,-a]]")
        return Sl2Element.from_rationals(cfg, a, b, c)
    raise ValueError(f"unrecognized X spec {spec!r}")


_NIL_LABELS = {"one": SquareClass.ONE, "eps": SquareClass.EPS,
               "pi": SquareClass.PI, "epspi": SquareClass.EPSPI}


def parse_f_spec(cfg: FieldConfig, spec: str) -> LCFunction:
    """Builtins: unit-ball | zero | mp:(m,x):n | nil:label:k | JSON."""
    s = spec.strip()
    if s == "unit-ball":
        return unit_ball(cfg)
    if s == "zero":
        return LCFunction(cfg, [])
    if s.startswith("mp:"):
        _, vtx, n = s.split(":")
        m_str, x_str = vtx.strip("()").split(",")
        v = make_vertex(cfg, int(m_str), Fraction(x_str))
        return indicator_lattice(cfg, v, int(n))
    if s.startswith("nil:"):
        _, label, k = s.split(":")
        cls = _NIL_LABELS[label.lower()]
        from .sl2 import OrbitLabel, rep_nilpotent
        Y = rep_nilpotent(cfg, OrbitLabel("regular", cls))
        return indicator_lattice(cfg, BASE, int(k), center=Y)
    data = json.loads(s if s.startswith("[") else open(s).read())
    return lcfunction_from_json(cfg, data)


def _emit(doc: dict, rc: RunConfig, name: str) -> None:
    doc = {"config": rc.as_dict(),
           "normalization": Normalization(rc.field()).fingerprint(), **doc}
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if rc.out:
        os.makedirs(rc.out, exist_ok=True)
        path = os.path.join(rc.out, f"{name}.json")
        with open(path, "w") as fh:
            fh.write(text)
        print(f"wrote {path}")
    else:
        sys.stdout.write(text)


def _emit_csv(rows_csv: str, rc: RunConfig, name: str) -> None:
    header = (f"# config: {json.dumps(rc.as_dict(), sort_keys=True)} "
              f"normalization: {Normalization(rc.field()).fingerprint()}\n")
    text = header + rows_csv
    if rc.out:
        os.makedirs(rc.out, exist_ok=True)
        path = os.path.join(rc.out, f"{name}.csv")
        with open(path, "w") as fh:
            fh.write(text)
        print(f"wrote {path}")
    elif rc.fmt == "csv":
        sys.stdout.write(text)


def cmd_nilpotent(rc: RunConfig, f_spec: str) -> int:
    cfg = rc.field()
    f = parse_f_spec(cfg, f_spec)
    fz = f.dilate(cfg.zeta**2)
    table = {}
    scaling = {}
    ok = True
    for om in ALL_ORBITS:
        base = nilpotent_orbital(om, f).value
        dil = nilpotent_orbital(om, fz).value
        table[repr(om)] = str(base)
        match = dil == cfg.qpow(om.dim) * base
        ok = ok and match
        scaling[repr(om)] = {"q^d": str(cfg.qpow(om.dim)), "dilated": str(dil),
                             "match": match}
    _emit({"f": f_spec, "table": table, "scaling_check": scaling}, rc, "nilpotent")
    return 0 if ok else 1


def cmd_orbital(rc: RunConfig, x_spec: str, f_spec: str) -> int:
    cfg = rc.field()
    X = parse_x_spec(cfg, x_spec)
    f = parse_f_spec(cfg, f_spec)
    res = ss_orbital(X, f)
    k = classify(X)
    _emit({"X": x_spec, "f": f_spec, "torus": k.torus_kind(),
           "depth": str(depth(X)), "result": res.to_json()}, rc, "orbital")
    return 0


def _standard_grid(cfg: FieldConfig, r: int, seed: int, strict: bool
                   ) -> List[Tuple[str, Sl2Element]]:
    p, e = cfg.p, cfg.eps
    out = []
    for k in (1, 2, 3):
        out.append((f"split-d{k}", Sl2Element.from_rationals(cfg, p**k, 0, 0)))
    for k in (1, 2):
        out.append((f"unram-d{k}-T", rep_elliptic(cfg, e * p ** (2 * k), tag=True)))
        out.append((f"unram-d{k}-F", rep_elliptic(cfg, e * p ** (2 * k), tag=False)))
    for k in (1, 3):
        out.append((f"ramPi-d{k}of2-T", rep_elliptic(cfg, p**k, tag=True)))
        out.append((f"ramPi-d{k}of2-F", rep_elliptic(cfg, p**k, tag=False)))
        out.append((f"ramEpsPi-d{k}of2-T", rep_elliptic(cfg, e * p**k, tag=True)))
    out.append(("split-d1-conj", random_conjugate(out[0][1], seed=seed + 7)))
    out.append(("split-d2-conj", random_conjugate(out[1][1], seed=seed + 11)))
    return [(n, X) for n, X in out if in_g_nil_r(X, r, strict=strict)]


def _theorem_family(cfg: FieldConfig, r: int):
    pool = default_pool(cfg, r)
    fam = list(pool)
    fam.append(("combo-a", 2 * pool[0][1] - 3 * pool[1][1]))
    fam.append(("combo-b", pool[2][1] + pool[5][1]))
    from .lcfunc import h_combination
    fam.append(("h-comb", h_combination(pool[1][1], 2)))
    return pool, fam


def cmd_verify(rc: RunConfig, suite: str) -> int:
    cfg = rc.field()
    r = rc.r
    if suite == "theorem":
        pool, fam = _theorem_family(cfg, r)
        grid = _standard_grid(cfg, r, rc.seed, rc.depth_strict)
        reports = verify_theorem(r, fam, grid)
        gated = [x for x in reports if x.gating]
        fails = [x for x in gated if not x.passed]
        _emit_csv(reports_to_csv(reports), rc, f"theorem-r{r}")
        _emit({"suite": "theorem", "r": r, "rows": len(reports),
               "gated": len(gated), "failures": len(fails),
               "failing_rows": [x.csv_row() for x in fails]}, rc, f"theorem-r{r}")
        return 1 if fails else 0
    if suite == "claim":
        pool = default_pool(cfg, r)
        grid = _standard_grid(cfg, r, rc.seed, rc.depth_strict)
        reports = verify_claim(r, pool, grid)
        fails = [x for x in reports if not x.passed]
        _emit_csv(reports_to_csv(reports), rc, f"claim-r{r}")
        _emit({"suite": "claim", "r": r, "rows": len(reports),
               "failures": len(fails),
               "failing_rows": [x.csv_row() for x in fails]}, rc, f"claim-r{r}")
        return 1 if fails else 0
    if suite == "scaling":
        from .germs import construct_Hr_Omega, verify_scaling
        pool = default_pool(cfg, r)
        grid = _standard_grid(cfg, r, rc.seed, rc.depth_strict)
        rows = []
        ok = True
        for om in ALL_ORBITS:
            for name, f in construct_Hr_Omega(r, om, pool):
                for xn, X in grid:
                    good = verify_scaling(r, om, f, X)
                    ok = ok and good
                    rows.append({"f": name, "X": xn, "dim": om.dim, "pass": good})
        _emit({"suite": "scaling", "r": r, "rows": rows}, rc, f"scaling-r{r}")
        return 0 if ok else 1
    if suite == "homogeneity":
        basis = default_basis(cfg)
        bases = [("split", Sl2Element.from_rationals(cfg, cfg.p**2, 0, 0)),
                 ("unram", rep_elliptic(cfg, cfg.eps * cfg.p**4, tag=True)),
                 ("ram", rep_elliptic(cfg, cfg.p**5, tag=True))]
        rows = []
        ok = True
        for name, X in bases:
            t = extract_germs(X, basis)
            t2 = extract_germs(X.scale(cfg.zeta**2), basis)
            good = t2.same_values(homogeneity_extend(t, 1))
            ok = ok and good
            rows.append({"base": name, "pass": good})
        _emit({"suite": "homogeneity", "rows": rows}, rc, "homogeneity")
        return 0 if ok else 1
    if suite == "oracles":
        cfg = rc.field()
        ball = unit_ball(cfg)
        f1 = indicator_lattice(cfg, BASE, 1)
        rows = []
        ok = True
        targets = [
            ("split-d0", Sl2Element.from_rationals(cfg, 1, 0, 0)),
            ("split-d1", Sl2Element.from_rationals(cfg, cfg.p, 0, 0)),
            ("unram-d0", rep_elliptic(cfg, cfg.eps, tag=True)),
            ("ram-d1of2", rep_elliptic(cfg, cfg.p, tag=True)),
        ]
        for name, X in targets:
            for fn, f in (("unit-ball", ball), ("mp:(0,0):1", f1)):
                eng = ss_orbital(X, f).value
                orc = brute_force_cell_oracle(X, f)
                good = orc.agrees_with(eng)
                ok = ok and good
                rows.append({"target": name, "f": fn, "engine": str(eng),
                             "oracle": str(orc.value), "exact": orc.exact,
                             "pass": good})
        for om in ALL_ORBITS:
            eng = nilpotent_orbital(om, ball).value
            orc = brute_force_cell_oracle(om, ball)
            good = orc.agrees_with(eng)
            ok = ok and good
            rows.append({"target": repr(om), "f": "unit-ball", "engine": str(eng),
                         "oracle": str(orc.value), "exact": orc.exact, "pass": good})
        tree_rows, tree_ok = tree_oracle_compare(cfg)
        ok = ok and tree_ok
        _emit({"suite": "oracles", "rows": rows, "tree": tree_rows}, rc, "oracles")
        return 0 if ok else 1
    raise ValueError(f"unknown suite {suite!r}")


def _add_common(ap: argparse.ArgumentParser, suppress: bool) -> None:
    # the same flags are accepted before and after the subcommand; the
    # subcommand copies use SUPPRESS so they never clobber parsed values
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    ap.add_argument("--p", type=int, default=d(5), help="odd prime (default 5)")
    ap.add_argument("--precision", type=int,
                    default=d(int(os.environ.get("GERMLAB_PRECISION", "12"))),
                    help="working digits (env GERMLAB_PRECISION)")
    ap.add_argument("--seed", type=int, default=d(0))
    ap.add_argument("--format", dest="fmt", choices=("json", "csv"), default=d("json"))
    ap.add_argument("--depth-strict", action="store_true",
                    default=d(False),
                    help="use depth(X) > r for grid membership instead of >=")
    ap.add_argument("--out", default=d(None), help="directory for report files")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="germlab",
        description="Exact p-adic orbital integrals and germ verification for sl2")
    _add_common(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    p_nil = sub.add_parser("nilpotent", help="five nilpotent orbital integrals")
    _add_common(p_nil, suppress=True)
    p_nil.add_argument("--f", required=True, help="f-spec (unit-ball|zero|mp:..|nil:..|JSON)")

    p_orb = sub.add_parser("orbital", help="semisimple orbital integral")
    _add_common(p_orb, suppress=True)
    p_orb.add_argument("--X", required=True, help='X-spec ("diag(1,-1)" or [[a,b],[c,-a]])')
    p_orb.add_argument("--f", required=True)

    p_ver = sub.add_parser("verify", help="run a verification suite")
    _add_common(p_ver, suppress=True)
    p_ver.add_argument("suite", choices=("claim", "scaling", "theorem",
                                         "homogeneity", "oracles"))
    p_ver.add_argument("--r", type=int, default=0)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    rc = RunConfig(p=ns.p, precision=ns.precision, r=getattr(ns, "r", 0),
                   seed=ns.seed, fmt=ns.fmt, depth_strict=ns.depth_strict,
                   out=ns.out)
    try:
        if ns.p == 3:
            print("warning: p=3 is allowed but small residue characteristic is "
                  "outside the comfortable regime; default test prime is 5",
                  file=sys.stderr)
        if ns.command == "nilpotent":
            return cmd_nilpotent(rc, ns.f)
        if ns.command == "orbital":
            return cmd_orbital(rc, ns.X, ns.f)
        if ns.command == "verify":
            return cmd_verify(rc, ns.suite)
        return 2
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (NotRegular, TailUnstable, GridTooLarge, InsufficientPrecision) as exc:
        print(f"computational error: {exc}", file=sys.stderr)
        return 3
    except GermlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
