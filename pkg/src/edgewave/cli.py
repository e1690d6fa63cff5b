"""Command-line front end: ``edgewave <subcommand> ...``.

Every subcommand emits CSV (header row, one record per line) or JSON (an
array of objects).  Floats are written with 17 significant digits so that
identical flags give byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Iterable, Optional, Sequence

import numpy as np

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (tuple, list)):
        return ";".join(_fmt(u) for u in v)
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating,)):
        v = float(v)
    if isinstance(v, float):
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (tuple, list)):
        return [_jsonable(u) for u in v]
    return v


def emit(records: Sequence[dict], fmt: str, out) -> None:
    if fmt == "json":
        json.dump([{k: _jsonable(v) for k, v in r.items()} for r in records], out, indent=1)
        out.write("\n")
        return
    if not records:
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(records[0].keys())
    writer.writerow(header)
    for r in records:
        writer.writerow([_fmt(r[h]) for h in header])
    out.write(buf.getvalue())


# ---------------------------------------------------------------- subcommands


def cmd_tw(args) -> list:
    from . import fredholm
    from .specfun import chi0

    out = []
    for s in args.s:
        ld = fredholm.log_det(s, args.nodes)
        asy = -abs(s) ** 3 / 12 - math.log(abs(s)) / 8 + chi0() if s < 0 else float("nan")
        out.append({"s": s, "nodes": args.nodes, "logdet": ld, "asymptote": asy, "residual": ld - asy})
    return out


def cmd_hm(args) -> list:
    from . import painleve2

    prof = painleve2.solve_hastings_mcleod(L=args.L, n=args.n)
    H = painleve2.hamiltonian_pII(prof, prof.grid)
    return [
        {"x": float(x), "q": float(q), "qprime": float(qp), "H": float(h)}
        for x, q, qp, h in zip(prof.grid, prof.q, prof.qprime, H)
    ]


def cmd_pi2(args) -> list:
    from . import pi2k_profile

    prof = pi2k_profile.solve_tritronquee(L=args.L, n=args.n, t1=args.t1)
    hA = pi2k_profile.h_asy(1, prof.grid, args.t1)
    return [
        {"x": float(x), "q": float(q), "h": float(h), "h_minus_hasy": float(h - a)}
        for x, q, h, a in zip(prof.grid, prof.q, prof.h, hA)
    ]


def cmd_hierarchy(args) -> list:
    from . import hierarchy

    p = hierarchy.lenard_L(args.j)
    return [{"j": args.j, "L": str(p), "terms": len(p.terms), "max_order": p.max_order()}]


def _parse_number(text: str):
    from fractions import Fraction

    try:
        return Fraction(text) if "/" in text else (int(text) if text.lstrip("-").isdigit() else float(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text}") from exc


def cmd_gfun(args) -> list:
    from . import asymptotics as A

    data = A.gfunction_data(args.k, args.r, args.y, lam=args.lam)
    base = {
        "k": args.k,
        "r": float(args.r),
        "y": float(args.y),
        "b": tuple(float(b) for b in data.b),
        "d1": float(data.d1),
        "r0": data.r0,
        "kappa0": data.kappa0 if data.kappa0 is not None else float("nan"),
        "region": data.region,
    }
    etas = args.eta or []
    if not etas:
        return [base]
    out = []
    for eta in etas:
        rec = dict(base, eta=eta)
        rec["p1"] = A.p1(data, eta)
        rec["p1_tilde"] = A.p1_tilde(data, eta)
        rec["g1"] = A.g1(data, eta) if eta > float(data.r) else float("nan")
        rec["theta"] = A.theta(args.k, eta, float(args.y)) if eta > 0 else float("nan")
        out.append(rec)
    return out


def _Ih_for_cli(args, x: float):
    if args.Ih is not None:
        return args.Ih, False
    if args.no_Ih:
        return None, True
    if args.k != 1:
        raise ValueError("I_h is only computed for k = 1; pass --Ih VALUE or --no-Ih")
    from . import pi2k_profile

    prof = _pi2_cached(args.L, args.n)
    return pi2k_profile.I_h(prof, x).value, False


_PI2_CACHE: dict = {}


def _pi2_cached(L, n):
    from . import pi2k_profile

    key = (L, n)
    if key not in _PI2_CACHE:
        _PI2_CACHE[key] = pi2k_profile.solve_tritronquee(L=L, n=n)
    return _PI2_CACHE[key]


def cmd_asy(args) -> list:
    from . import asymptotics as A

    out = []
    for x in args.x:
        Ih, missing = _Ih_for_cli(args, x)
        br = A.theorem_expansion(args.k, args.s, x, Ih_value=Ih, allow_missing_Ih=missing, simplify_log=args.simplify_log)
        rec = {"k": args.k, "s": args.s, "x": x}
        rec.update(br.terms())
        rec["total"] = br.total
        rec["tags"] = ";".join(br.tags)
        out.append(rec)
    return out


def cmd_transition(args) -> list:
    from . import asymptotics as A

    out = []
    for s in args.s:
        st = args.stilde if args.stilde is not None else -(abs(s) ** args.stilde_exponent)
        out.append({"k": args.k, "s": s, "stilde": st, "defect": A.transition_eval(args.k, s, st, simplify_log=args.simplify_log)})
    return out


def cmd_scaffold(args) -> list:
    from dataclasses import asdict

    from . import asymptotics as A

    return [asdict(A.proof_scaffold(args.k, s, args.sign)) for s in args.s]


def cmd_verify(args) -> int:
    from . import acceptance

    results = acceptance.run_all(quick=args.quick, echo=lambda line: print(line, flush=True))
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {', '.join(failed)}" if failed else ""))
    return EXIT_NUMERICAL if failed else EXIT_OK


# ---------------------------------------------------------------- parser


def _add_output(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--dump", choices=("csv", "json"), dest="format", help="alias of --format")
    p.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edgewave", description="Higher-order Tracy-Widom toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tw", help="Airy-kernel log-determinant")
    p.add_argument("--s", type=float, nargs="+", required=True)
    p.add_argument("--nodes", type=int, default=120)
    _add_output(p)

    p = sub.add_parser("hm", help="Hastings-McLeod profile on a grid")
    p.add_argument("--L", type=float, default=12.0)
    p.add_argument("--n", type=int, default=4000)
    _add_output(p)

    p = sub.add_parser("pi2", help="P_I^2 tritronquee profile (x, q, h, h - h_Asy)")
    p.add_argument("--L", type=float, default=40.0)
    p.add_argument("--n", type=int, default=8001)
    p.add_argument("--t1", type=float, default=0.0)
    _add_output(p)

    p = sub.add_parser("hierarchy", help="Lenard-Magri operators")
    hs = p.add_subparsers(dest="action", required=True)
    show = hs.add_parser("show")
    show.add_argument("--j", type=int, required=True)
    show.add_argument("--format", choices=("text", "csv", "json"), default="text")
    show.add_argument("--output", "-o", default=None)

    p = sub.add_parser("gfun", help="g-function coefficients and polynomials")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--r", type=_parse_number, required=True)
    p.add_argument("--y", type=_parse_number, required=True)
    p.add_argument("--lam", type=float, default=None)
    p.add_argument("--eta", type=float, nargs="*")
    _add_output(p)

    p = sub.add_parser("asy", help="itemized large-gap expansion")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--x", type=float, nargs="+", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--Ih", type=float, default=None, help="supply I_h(x) directly")
    g.add_argument("--no-Ih", action="store_true", help="set I_h = 0 (structural checks)")
    p.add_argument("--simplify-log", action="store_true")
    p.add_argument("--L", type=float, default=40.0, help="window for the k = 1 profile")
    p.add_argument("--n", type=int, default=8001)
    _add_output(p)

    p = sub.add_parser("transition", help="defect against the Tracy-Widom asymptote")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--s", type=float, nargs="+", required=True)
    p.add_argument("--stilde", type=float, default=None)
    p.add_argument("--stilde-exponent", type=float, default=0.3, help="stilde = -|s|^e when --stilde is absent")
    p.add_argument("--simplify-log", action="store_true")
    _add_output(p)

    p = sub.add_parser("scaffold", help="s1, s2, J2 and the cancellation combination")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--s", type=float, nargs="+", required=True)
    p.add_argument("--sign", type=int, choices=(1, -1), default=1)
    _add_output(p)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--quick", action="store_true")
    return parser


HANDLERS = {
    "tw": cmd_tw,
    "hm": cmd_hm,
    "pi2": cmd_pi2,
    "hierarchy": cmd_hierarchy,
    "gfun": cmd_gfun,
    "asy": cmd_asy,
    "transition": cmd_transition,
    "scaffold": cmd_scaffold,
}


def run(argv: Optional[Iterable[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(None if argv is None else list(argv))
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        if args.command == "verify":
            return cmd_verify(args)
        records = HANDLERS[args.command](args)
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"edgewave {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        if args.command == "hierarchy" and args.format == "text":
            out.write(records[0]["L"] + "\n")
        else:
            emit(records, args.format, out)
    finally:
        if args.output:
            out.close()
    return EXIT_OK


def main() -> None:
    sys.exit(run())
