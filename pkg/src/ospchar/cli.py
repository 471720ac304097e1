"""Command-line interface: ``ospchar {char,verify,tables} ...``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from fractions import Fraction
from typing import Sequence

from . import admissible, branching, charseries, fusion
from .admissible import WeightSet
from .charseries import TRUNC_CAP, AlgebraType
from .rootdata import Weight, is_dominant

N_CAP = 6


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- argument helpers --------------------------------------------------------


def _weight(text: str, n: int, name: str) -> Weight:
    try:
        coords = [Fraction(c.strip()) for c in text.split(",") if c.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--{name}: cannot parse {text!r}")
    if len(coords) == 1 and n > 1 and coords[0] == 0:
        coords = coords * n
    if len(coords) != n:
        raise UsageError(f"--{name} needs {n} coordinates, got {len(coords)}")
    return Weight(coords)


def _int_weight(text: str, n: int, name: str) -> Weight:
    w = _weight(text, n, name)
    if not w.is_integral():
        raise UsageError(f"--{name} must have integer coordinates")
    return w


def _atype(text: str) -> AlgebraType:
    try:
        return {"sp": AlgebraType.SP, "osp": AlgebraType.OSP}[text]
    except KeyError:
        raise UsageError(f"--type must be sp or osp, got {text!r}")


def _need(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required")


def _check_caps(args):
    if getattr(args, "n", None) is not None and not 1 <= args.n <= N_CAP:
        raise UsageError(f"--n must be between 1 and {N_CAP}")
    if getattr(args, "trunc", None) is not None and not 0 <= args.trunc <= TRUNC_CAP:
        raise UsageError(f"--trunc must be between 0 and {TRUNC_CAP}")
    if getattr(args, "workers", 1) < 1:
        raise UsageError("--workers must be positive")


# -- output ------------------------------------------------------------------


def _emit(obj, fmt: str, rows: list[list] | None = None, text: str | None = None) -> str:
    if fmt == "json":
        return json.dumps(obj, sort_keys=True, indent=1)
    if fmt == "csv":
        if rows is None:
            raise UsageError("csv output is only available for tables")
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return buf.getvalue().rstrip("\n")
    return text if text is not None else json.dumps(obj, sort_keys=True)


def _series_text(ch: charseries.FormalCharacter) -> str:
    lines = [f"n={ch.n} trunc={ch.trunc} q_offset={ch.q_offset} terms={len(ch)}"]
    for (coords, g), v in sorted(ch.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        lines.append(f"{v:+d} e^{list(coords)} q^{g}")
    return "\n".join(lines)


def _qseries_text(s: charseries.QSeries) -> str:
    return " ".join(f"{c:+d}q^{e}" for e, c in sorted(s.terms.items())) or "0"


# -- char --------------------------------------------------------------------


def cmd_char(args) -> tuple[int, str]:
    _need(args, "n")
    trunc = args.trunc if args.trunc is not None else 4
    kind = args.kind
    if kind == "theta":
        ch = charseries.theta_sum(args.n, trunc)
    elif kind == "denominator":
        ch = charseries.denominator(_atype(args.type), args.n, trunc)
    elif kind == "verma":
        _need(args, "lam")
        lam = _int_weight(args.lam, args.n, "lam")
        ch = charseries.verma_character(_atype(args.type), lam, trunc)
    elif kind == "weyl":
        _need(args, "mu")
        mu = _int_weight(args.mu, args.n, "mu")
        if not is_dominant(mu):
            raise UsageError("--mu must be dominant")
        ch = charseries.weyl_module_character(_atype(args.type), mu, trunc)
    else:
        _need(args, "lam", "mu", "k")
        lam = _int_weight(args.lam, args.n, "lam")
        mu = _int_weight(args.mu, args.n, "mu")
        res = branching.w_module_character(lam, mu, Fraction(args.k), trunc)
        obj = {
            "offset": str(res.offset),
            "via_conformal_weight": res.via_conformal_weight.to_json_obj(),
            "via_delta": res.via_delta.to_json_obj(),
        }
        text = f"offset {res.offset}\n{_qseries_text(res.via_delta)}"
        return 0, _emit(obj, args.format, text=text)
    return 0, _emit(ch.to_json_obj(), args.format, text=_series_text(ch))


# -- verify ------------------------------------------------------------------


def cmd_verify(args) -> tuple[int, str]:
    ident = args.identity
    if ident != "bijections":
        _need(args, "n")
    if ident == "triple-product":
        reports = [charseries.verify_triple_product(args.n, args.trunc if args.trunc is not None else 6)]
    elif ident == "branching":
        _need(args, "mu")
        mu = _int_weight(args.mu, args.n, "mu")
        if not is_dominant(mu):
            raise UsageError("--mu must be dominant")
        trunc = args.trunc if args.trunc is not None else 6
        reports = [branching.verify_branching_identity(args.n, mu, trunc, args.workers)]
    elif ident == "singular-vanishing":
        trunc = args.trunc if args.trunc is not None else 10
        reports = [branching.verify_singular_vanishing(args.n, args.lam_bound, args.mu_bound, trunc)]
    elif ident == "delta-lemma":
        reports = [branching.verify_delta_lemma_random(args.n, args.cases, args.seed)]
    elif ident == "main-theorem":
        trunc = args.trunc if args.trunc is not None else 6
        if args.lam is not None or args.mu is not None or args.k is not None:
            _need(args, "lam", "mu", "k")
            lam = _int_weight(args.lam, args.n, "lam")
            mu = _int_weight(args.mu, args.n, "mu")
            reports = [branching.verify_main_theorem(lam, mu, Fraction(args.k), trunc)]
        else:
            reports = [branching.verify_main_theorem_random(args.n, args.cases, args.seed, trunc)]
    else:
        ranks = [args.n] if args.n is not None else range(1, 5)
        reports = []
        for n in ranks:
            ps = [args.p] if args.p is not None else range(n + 1, 13)
            reports += [admissible.verify_bijections(n, p) for p in ps]
    ok = all(r.ok for r in reports)
    objs = [r.to_json_obj() for r in reports]
    obj = objs[0] if len(objs) == 1 else {"status": "ok" if ok else "mismatch", "reports": objs}
    text = "\n".join(f"{r.identity} {json.dumps(r.params, sort_keys=True)} trunc={r.trunc}: {r.status}" for r in reports)
    return (0 if ok else 1), _emit(obj, args.format, text=text)


# -- tables ------------------------------------------------------------------


def _fusion_text(table: fusion.FusionTable) -> str:
    lines = [json.dumps(table.to_json_obj()["meta"], sort_keys=True)]
    for a in table.alphabet:
        for b in table.alphabet:
            prod = table.product(a, b)
            rhs = " + ".join(f"{m}*{fusion._label_json(c)}" for c, m in prod.items()) or "0"
            lines.append(f"{fusion._label_json(a)} x {fusion._label_json(b)} = {rhs}")
    return "\n".join(lines)


def cmd_tables(args) -> tuple[int, str]:
    kind = args.kind
    _need(args, "n")
    if kind == "admissible":
        _need(args, "set", "p")
        try:
            which = WeightSet(args.set.upper())
        except ValueError:
            raise UsageError(f"--set must be one of {', '.join(w.value for w in WeightSet)}")
        q = args.q if args.q is not None else 1
        weights = admissible.enumerate_weights(which, args.p, q, args.n)
        labels = [[str(c) for c in w.coords] for w in weights]
        obj = {"set": which.value, "n": args.n, "p": args.p, "q": q, "weights": labels}
        rows = [[f"c{i + 1}" for i in range(args.n)]] + labels
        return 0, _emit(obj, args.format, rows, "\n".join(",".join(r) for r in labels))
    if kind == "decompose":
        _need(args, "u", "v")
        obj = admissible.decomposition_table(args.n, args.u, args.v)
        rows = [["mu", "sector", "lambda", "label"]]
        for row in obj["rows"]:
            for lam, label in row["summands"]:
                rows.append([json.dumps(row["mu"]), row["sector"], json.dumps(lam), json.dumps(label)])
        text = "\n".join(f"{r[1]} mu={r[0]}: {r[2]}" for r in rows[1:])
        return 0, _emit(obj, args.format, rows, text)
    if kind == "fusion":
        if args.level is not None:
            key = {"type": "C", "n": args.n, "level": args.level}
            build = lambda: fusion.affine_fusion_table(args.level, args.n, args.workers)
        else:
            _need(args, "p", "q")
            key = {"type": "W", "n": args.n, "p": args.p, "q": args.q, "rule": args.rule}
            build = lambda: fusion.w_fusion_table(args.p, args.q, args.n, args.workers, args.rule)
    else:
        _need(args, "u", "v")
        key = {"type": "osp", "n": args.n, "u": args.u, "v": args.v, "ramond": int(args.ramond)}
        build = lambda: fusion.osp_fusion_table(args.u, args.v, args.n, args.ramond, args.workers)
    table = fusion.cached_table(key, build, use_cache=not args.no_cache, directory=args.cache_dir)
    return 0, _emit(table.to_json_obj(), args.format, table.to_csv_rows(), _fusion_text(table))


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["json", "csv", "text"], default="json")
    common.add_argument("--n", type=int)
    common.add_argument("--type", default="sp")
    common.add_argument("--trunc", type=int)
    common.add_argument("--lam")
    common.add_argument("--mu")
    common.add_argument("--k")
    common.add_argument("--p", type=int)
    common.add_argument("--q", type=int)
    common.add_argument("--u", type=int)
    common.add_argument("--v", type=int)
    common.add_argument("--level", type=int)
    common.add_argument("--set")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cases", type=int, default=20)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--lam-bound", type=int, default=8)
    common.add_argument("--mu-bound", type=int, default=4)
    common.add_argument("--rule", choices=list(fusion.RIGHT_RULES), default="dual")
    common.add_argument("--ramond", action="store_true", help="include spinor labels in osp tables")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--cache-dir")
    common.add_argument("--output", help="write to this file instead of stdout")

    parser = _Parser(prog="ospchar", description="Characters, branching functions and fusion rings for sp_2n and osp(1|2n).")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("char", parents=[common], help="emit a formal character")
    p.add_argument("kind", choices=["verma", "weyl", "wmod", "denominator", "theta"])
    p.set_defaults(func=cmd_char)
    p = sub.add_parser("verify", parents=[common], help="check an identity; exit 0 iff it holds")
    p.add_argument(
        "identity",
        choices=["triple-product", "branching", "singular-vanishing", "delta-lemma", "main-theorem", "bijections"],
    )
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("tables", parents=[common], help="emit admissible sets, decompositions or fusion tables")
    p.add_argument("kind", choices=["admissible", "decompose", "fusion", "osp-fusion"])
    p.set_defaults(func=cmd_tables)
    for action in sub.choices.values():
        action.__class__ = _Parser
    return parser


_NEGATIVE = re.compile(r"^-\d[\d/.,-]*$")


def _glue_negatives(argv: Sequence[str]) -> list[str]:
    # argparse takes "-7/3" or "-1,0" for a flag; rewrite as --k=-7/3
    out: list[str] = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEGATIVE.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(_glue_negatives(sys.argv[1:] if argv is None else argv))
        _check_caps(args)
        code, out = args.func(args)
    except UsageError as exc:
        print(f"ospchar: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, KeyError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"ospchar: error: {msg}", file=sys.stderr)
        return 2
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
