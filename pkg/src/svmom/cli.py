"""Command-line interface.

Examples::

    svmom moment 1fsv 1
    svmom cov 1fsv 2 1 --format json
    svmom eval 1fsvj moment 2 --params bench.txt
    svmom diff 1fsv cov 2 1 --wrt k
    svmom validate 1fsvj --orders 5 --cov-orders 1:1,2:1,1:2 --n-obs 1000000
"""
from __future__ import annotations

import argparse
import sys

from . import mdl_1fsv, mdl_1fsvj
from .euler import InvalidParams, SimConfig
from .evaluate import (PARAM_NAMES, ParamFileError, SingularEvaluation, UnknownParameter,
                       diff_poly, eval_poly, load_params)
from .poly import PolyError
from .render import render_latex

MODELS = {"1fsv": mdl_1fsv, "1fsvj": mdl_1fsvj}
KINDS = ("moment", "cmom", "cov")


class UsageError(Exception):
    pass


def _formula(model: str, kind: str, orders: list[int], max_order: int):
    mod = MODELS[model]
    need = 2 if kind == "cov" else 1
    if len(orders) != need:
        raise UsageError(f"{kind} needs {need} order argument(s), got {len(orders)}")
    if any(o < 0 for o in orders):
        raise UsageError("orders must be nonnegative")
    if sum(orders) > max_order:
        raise UsageError(f"total order {sum(orders)} exceeds --max-order {max_order}")
    if kind == "cov":
        if min(orders) < 1:
            raise UsageError("cov orders must be >= 1")
        return mod.cov_yy(*orders)
    return (mod.moment_y if kind == "moment" else mod.cmom_y)(orders[0])


def _emit(poly, fmt: str):
    if fmt == "json":
        sys.stdout.write(poly.to_json().decode() + "\n")
    elif fmt == "latex":
        sys.stdout.write(render_latex(poly) + "\n")
    else:
        sys.stdout.write(poly.render() + "\n")


def _resolve(args, with_kind=False):
    """Split the free positionals into ``[MODEL] [KIND] ORDER...``."""
    words = list(args.words)
    model = args.model_opt
    if words and words[0] in MODELS:
        if model and model != words[0]:
            raise UsageError("conflicting model arguments")
        model = words.pop(0)
    if model is None:
        raise UsageError("a model is required (1fsv or 1fsvj)")
    if with_kind:
        if words and words[0] in KINDS:
            if args.kind and args.kind != words[0]:
                raise UsageError("conflicting formula kinds")
            args.kind = words.pop(0)
        if args.kind is None:
            raise UsageError(f"a formula kind is required ({', '.join(KINDS)})")
    try:
        orders = [int(w) for w in words]
    except ValueError:
        raise UsageError(f"unexpected argument(s): {' '.join(words)}") from None
    return model, orders + list(args.order or [])


def _parse_orders(text: str) -> list[int]:
    if "," not in text and text.strip().isdigit():
        return list(range(1, int(text) + 1))
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad --orders value {text!r}") from None


def _parse_cov_orders(text: str) -> list[tuple[int, int]]:
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            a, b = item.split(":")
            out.append((int(a), int(b)))
        except ValueError:
            raise UsageError(f"bad --cov-orders item {item!r}; expected L1:L2") from None
    return out


def _params(path):
    if path is None:
        raise UsageError("--params FILE is required")
    try:
        return load_params(path)
    except OSError as exc:
        raise UsageError(f"cannot read parameter file: {exc}") from exc
    except ParamFileError as exc:
        raise UsageError(str(exc)) from exc


def cmd_formula(args):
    model, orders = _resolve(args)
    _emit(_formula(model, args.command, orders, args.max_order), args.format)


def cmd_eval(args):
    model, orders = _resolve(args, with_kind=True)
    poly = _formula(model, args.kind, orders, args.max_order)
    params = _params(args.params)
    print(repr(eval_poly(poly, params)))


def cmd_diff(args):
    model, orders = _resolve(args, with_kind=True)
    if args.wrt is None:
        raise UsageError("--wrt PARAM is required")
    if args.wrt not in PARAM_NAMES:
        raise UsageError(f"unknown parameter {args.wrt!r}; choose from {', '.join(PARAM_NAMES)}")
    poly = diff_poly(_formula(model, args.kind, orders, args.max_order), args.wrt)
    if args.params:
        print(repr(eval_poly(poly, _params(args.params))))
    else:
        _emit(poly, args.format)


# benchmark SVJ setting (rho = -0.7)
DEFAULT_VALIDATE_PARAMS = dict(mu=0.125, k=0.1, theta=0.25, sigma_v=0.1, rho=-0.7, h=1.0,
                               lam=0.01, mu_j=0.0, sigma_j=0.05)


def cmd_validate(args):
    from .evaluate import SvjParams
    from .validation import build_report

    model, orders = _resolve(args)
    if orders:
        raise UsageError("validate takes orders via --orders / --cov-orders")
    params = _params(args.params) if args.params else SvjParams(**DEFAULT_VALIDATE_PARAMS)
    mom = _parse_orders(args.orders_opt) if args.orders_opt else []
    cov = _parse_cov_orders(args.cov_orders) if args.cov_orders else []
    if not mom and not cov:
        raise UsageError("nothing to validate: give --orders and/or --cov-orders")
    too_big = [o for o in mom if o > args.max_order] + [c for c in cov if sum(c) > args.max_order]
    if too_big:
        raise UsageError(f"orders exceed --max-order {args.max_order}: {too_big}")
    cfg = SimConfig(n_obs=args.n_obs, n_substeps=args.substeps, seed=args.seed)
    report = build_report(model, mom, cov, params, cfg, workers=args.workers)
    out = {"text": report.to_text, "json": report.to_json, "csv": report.to_csv}[args.format]()
    sys.stdout.write(out if out.endswith("\n") else out + "\n")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="svmom", description="Exact moments and covariances of Heston/SVJ returns.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_kind=False, formats=("text", "latex", "json")):
        p.add_argument("words", nargs="*", metavar="MODEL [KIND] ORDER",
                       help="model (1fsv or 1fsvj)" + (", formula kind" if with_kind else "")
                       + " and order(s); cov takes two orders")
        p.add_argument("--model", dest="model_opt", choices=sorted(MODELS))
        if with_kind:
            p.add_argument("--kind", choices=KINDS)
        p.add_argument("--order", action="append", type=int)
        p.add_argument("--format", choices=formats, default="text")
        p.add_argument("--max-order", type=int, default=8)

    for name in ("moment", "cmom", "cov"):
        p = sub.add_parser(name, help=f"derive the {name} polynomial")
        common(p)
        p.set_defaults(func=cmd_formula)

    p = sub.add_parser("eval", help="evaluate a formula at a parameter file")
    common(p, with_kind=True)
    p.add_argument("--params", metavar="FILE")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("diff", help="differentiate a formula w.r.t. a parameter")
    common(p, with_kind=True)
    p.add_argument("--wrt", metavar="PARAM")
    p.add_argument("--params", metavar="FILE", help="evaluate the derivative instead of printing it")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("validate", help="compare derived values with an Euler sample path")
    common(p, formats=("text", "json", "csv"))
    p.add_argument("--orders", dest="orders_opt", metavar="N|L,L,...",
                   help="moment orders: N means 1..N, or a comma list")
    p.add_argument("--cov-orders", metavar="L1:L2,...")
    p.add_argument("--params", metavar="FILE")
    p.add_argument("--n-obs", type=_positive_int, default=4_000_000)
    p.add_argument("--substeps", type=_positive_int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"svmom: error: {exc}", file=sys.stderr)
        return 2
    except (SingularEvaluation, UnknownParameter, PolyError, InvalidParams, ValueError,
            ArithmeticError) as exc:
        print(f"svmom: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
