"""Command-line driver.

Subcommands:

  verify <identity_id | spec.json>     run a registered identity or a JSON
                                       equation spec; exit 0 on pass, 1 on fail
  theta <multiplier.json | builtin:X>  theta space dimension and basis dump
  compose <m2.json> <m1.json>          pointwise composition of multipliers
  small-group <multiplier.json>        small Heisenberg structure report
  act <elem.json> <multiplier.json>    action matrix on the canonical basis

Global flags: --cyclotomic-order M, --out FILE, --jobs K, --window R,
--order N.  Mathematical failures exit 1 with a JSON report on stdout;
usage errors exit 2.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import QThetaError, UnknownName, UnresolvedReference
from .heisenberg import HeisElement, HeisRaw
from .jsonio import (
    dump,
    heis_from_json,
    load,
    monomial_from_json,
    multiplier_from_json,
    multiplier_to_json,
    param_from_json,
    point_from_json,
    smallelem_from_json,
)
from .multiplier import Multiplier, compose as compose_multipliers, multiplier_new, power, theta_dim_basis
from .named import builtin_series
from .scalars import CycloField, UnitMonomial, series_to_json
from .series import TorusSeries
from .smallheis import act_on_theta, group_structure
from .torus import QuantParam, TorusPoint
from .verify import (
    REGISTRY,
    EquationSpec,
    EquationTerm,
    emit_report,
    verify_equation,
    verify_named,
)


def builtin_multiplier(name: str, field: CycloField) -> Multiplier:
    p1 = QuantParam.trivial(field, 1)
    q1 = UnitMonomial.q_power(field, 1)
    if name == "jacobi":
        img = HeisElement(p1, q1, TorusPoint.from_q_exps(field, [2]), (1,))
        return multiplier_new(p1, [img], [[q1]])
    if name == "jacobi2":
        return power(builtin_multiplier("jacobi", field), 2)
    if name == "negated":
        img = HeisElement(
            p1, UnitMonomial.q_power(field, -1), TorusPoint.from_q_exps(field, [-2]), (1,)
        )
        return multiplier_new(p1, [img], [[UnitMonomial.q_power(field, -1)]])
    raise UnknownName(f"unknown builtin multiplier {name!r}")


def _load_multiplier(arg: str, field: CycloField) -> Multiplier:
    if arg.startswith("builtin:"):
        return builtin_multiplier(arg.split(":", 1)[1], field)
    return multiplier_from_json(load(arg))


def _spec_from_json(data: dict) -> EquationSpec:
    param = param_from_json(data["param"])
    field = param.field
    terms = []
    for t in data["terms"]:
        coeff = monomial_from_json(t["coeff"]) if "coeff" in t else UnitMonomial.one(field)
        word = []
        for w in t["word"]:
            kind = w.get("type")
            if kind == "builtin":
                s = builtin_series(w["name"], field)
                if s.param != param:
                    raise UnresolvedReference(
                        f"builtin {w['name']} lives on a different torus"
                    )
                word.append(s)
            elif kind == "exponent":
                c = monomial_from_json(w["coeff"]) if "coeff" in w else None
                word.append(TorusSeries.exponent(param, tuple(w["h"]), c))
            elif kind == "heis":
                word.append(
                    HeisRaw(
                        param,
                        monomial_from_json(w["c"]),
                        point_from_json(w["x"]),
                        tuple(w["g"]),
                        tuple(w["h"]),
                    )
                )
            else:
                raise UnresolvedReference(f"unknown word factor type {kind!r}")
        terms.append(EquationTerm(coeff, word))
    return EquationSpec(
        param,
        terms,
        data["window"],
        data["order"],
        mode=data.get("mode", "product_identity"),
        label=data.get("identity", "custom"),
    )


def _emit(report, out_path):
    text = emit_report(report)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    print(text)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="qtheta", description=__doc__)
    parser.add_argument("--cyclotomic-order", type=int, default=1, metavar="M")
    parser.add_argument("--out", default=None, metavar="FILE")
    parser.add_argument("--jobs", type=int, default=1, metavar="K")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="verify a named or JSON identity")
    p_verify.add_argument("identity")
    p_verify.add_argument("--window", type=int, default=None)
    p_verify.add_argument("--order", type=int, default=None)

    p_theta = sub.add_parser("theta", help="theta space dimension and basis")
    p_theta.add_argument("multiplier")
    p_theta.add_argument("--window", type=int, default=6)
    p_theta.add_argument("--order", type=int, default=60)

    p_comp = sub.add_parser("compose", help="compose two multipliers (m2 o m1)")
    p_comp.add_argument("m2")
    p_comp.add_argument("m1")

    p_small = sub.add_parser("small-group", help="small Heisenberg structure")
    p_small.add_argument("multiplier")

    p_act = sub.add_parser("act", help="action matrix on the canonical basis")
    p_act.add_argument("element")
    p_act.add_argument("multiplier")
    p_act.add_argument("--window", type=int, default=4)
    p_act.add_argument("--order", type=int, default=60)

    args = parser.parse_args(argv)
    field = CycloField(args.cyclotomic_order)

    try:
        if args.command == "verify":
            if args.identity in REGISTRY:
                report = verify_named(
                    args.identity,
                    field,
                    window=args.window,
                    order=args.order,
                    jobs=args.jobs,
                )
            else:
                spec = _spec_from_json(load(args.identity))
                if args.window is not None:
                    spec.window = args.window
                if args.order is not None:
                    spec.order = args.order
                report = verify_equation(spec)
            _emit(report, args.out)
            return 0 if report["status"] == "pass" else 1

        if args.command == "theta":
            L = _load_multiplier(args.multiplier, field)
            tb = theta_dim_basis(L, window=args.window, order=args.order)
            report = {
                "schema": 1,
                "dim": tb.dim,
                "index": None if L.index() == float("inf") else int(L.index()),
                "ample": L.is_ample(),
                "window": args.window,
                "order": args.order,
                "cosets": [list(r) for r in tb.coset_reps],
                "inconsistent": [
                    {"coset": list(rep), "reason": reason} for rep, reason in tb.inconsistent
                ],
                "basis": [s.window_dump(args.window, args.order) for s in tb.basis],
            }
            _emit(report, args.out)
            return 0

        if args.command == "compose":
            L2 = _load_multiplier(args.m2, field)
            L1 = _load_multiplier(args.m1, field)
            composed = compose_multipliers(L2, L1)
            report = multiplier_to_json(composed)
            report["ample"] = composed.is_ample()
            _emit(report, args.out)
            return 0

        if args.command == "small-group":
            L = _load_multiplier(args.multiplier, field)
            struct = group_structure(L)
            duality = [
                {"kappa": list(kidx), "coset": ci, "exponent": e}
                for (kidx, ci), e in sorted(struct.duality.items())
            ]
            report = {
                "schema": 1,
                "index": int(struct.quotient.index),
                "kappa_orders": list(struct.kappa_orders),
                "kappa_generators": [
                    [str(v.coeff) for v in g.values] for g in struct.kappa_generators
                ],
                "coset_reps": [list(r) for r in struct.quotient.coset_reps],
                "torsion_order": struct.torsion_order,
                "duality": duality,
            }
            _emit(report, args.out)
            return 0

        if args.command == "act":
            L = _load_multiplier(args.multiplier, field)
            elem = smallelem_from_json(load(args.element))
            tb = theta_dim_basis(L, window=args.window, order=max(args.order, 120))
            matrix = act_on_theta(L, elem, tb, window=args.window, order=args.order)
            report = {
                "schema": 1,
                "dim": tb.dim,
                "cosets": [list(r) for r in tb.coset_reps],
                "matrix": [[series_to_json(x) for x in row] for row in matrix],
            }
            _emit(report, args.out)
            return 0
    except QThetaError as exc:
        _emit(
            {
                "schema": 1,
                "status": "fail",
                "error": type(exc).__name__,
                "message": str(exc),
            },
            args.out,
        )
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


def cli_run(argv: list[str]) -> int:
    """Callable alias for the entry point."""
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
