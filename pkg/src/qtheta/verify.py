"""The equation verifier and the registry of named identities.

An equation is a finite sum of terms, each a scalar coefficient times a word
of series and operator factors; verification expands every term on a window
of lattice cells to a fixed u-order and demands exact cancellation --
tolerance is zero, any mismatch is a bug or a falsified identity.

Registered identities (verified at their desk-scale default windows):

  E012  theta shift equations  q^(m^2) t^m theta(q^(2m) t) = theta(t)
  E016  the q-exponential shift  e_q(t) = (1 + q t) e_q(q^2 t)
  E023  quantum addition  e_q(u) e_q(v) = e_q(u + v)        (uv = q^2 vu)
  E024  the quantum pentagon  e_q(v) e_q(u) = e_q(u) e_q(qvu) e_q(v)
  E025  the theta braid  th(u) th(v) th(u) = th(v) th(u) th(v)
  E026  the Yang-Baxter ratio identity for r(z, t)
  E332  theta lifts on the two-dimensional torus: four shift equations
        plus both cross-product equations
  E313  invariance of the multiplication-kernel theta
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence, Union

from .errors import NotMultipliable, UnknownName, UnresolvedReference
from .heisenberg import HeisElement, HeisRaw, heis_act
from .named import (
    eq_addition_series,
    eq_series,
    r_series,
    theta_series,
    weinstein_norm,
    weinstein_param,
    weinstein_shift_point,
    weinstein_theta,
    _yang_baxter_param,
)
from .scalars import INF, CycloField, ScalarSeries, UnitMonomial
from .series import TorusSeries
from .torus import QuantParam, TorusPoint

OPERATOR = "operator_equation"
PRODUCT = "product_identity"


@dataclass
class EquationTerm:
    coefficient: UnitMonomial
    word: list  # TorusSeries | HeisRaw | HeisElement


@dataclass
class EquationSpec:
    param: QuantParam
    terms: list[EquationTerm]
    window: int
    order: int
    mode: str = PRODUCT
    label: str = ""

    def cells(self):
        rng = range(-self.window, self.window + 1)
        return [tuple(c) for c in itertools.product(rng, repeat=self.param.rank)]


def _term_series(param: QuantParam, term: EquationTerm) -> TorusSeries:
    acc: Optional[TorusSeries] = None
    for op in reversed(term.word):
        if isinstance(op, (HeisRaw, HeisElement)):
            if acc is None:
                raise UnresolvedReference("operator factor with nothing to act on")
            acc = heis_act(op, acc)
        elif isinstance(op, TorusSeries):
            acc = op if acc is None else op.mul(acc)
        else:
            raise UnresolvedReference(f"unknown word factor {op!r}")
    if acc is None:
        raise UnresolvedReference("empty word")
    if not term.coefficient.is_one():
        acc = acc.scaled(term.coefficient)
    return acc


def verify_equation(spec: EquationSpec, cells=None) -> dict:
    """Expand all terms on the window and compare coefficient-exactly."""
    if spec.mode == PRODUCT:
        for t in spec.terms:
            for op in t.word:
                if isinstance(op, TorusSeries) and not op.is_multipliable():
                    raise NotMultipliable(
                        "formal-kind operand in a product identity"
                    )
    series = [_term_series(spec.param, t) for t in spec.terms]
    the_cells = sorted(spec.cells() if cells is None else list(cells))
    order = spec.order
    field = spec.param.field
    checked = 0
    first_mismatch = None
    for h in the_cells:
        total = ScalarSeries.zero(field, order)
        for s in series:
            total = total + s.coeff(h, order)
        checked += 1
        if total.trunc < order:
            # a silent precision drop would weaken the pass claim
            first_mismatch = {
                "cell": list(h),
                "uexp": None,
                "reason": f"coefficient known only to order {total.trunc}",
            }
            break
        if not total.is_zero():
            bad = min(total.terms)
            first_mismatch = {"cell": list(h), "uexp": int(bad)}
            break
    report = {
        "schema": 1,
        "identity": spec.label,
        "window": spec.window,
        "order": int(order),
        "cells_checked": checked,
        "status": "pass" if first_mismatch is None else "fail",
    }
    if first_mismatch is not None:
        report["first_mismatch"] = first_mismatch
    return report


# ---------------------------------------------------------------------------
# identity registry


def _one(field):
    return UnitMonomial.one(field)


def _minus_one(field):
    return UnitMonomial(-field.one(), 0)


def _build_e012(field: CycloField, window: int, order: int) -> list[EquationSpec]:
    p = QuantParam.trivial(field, 1)
    theta = theta_series(p, (1,), label="theta")
    specs = []
    for m in range(-2, 3):
        gamma = HeisRaw(
            p,
            UnitMonomial.q_power(field, m * m),
            TorusPoint.from_q_exps(field, [2 * m]),
            (m,),
            (0,),
        )
        specs.append(
            EquationSpec(
                p,
                [
                    EquationTerm(_one(field), [gamma, theta]),
                    EquationTerm(_minus_one(field), [theta]),
                ],
                window,
                order,
                mode=OPERATOR,
                label=f"E012[m={m}]",
            )
        )
    return specs


def _build_e016(field: CycloField, window: int, order: int) -> list[EquationSpec]:
    # e_q(t) - (1 + q t) e_q(q^2 t) = 0 (the shift consistent with the
    # product definition of e_q)
    p = QuantParam.trivial(field, 1)
    eq = eq_series(p, (1,), label="e_q")
    shifted = eq.shift_pullback(TorusPoint.from_q_exps(field, [2]))
    poly = TorusSeries.from_dict(
        p,
        {(0,): _one(field), (1,): UnitMonomial.q_power(field, 1)},
        label="1+qt",
    )
    return [
        EquationSpec(
            p,
            [
                EquationTerm(_one(field), [eq]),
                EquationTerm(_minus_one(field), [poly, shifted]),
            ],
            window,
            order,
            label="E016",
        )
    ]


def _build_e023(field: CycloField, window: int, order: int) -> list[EquationSpec]:
    p = QuantParam.standard_tq(field)
    eu = eq_series(p, (1, 0), label="e_q(u)")
    ev = eq_series(p, (0, 1), label="e_q(v)")
    esum = eq_addition_series(p, (1, 0), (0, 1))
    return [
        EquationSpec(
            p,
            [
                EquationTerm(_one(field), [eu, ev]),
                EquationTerm(_minus_one(field), [esum]),
            ],
            window,
            order,
            label="E023",
        )
    ]


def _build_e024(field: CycloField, window: int, order: int) -> list[EquationSpec]:
    p = QuantParam.standard_tq(field)
    eu = eq_series(p, (1, 0), label="e_q(u)")
    ev = eq_series(p, (0, 1), label="e_q(v)")
    # qvu = q e(h2) e(h1) = e(h1 + h2)
    emid = eq_series(p, (1, 1), label="e_q(qvu)")
    return [
        EquationSpec(
            p,
            [
                EquationTerm(_one(field), [ev, eu]),
                EquationTerm(_minus_one(field), [eu, emid, ev]),
            ],
            window,
            order,
            label="E024",
        )
    ]


def _build_e025(field: CycloField, window: int, order: int) -> list[EquationSpec]:
    p = QuantParam.standard_tq(field)
    tu = theta_series(p, (1, 0), label="theta(u)")
    tv = theta_series(p, (0, 1), label="theta(v)")
    return [
        EquationSpec(
            p,
            [
                EquationTerm(_one(field), [tu, tv, tu]),
                EquationTerm(_minus_one(field), [tv, tu, tv]),
            ],
            window,
            order,
            label="E025",
        )
    ]


def _build_e026(field: CycloField, window: int, order: int) -> list[EquationSpec]:
    p = _yang_baxter_param(field)
    u, v = (1, 0, 0, 0), (0, 1, 0, 0)
    z, zp = (0, 0, 1, 0), (0, 0, 0, 1)
    zzp = (0, 0, 1, 1)
    lhs = [r_series(p, u, z, "r(z,u)"), r_series(p, v, zzp, "r(zz',v)"), r_series(p, u, zp, "r(z',u)")]
    rhs = [r_series(p, v, zp, "r(z',v)"), r_series(p, u, zzp, "r(zz',u)"), r_series(p, v, z, "r(z,v)")]
    return [
        EquationSpec(
            p,
            [
                EquationTerm(_one(field), lhs),
                EquationTerm(_minus_one(field), rhs),
            ],
            window,
            order,
            label="E026",
        )
    ]


def _build_e332(field: CycloField, window: int, order: int) -> list[EquationSpec]:
    p = QuantParam.standard_tq(field)
    tu = theta_series(p, (1, 0), label="theta(u)")
    tv = theta_series(p, (0, 1), label="theta(v)")
    q1 = UnitMonomial.q_power(field, 1)
    qm1 = UnitMonomial.q_power(field, -1)

    def e(h, coeff=None):
        return TorusSeries.exponent(p, h, coeff)

    specs = []

    def add(label, coeff, word, target):
        specs.append(
            EquationSpec(
                p,
                [
                    EquationTerm(coeff, word),
                    EquationTerm(_minus_one(field), target),
                ],
                window,
                order,
                label=label,
            )
        )

    # q u v^-1 theta(u) v = theta(u)
    add("E332[quv-1.th(u).v]", q1, [e((1, 0)), e((0, -1)), tu, e((0, 1))], [tu])
    # u theta(u) u^-1 = theta(u)
    add("E332[u.th(u).u-1]", _one(field), [e((1, 0)), tu, e((-1, 0))], [tu])
    # q v u theta(v) u^-1 = theta(v)
    add("E332[qvu.th(v).u-1]", q1, [e((0, 1)), e((1, 0)), tv, e((-1, 0))], [tv])
    # v^-1 theta(v) v = theta(v)
    add("E332[v-1.th(v).v]", _one(field), [e((0, -1)), tv, e((0, 1))], [tv])
    # cross products: q u v^-1 theta(u) theta(v) v = theta(u) theta(v)
    add(
        "E332[quv-1.th(u)th(v).v]",
        q1,
        [e((1, 0)), e((0, -1)), tu, tv, e((0, 1))],
        [tu, tv],
    )
    # q^-1 u theta(u) theta(v) v u^-1 = theta(u) theta(v)
    add(
        "E332[q-1u.th(u)th(v).vu-1]",
        qm1,
        [e((1, 0)), tu, tv, e((0, 1)), e((-1, 0))],
        [tu, tv],
    )
    return specs


def _build_e313(field: CycloField, window: int, order: int) -> list[EquationSpec]:
    base = QuantParam.standard_tq(field)
    dbl = weinstein_param(base)
    theta_w = weinstein_theta(base)
    kset = [
        (1, 0, 0, 0),
        (0, 1, 0, 0),
        (0, 0, 1, 0),
        (0, 0, 0, 1),
        (-1, 0, 0, 0),
        (0, 0, 0, -1),
        (1, 0, 1, 0),
        (0, 1, 0, 1),
        (1, 1, -1, 0),
        (2, 0, 0, 1),
    ]
    specs = []
    for k in kset:
        gamma = HeisRaw(
            dbl,
            weinstein_norm(base, k),
            weinstein_shift_point(base, k),
            k,
            (0, 0, 0, 0),
        )
        specs.append(
            EquationSpec(
                dbl,
                [
                    EquationTerm(_one(field), [gamma, theta_w]),
                    EquationTerm(_minus_one(field), [theta_w]),
                ],
                window,
                order,
                mode=OPERATOR,
                label=f"E313[k={k}]",
            )
        )
    return specs


REGISTRY = {
    "E012": (_build_e012, 8, 80),
    "E016": (_build_e016, 10, 40),
    "E023": (_build_e023, 4, 16),
    "E024": (_build_e024, 4, 16),
    "E025": (_build_e025, 5, 25),
    "E026": (_build_e026, 3, 12),
    "E332": (_build_e332, 5, 25),
    "E313": (_build_e313, 4, 40),
}


def identity_specs(
    identity_id: str,
    field: Optional[CycloField] = None,
    window: Optional[int] = None,
    order: Optional[int] = None,
) -> list[EquationSpec]:
    if identity_id not in REGISTRY:
        raise UnknownName(f"unknown identity {identity_id!r}")
    builder, def_window, def_order = REGISTRY[identity_id]
    field = field or CycloField(1)
    return builder(
        field,
        def_window if window is None else window,
        def_order if order is None else order,
    )


def verify_named(
    identity_id: str,
    field: Optional[CycloField] = None,
    window: Optional[int] = None,
    order: Optional[int] = None,
    jobs: int = 1,
) -> dict:
    """Run a registered identity at its canonical (or given) window/order."""
    specs = identity_specs(identity_id, field, window, order)
    total_checked = 0
    status = "pass"
    first = None
    for spec in specs:
        if jobs > 1:
            rep = _verify_parallel(identity_id, spec, field, jobs)
        else:
            rep = verify_equation(spec)
        total_checked += rep["cells_checked"]
        if rep["status"] == "fail" and first is None:
            status = "fail"
            first = dict(rep["first_mismatch"])
            first["equation"] = spec.label
            break
    report = {
        "schema": 1,
        "identity": identity_id,
        "window": specs[0].window,
        "order": int(specs[0].order),
        "cells_checked": total_checked,
        "status": status,
    }
    if first is not None:
        report["first_mismatch"] = first
    return report


def _verify_chunk(identity_id, spec_index, window, order, m_order, cell_chunk):
    """Worker: rebuild the identity and verify a chunk of cells."""
    field = CycloField(m_order)
    spec = identity_specs(identity_id, field, window, order)[spec_index]
    return verify_equation(spec, cells=cell_chunk)


def _verify_parallel(identity_id, spec, field, jobs) -> dict:
    from concurrent.futures import ProcessPoolExecutor

    specs = identity_specs(identity_id, field, spec.window, spec.order)
    spec_index = next(i for i, s in enumerate(specs) if s.label == spec.label)
    cells = sorted(spec.cells())
    chunks = [cells[i::jobs] for i in range(jobs)]
    m_order = spec.param.field.order
    results = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futs = [
            pool.submit(
                _verify_chunk, identity_id, spec_index, spec.window, spec.order, m_order, ch
            )
            for ch in chunks
            if ch
        ]
        for f in futs:
            results.append(f.result())
    checked = sum(r["cells_checked"] for r in results)
    bad = [r for r in results if r["status"] == "fail"]
    report = {
        "schema": 1,
        "identity": spec.label,
        "window": spec.window,
        "order": int(spec.order),
        "cells_checked": checked,
        "status": "fail" if bad else "pass",
    }
    if bad:
        report["first_mismatch"] = sorted(
            (b["first_mismatch"] for b in bad), key=lambda x: x["cell"]
        )[0]
    return report


def emit_report(results: Union[dict, Sequence[dict]]) -> str:
    """Deterministic, schema-versioned JSON."""
    return json.dumps(results, sort_keys=True, indent=2)
