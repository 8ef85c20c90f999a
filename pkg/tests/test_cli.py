"""Command-line driver: subcommands, exit codes, JSON round trips."""

import json

import pytest

from qtheta.cli import builtin_multiplier, main
from qtheta.jsonio import (
    heis_from_json,
    heis_to_json,
    multiplier_from_json,
    multiplier_to_json,
    param_from_json,
    param_to_json,
    smallelem_to_json,
)
from qtheta.scalars import CycloField, UnitMonomial
from qtheta.torus import QuantParam, TorusPoint

F = CycloField(1)


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_json_roundtrips():
    p = QuantParam.standard_tq(CycloField(4))
    assert param_from_json(param_to_json(p)) == p
    L = builtin_multiplier("jacobi", F)
    L2 = multiplier_from_json(multiplier_to_json(L))
    assert L2.images == L.images and L2.sqrt_pairing == L.sqrt_pairing
    img = L.images[0]
    assert heis_from_json(heis_to_json(img), L.param) == img


def test_verify_pass_exit_zero(capsys):
    code, rep = run(["verify", "E016"], capsys)
    assert code == 0
    assert rep["status"] == "pass" and rep["identity"] == "E016"


def test_verify_parallel_jobs(capsys):
    code, rep = run(["--jobs", "2", "verify", "E023"], capsys)
    assert code == 0 and rep["status"] == "pass"


def test_verify_custom_spec_and_failure(tmp_path, capsys):
    # theta braid with a corrupted coefficient: exit 1, mismatch pinpointed
    spec = {
        "schema": 1,
        "identity": "corrupted-braid",
        "mode": "product_identity",
        "param": {"m": 1, "rank": 2, "A": [[0, 2], [-2, 0]], "S": [[0, 0], [0, 0]]},
        "window": 2,
        "order": 10,
        "terms": [
            {
                "coeff": {"m": 1, "coeff": ["1"], "uexp": 2},
                "word": [
                    {"type": "builtin", "name": "theta_on_Tq_u"},
                    {"type": "builtin", "name": "theta_on_Tq_v"},
                ],
            },
            {
                "coeff": {"m": 1, "coeff": ["-1"], "uexp": 0},
                "word": [
                    {"type": "builtin", "name": "theta_on_Tq_u"},
                    {"type": "builtin", "name": "theta_on_Tq_v"},
                ],
            },
        ],
    }
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    code, rep = run(["verify", str(path)], capsys)
    assert code == 1
    assert rep["status"] == "fail"
    assert "first_mismatch" in rep
    # the same spec with coefficient 1 passes
    spec["terms"][0]["coeff"]["uexp"] = 0
    path.write_text(json.dumps(spec))
    code2, rep2 = run(["verify", str(path)], capsys)
    assert code2 == 0 and rep2["status"] == "pass"


def test_theta_subcommand(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, rep = run(
        ["--out", str(out), "theta", "builtin:jacobi", "--window", "8", "--order", "80"],
        capsys,
    )
    assert code == 0
    assert rep["dim"] == 1 and rep["index"] == 1 and rep["ample"] is True
    table = {tuple(h): terms for h, terms in (
        (c[0], c[1]["terms"]) for c in rep["basis"][0]["coeffs"]
    )}
    for n in range(-6, 7):
        if 2 * n * n <= 80:
            assert table[(n,)] == [[2 * n * n, ["1"]]]
    assert json.loads(out.read_text()) == rep


def test_theta_from_json_file(tmp_path, capsys):
    mult = multiplier_to_json(builtin_multiplier("jacobi2", F))
    path = tmp_path / "jacobi2.json"
    path.write_text(json.dumps(mult))
    code, rep = run(["theta", str(path), "--window", "4", "--order", "40"], capsys)
    assert code == 0 and rep["dim"] == 2


def test_compose_subcommand(capsys):
    code, rep = run(["compose", "builtin:jacobi", "builtin:jacobi"], capsys)
    assert code == 0
    assert rep["ample"] is True
    assert rep["B_rank"] == 1
    # composed scalar is q^2: uexp 4
    assert rep["images"][0]["c"]["uexp"] == 4


def test_compose_not_composable_exits_one(capsys):
    code, rep = run(["compose", "builtin:jacobi", "builtin:negated"], capsys)
    assert code == 1
    assert rep["error"] == "NotComposable"


def test_small_group_subcommand(capsys):
    code, rep = run(["small-group", "builtin:jacobi2"], capsys)
    assert code == 0
    assert rep["index"] == 2 and rep["kappa_orders"] == [2]
    nontrivial = [d for d in rep["duality"] if d["kappa"] == [1] and d["coset"] == 1]
    assert nontrivial[0]["exponent"] == rep["torsion_order"] // 2


def test_act_subcommand(tmp_path, capsys):
    elem = smallelem_to_json(
        UnitMonomial.one(F),
        TorusPoint((UnitMonomial(-F.one(), 0),)),
        (0,),
    )
    path = tmp_path / "elem.json"
    path.write_text(json.dumps(elem))
    code, rep = run(["act", str(path), "builtin:jacobi2", "--order", "40"], capsys)
    assert code == 0
    assert rep["dim"] == 2
    mat = rep["matrix"]
    assert mat[0][1]["terms"] == [] and mat[1][0]["terms"] == []


def test_usage_error_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_verify_operator_mode_spec(tmp_path, capsys):
    # theta shift equation in operator mode through the JSON vocabulary
    spec = {
        "schema": 1,
        "identity": "custom-shift",
        "mode": "operator_equation",
        "param": {"m": 1, "rank": 1, "A": [[0]], "S": [[0]]},
        "window": 5,
        "order": 40,
        "terms": [
            {
                "word": [
                    {
                        "type": "heis",
                        "c": {"m": 1, "coeff": ["1"], "uexp": 2},
                        "x": [{"m": 1, "coeff": ["1"], "uexp": 4}],
                        "g": [1],
                        "h": [0],
                    },
                    {"type": "builtin", "name": "theta_jacobi"},
                ]
            },
            {
                "coeff": {"m": 1, "coeff": ["-1"], "uexp": 0},
                "word": [{"type": "builtin", "name": "theta_jacobi"}],
            },
        ],
    }
    path = tmp_path / "shift.json"
    path.write_text(json.dumps(spec))
    code, rep = run(["verify", str(path)], capsys)
    assert code == 0 and rep["status"] == "pass"


def test_cyclotomic_order_flag(capsys):
    # rational identities hold verbatim over larger cyclotomic fields
    code, rep = run(["--cyclotomic-order", "4", "verify", "E016"], capsys)
    assert code == 0 and rep["status"] == "pass"
