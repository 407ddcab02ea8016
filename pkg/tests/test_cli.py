"""Command-line interface: output shape, exit codes, reproducibility."""
import json
from pathlib import Path

import pytest

from movebar.cli import main

FIX = Path(__file__).resolve().parents[1] / "fixtures"

FLAT = str(FIX / "curves_flat.json")
FLAT_DIV = str(FIX / "curves_flat_div.json")
TWO_PIECE = str(FIX / "curves_two_piece.json")
KNOCKOUT_CALL = str(FIX / "contract_knockout_call.json")
LOW_STRIKE = str(FIX / "contract_low_strike.json")
LEVELS_PUT = str(FIX / "contract_levels_put.json")


def run(capsys, *argv):
    rc = main(list(argv))
    cap = capsys.readouterr()
    return rc, cap.out, cap.err


def test_price_json(capsys):
    rc, out, err = run(capsys, "price", "--curves", FLAT,
                       "--contract", KNOCKOUT_CALL,
                       "--spot", "100", "--time", "0")
    assert rc == 0
    body = json.loads(out)
    assert body["command"] == "price"
    assert body["barrier_level"] == pytest.approx(90.0, rel=1e-14)
    assert body["breakdown"]["price"] == pytest.approx(8.665471658245668,
                                                       rel=1e-12)
    assert body["breakdown"]["status"] == "live"
    assert body["inputs"]["curves_sha256"]
    assert "finished in" in err


def test_price_csv(capsys):
    rc, out, _ = run(capsys, "price", "--curves", FLAT,
                     "--contract", KNOCKOUT_CALL,
                     "--spot", "100", "--time", "0", "--csv")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "field,value"
    fields = dict(line.split(",", 1) for line in lines[1:])
    assert float(fields["price"]) == pytest.approx(8.665471658245668, rel=1e-12)
    assert fields["status"] == "live"


def test_price_below_barrier_is_knocked_out(capsys):
    rc, out, _ = run(capsys, "price", "--curves", FLAT,
                     "--contract", KNOCKOUT_CALL,
                     "--spot", "85", "--time", "0")
    assert rc == 0
    body = json.loads(out)
    assert body["breakdown"]["price"] == 0.0
    assert body["breakdown"]["status"] == "knocked_out"


def test_price_levels_form_contract(capsys):
    rc, out, _ = run(capsys, "price", "--curves", FLAT,
                     "--contract", LEVELS_PUT,
                     "--spot", "100", "--time", "0")
    assert rc == 0
    body = json.loads(out)
    assert body["side"] == "put"
    assert body["C"] == pytest.approx(-0.5, abs=1e-12)


def test_price_outside_closed_form_regime_is_an_input_error(capsys):
    rc, _, err = run(capsys, "price", "--curves", FLAT_DIV,
                     "--contract", LOW_STRIKE,
                     "--spot", "100", "--time", "0")
    assert rc == 2
    assert "error:" in err


def test_parity_flat_curves(capsys):
    rc, out, _ = run(capsys, "parity", "--curves", FLAT,
                     "--contract", KNOCKOUT_CALL,
                     "--spot", "100", "--time", "0")
    assert rc == 0
    body = json.loads(out)
    names = [r["name"] for r in body["results"]]
    assert names == ["out_in_minus_vanilla", "put_plus_forward_minus_call",
                     "flat_parity_gap_corrected", "flat_parity_gap_printed_form"]
    assert body["passed"] is True
    by_name = {r["name"]: r for r in body["results"]}
    # the corrected identity is asserted, the printed variant only reported
    assert by_name["flat_parity_gap_corrected"]["passed"] is True
    assert by_name["flat_parity_gap_printed_form"]["passed"] is None
    assert abs(by_name["flat_parity_gap_printed_form"]["value"]) > 1.0


def test_parity_two_piece_curves(capsys):
    rc, out, _ = run(capsys, "parity", "--curves", TWO_PIECE,
                     "--contract", KNOCKOUT_CALL,
                     "--spot", "100", "--time", "0")
    assert rc == 0
    names = [r["name"] for r in json.loads(out)["results"]]
    # no flat-parameter identity rows on time-dependent curves
    assert names == ["out_in_minus_vanilla", "put_plus_forward_minus_call"]


def test_parity_unattainable_tolerance_fails(capsys):
    rc, out, _ = run(capsys, "parity", "--curves", FLAT,
                     "--contract", KNOCKOUT_CALL,
                     "--spot", "100", "--time", "0", "--tol", "1e-30")
    assert rc == 1
    assert json.loads(out)["passed"] is False


def test_parity_csv(capsys):
    rc, out, _ = run(capsys, "parity", "--curves", FLAT,
                     "--contract", KNOCKOUT_CALL,
                     "--spot", "100", "--time", "0", "--csv")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "name,value,reference,error,tolerance,passed"
    assert len(lines) == 5


VALIDATE_FAST = ["--mc-paths", "20000", "--mc-steps", "16", "--seed", "3",
                 "--pde-grid", "200"]


def test_validate_constant_case(capsys):
    rc, out, err = run(capsys, "validate", "--curves", FLAT,
                       "--contract", KNOCKOUT_CALL,
                       "--spot", "100", "--time", "0", *VALIDATE_FAST)
    assert rc == 0
    body = json.loads(out)
    names = [r["name"] for r in body["results"]]
    assert names == ["quadrature_vs_closed", "lattice_vs_closed_rel",
                     "simulation_vs_closed"]
    assert all(r["passed"] for r in body["results"])
    sim = body["parameters"]["simulation"]
    assert 0.0 < sim["knockout_fraction"] < 1.0
    assert sim["n_paths"] == 20000


def test_validate_stdout_is_reproducible(capsys):
    args = ["validate", "--curves", FLAT, "--contract", KNOCKOUT_CALL,
            "--spot", "100", "--time", "0", *VALIDATE_FAST]
    rc1, out1, _ = run(capsys, *args)
    rc2, out2, _ = run(capsys, *args)
    assert (rc1, rc2) == (0, 0)
    assert out1 == out2  # timing goes to stderr, stdout is byte-stable


def test_validate_coarse_lattice_fails(capsys):
    rc, out, _ = run(capsys, "validate", "--curves", FLAT,
                     "--contract", KNOCKOUT_CALL,
                     "--spot", "100", "--time", "0",
                     "--mc-paths", "20000", "--mc-steps", "16", "--seed", "3",
                     "--pde-grid", "12")
    assert rc == 1
    by_name = {r["name"]: r for r in json.loads(out)["results"]}
    assert by_name["lattice_vs_closed_rel"]["passed"] is False


def test_validate_low_strike_cross_checks_oracles(capsys):
    rc, out, err = run(capsys, "validate", "--curves", FLAT_DIV,
                       "--contract", LOW_STRIKE,
                       "--spot", "100", "--time", "0", *VALIDATE_FAST)
    assert rc == 0
    body = json.loads(out)
    names = [r["name"] for r in body["results"]]
    assert names == ["lattice_vs_quadrature_rel", "simulation_vs_quadrature"]
    assert all(r["passed"] for r in body["results"])
    assert body["parameters"]["closed_form"].startswith("skipped")
    assert "no closed form" in err


def test_curves_show_round_trips(capsys):
    rc, out, _ = run(capsys, "curves", "show", "--curves", TWO_PIECE)
    assert rc == 0
    body = json.loads(out)
    assert body["curves"] == json.loads(Path(TWO_PIECE).read_text())


def test_missing_file_is_an_input_error(capsys, tmp_path):
    rc, _, err = run(capsys, "price", "--curves", str(tmp_path / "no.json"),
                     "--contract", KNOCKOUT_CALL, "--spot", "100", "--time", "0")
    assert rc == 2
    assert "error:" in err


def test_malformed_json_reports_position(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "r": }\n')
    rc, _, err = run(capsys, "price", "--curves", str(bad),
                     "--contract", KNOCKOUT_CALL, "--spot", "100", "--time", "0")
    assert rc == 2
    assert "bad.json:2:" in err


def test_unknown_style_is_an_input_error(capsys, tmp_path):
    con = tmp_path / "con.json"
    con.write_text(json.dumps(
        {"strike": 100.0, "expiry": 1.0, "side": "call",
         "style": "up_and_out", "barrier": {"h_T": 90.0, "C": 0.0}}))
    rc, _, err = run(capsys, "price", "--curves", FLAT,
                     "--contract", str(con), "--spot", "100", "--time", "0")
    assert rc == 2


def test_missing_required_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["price", "--curves", FLAT, "--contract", KNOCKOUT_CALL])
    assert exc.value.code == 2
