"""End-to-end tests of the command-line front end."""

import json

import pytest

from src.cli import EXIT_BUDGET, EXIT_INVALID, EXIT_OK, main
from src.config import TEST_TOL
from src.quantum.polarize import bec_evolve
from src.services.channel_loader import load_channel
from src.services.report_service import read_table_csv

ERASURE_SPLIT = {
    "kind": "preset",
    "preset": "erasure",
    "parameter": 0.25,
    "reservoir_split": [1, 3],
}


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_erasure(capsys, write_json):
    path = write_json("erasure.json", ERASURE_SPLIT)

    code, out, _ = _run(capsys, "analyze", path, "--restarts", "1", "--seed", "2")
    report = json.loads(out)

    assert code == EXIT_OK
    assert report["schema"] == "analyze"
    assert report["info"]["W_A"] == pytest.approx(0.75, abs=TEST_TOL)
    assert report["fidelity"]["W_A"] == pytest.approx(0.25, abs=TEST_TOL)
    assert report["info"]["W_P"] == pytest.approx(0.75, abs=TEST_TOL)
    assert report["assistance_vanishes"] is True
    assert report["private_search"]["restarts"] == 1


def test_analyze_identity(capsys, write_json):
    path = write_json("identity.json", {"kind": "preset", "preset": "identity"})

    code, out, _ = _run(capsys, "analyze", path)
    report = json.loads(out)

    assert code == EXIT_OK
    assert report["info"]["W_A"] == pytest.approx(1.0, abs=TEST_TOL)
    assert report["info"]["W_P"] == pytest.approx(1.0, abs=TEST_TOL)
    assert report["private_search"] is None


def test_malformed_kraus_file_exits_invalid(capsys, write_json):
    half = [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]
    path = write_json("bad.json", {"kind": "kraus", "name": "bad", "kraus": [half]})

    code, out, err = _run(capsys, "analyze", path)

    assert code == EXIT_INVALID
    assert out == ""
    assert "trace preserving" in err


def test_missing_file_exits_invalid(capsys, tmp_path):
    code, _, err = _run(capsys, "analyze", str(tmp_path / "nope.json"))

    assert code == EXIT_INVALID
    assert err.startswith("error:")


def test_polarize_erasure_bounds(capsys, write_json, tmp_path):
    path = write_json("erasure.json", {"kind": "preset", "preset": "erasure", "parameter": 0.5})
    out_path = tmp_path / "tables" / "erasure.csv"

    code, _, _ = _run(
        capsys, "polarize", path, "--n", "3", "--mode", "bounds", "--out", str(out_path)
    )
    frame = read_table_csv(out_path)

    assert code == EXIT_OK
    assert len(frame) == 8
    assert frame["f_bound"].tolist() == pytest.approx(
        bec_evolve(0.5, 3).f_bound.tolist(), abs=1e-11
    )
    assert out_path.read_text(encoding="utf-8").startswith("# schema=polar_table")


def test_polarize_erasure_exact_is_over_budget(capsys, write_json):
    path = write_json("erasure.json", {"kind": "preset", "preset": "erasure", "parameter": 0.5})

    code, out, err = _run(capsys, "polarize", path, "--n", "3", "--mode", "exact")

    assert code == EXIT_BUDGET
    assert out == ""
    assert "--mode bounds" in err


def test_polarize_rejects_bad_threshold(capsys, write_json):
    path = write_json("identity.json", {"kind": "preset", "preset": "identity"})

    code, _, _ = _run(capsys, "polarize", path, "--threshold", "1.5")

    assert code == EXIT_INVALID


def test_design_dephasing(capsys, write_json):
    path = write_json("deph.json", {"kind": "preset", "preset": "dephasing", "parameter": 0.1})

    code, out, _ = _run(capsys, "design", path, "--n", "3")
    report = json.loads(out)

    assert code == EXIT_OK
    assert report["identity_check"] == "pass"
    assert report["partition"]["provenance"] == "exact"
    part = report["partition"]
    assert sorted(part["A"] + part["X"] + part["Z"] + part["B"]) == list(range(1, 9))


def test_simulate_identity(capsys, write_json):
    path = write_json("identity.json", {"kind": "preset", "preset": "identity"})

    code, out, _ = _run(capsys, "simulate", path, "--n", "1", "--trials", "2")
    report = json.loads(out)

    assert code == EXIT_OK
    assert report["schema"] == "simulate"
    assert report["ebits"] == 2
    assert report["ebit_trace_distance"] < 1e-9


def test_same_seed_gives_identical_output(capsys, write_json):
    path = write_json("deph.json", {"kind": "preset", "preset": "dephasing", "parameter": 0.05})
    argv = ("simulate", path, "--n", "1", "--trials", "3", "--seed", "11")

    _, first, _ = _run(capsys, *argv)
    _, second, _ = _run(capsys, *argv)

    assert first == second


def test_superactivate_order(capsys, write_json):
    identity_2q = [[[1.0 if r == c else 0.0, 0.0] for c in range(4)] for r in range(4)]
    path = write_json("joint.json", {"kind": "kraus", "name": "id2", "kraus": [identity_2q]})

    code, out, _ = _run(capsys, "superactivate", path, "--order", "2,1")
    report = json.loads(out)

    assert code == EXIT_OK
    assert report["order"] == [2, 1]
    assert report["total"] == pytest.approx(2.0, abs=TEST_TOL)
    assert report["matches"] is True


def test_superactivate_rejects_garbled_order(capsys, write_json):
    identity_2q = [[[1.0 if r == c else 0.0, 0.0] for c in range(4)] for r in range(4)]
    path = write_json("joint.json", {"kind": "kraus", "name": "id2", "kraus": [identity_2q]})

    code, _, err = _run(capsys, "superactivate", path, "--order", "2;1")

    assert code == EXIT_INVALID
    assert "order" in err


def test_wiretap_embed_output_loads(capsys, write_json, tmp_path):
    pmf = write_json("pmf.json", {"name": "bsc", "pmf": [[[0.9], [0.1]], [[0.1], [0.9]]]})
    out_path = tmp_path / "bsc_channel.json"

    code, _, _ = _run(capsys, "wiretap-embed", pmf, "--out", str(out_path))
    spec = load_channel(out_path)

    assert code == EXIT_OK
    assert spec.name == "bsc"
    assert spec.reservoir_split == (4, 1)
    assert spec.kraus.d_in == 2
