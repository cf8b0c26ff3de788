"""Command-line behavior: outputs, exit codes, files, determinism."""

from __future__ import annotations

import json

import pytest

from tightcert.cli import main
from tightcert.serialize import (
    certificate_from_dict,
    diagram_to_dict,
    dump_json,
    framed_link_to_dict,
    load_json,
)
from tightcert.diagrams import add_unknot, empty_diagram, normalize_diagram
from tightcert.rationals import SurgeryCoeff
from tightcert.topology import FramedLink


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# convert
# ---------------------------------------------------------------------------


def test_convert_text_output(capsys):
    code, out, err = run_cli(capsys, "convert", "--slope", "-3")
    assert code == 0 and err == ""
    assert "c1: rhtrefoil tb 1 rot 0 coeff -1" in out
    assert "lk(" in out


def test_convert_json_matches_library(capsys):
    code, out, _ = run_cli(capsys, "convert", "--slope", "5/2", "--json")
    assert code == 0
    from tightcert.diagrams import trefoil_surgery_diagram

    expected = diagram_to_dict(
        normalize_diagram(trefoil_surgery_diagram(SurgeryCoeff(5, 2)))
    )
    assert json.loads(out) == expected


def test_convert_negative_slope_inline_value(capsys):
    # Negative rationals after a space must not be read as flags.
    code, out, _ = run_cli(capsys, "convert", "--slope", "-7/3", "--json")
    assert code == 0
    assert json.loads(out)["components"]


def test_convert_diagram_file_round_trip(tmp_path, capsys):
    d, _ = add_unknot(empty_diagram(), coeff=SurgeryCoeff(-5, 3))
    src = tmp_path / "diagram.json"
    dump_json(diagram_to_dict(d), str(src))
    out_path = tmp_path / "normalized.json"
    code, _, _ = run_cli(capsys, "convert", "--diagram", str(src), "--out", str(out_path))
    assert code == 0
    data = load_json(str(out_path))
    assert all(c["coeff"] == "-1" for c in data["components"])


def test_convert_excluded_slope_exits_2(capsys):
    code, out, err = run_cli(capsys, "convert", "--slope", "1")
    assert code == 2
    assert "error:" in err and out == ""


def test_convert_bad_slope_text_exits_2(capsys):
    code, _, err = run_cli(capsys, "convert", "--slope", "seven")
    assert code == 2 and "error:" in err


# ---------------------------------------------------------------------------
# h1 / det
# ---------------------------------------------------------------------------


def test_h1_text_and_json(capsys):
    code, out, _ = run_cli(capsys, "h1", "--slope", "-3")
    assert code == 0
    assert out == "Z/3\norder 3\n"

    code, out, _ = run_cli(capsys, "h1", "--slope", "0", "--json")
    assert code == 0
    data = json.loads(out)
    assert data == {"free_rank": 1, "torsion": [], "order": 0, "cyclic": True}


def test_h1_from_link_file(tmp_path, capsys):
    link = FramedLink(((2, 1), (1, 2)), ("unknot", "unknot"))
    path = tmp_path / "link.json"
    dump_json(framed_link_to_dict(link), str(path))
    code, out, _ = run_cli(capsys, "h1", "--link", str(path))
    assert code == 0 and out == "Z/3\norder 3\n"


def test_det_output(capsys):
    code, out, _ = run_cli(capsys, "det", "--slope", "-3")
    assert code == 0
    assert out.strip() == "-3" or out.strip() == "3"
    value = int(out)
    code, out, _ = run_cli(capsys, "det", "--slope", "-3", "--json")
    assert json.loads(out) == {"det": value}


# ---------------------------------------------------------------------------
# count
# ---------------------------------------------------------------------------


def test_count_output(capsys):
    code, out, _ = run_cli(capsys, "count", "--coeff", "-5/3")
    assert code == 0 and out.strip() == "4"
    code, out, _ = run_cli(capsys, "count", "--coeff", "-5/3", "--json")
    assert json.loads(out) == {"coeff": "-5/3", "presentations": 4}
    code, _, err = run_cli(capsys, "count", "--coeff", "0")
    assert code == 2 and "error:" in err


# ---------------------------------------------------------------------------
# ranks
# ---------------------------------------------------------------------------


def test_ranks_table(capsys):
    code, out, _ = run_cli(capsys, "ranks", "--max-k", "4")
    assert code == 0
    lines = out.splitlines()
    table = {line.split()[0]: line.split()[1] for line in lines if line}
    assert table["s3"] == "1"
    assert table["s1xs2"] == "2"
    for k in range(1, 5):
        assert table[f"-tower({k})"] == str(k)
    # The stage past the last lens triangle stays an honest interval.
    assert "[3," in out


def test_ranks_json(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "ranks", "--max-k", "3", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["consistent"] is True and data["rounds"] >= 2
    ranks = {f["manifold"]: f for f in data["facts"]}
    assert ranks["-tower(3)"]["rank"] == 3
    out_path = tmp_path / "ranks.json"
    code, _, _ = run_cli(capsys, "ranks", "--max-k", "3", "--json", "--out", str(out_path))
    assert code == 0
    assert load_json(str(out_path))["consistent"] is True


# ---------------------------------------------------------------------------
# triangle
# ---------------------------------------------------------------------------


def test_triangle_solve_output(capsys):
    code, out, _ = run_cli(capsys, "triangle", "--solve", "3", "4", "1")
    assert code == 0
    assert "rank f = 3, rank g = 1, rank h = 0" in out
    assert "f injective" in out

    code, out, _ = run_cli(capsys, "triangle", "--solve", "3", "4", "1", "--json")
    data = json.loads(out)
    assert data["f_injective"] is True and data["rank_f"] == 3

    code, _, err = run_cli(capsys, "triangle", "--solve", "1", "1", "1")
    assert code == 2 and "odd total" in err


# ---------------------------------------------------------------------------
# certify / verify
# ---------------------------------------------------------------------------


def test_certify_single_slope(capsys):
    code, out, _ = run_cli(capsys, "certify", "--r", "3/4")
    assert code == 0
    assert "slope 3/4: TIGHT" in out and "verified yes" in out


def test_certify_trace_lists_steps(capsys):
    code, out, _ = run_cli(capsys, "certify", "--r", "1/2", "--trace")
    assert code == 0
    assert "nonzero_tight(node=y0) => tight(y0)" in out


def test_certify_excluded_slope_refused(capsys):
    code, out, _ = run_cli(capsys, "certify", "--r", "1")
    assert code == 2
    assert "REFUSED" in out


def test_certify_emit_verify_round_trip(tmp_path, capsys):
    path = tmp_path / "cert.json"
    code, _, _ = run_cli(capsys, "certify", "--r", "-5/3", "--emit", str(path))
    assert code == 0
    code, out, _ = run_cli(capsys, "verify", str(path))
    assert code == 0 and "ACCEPTED" in out

    # Tamper: bump a rank fact in the stored JSON.
    data = load_json(str(path))
    cert = certificate_from_dict(data)
    assert cert.slope == SurgeryCoeff(-5, 3)
    data["rank_facts"]["-tower(1)"] = 5
    dump_json(data, str(path))
    code, out, _ = run_cli(capsys, "verify", str(path))
    assert code == 3
    assert "REJECTED" in out and "not engine-verified" in out


def test_verify_json_reports_reason(tmp_path, capsys):
    path = tmp_path / "cert.json"
    run_cli(capsys, "certify", "--r", "2", "--emit", str(path))
    data = load_json(str(path))
    data["conclusion"] = ["tight", "v1"]
    dump_json(data, str(path))
    code, out, _ = run_cli(capsys, "verify", str(path), "--json")
    assert code == 3
    payload = json.loads(out)
    assert payload["ok"] is False and "slope" in payload["reason"]


def test_verify_malformed_file_exits_2(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = run_cli(capsys, "verify", str(path))
    assert code == 2 and "error:" in err


def test_certify_batch(tmp_path, capsys):
    batch = tmp_path / "slopes.txt"
    batch.write_text("# comment line\n-2\n1/2   # trailing comment\n\n5/2\n")
    emit = tmp_path / "certs.json"
    code, out, _ = run_cli(capsys, "certify", "--batch", str(batch), "--emit", str(emit))
    assert code == 0
    assert out.count("TIGHT") == 3
    for i in range(3):
        stored = load_json(str(tmp_path / f"certs.{i}.json"))
        assert stored["format"] == "tightness-certificate"


def test_certify_batch_with_refusal_exits_2(tmp_path, capsys):
    batch = tmp_path / "slopes.txt"
    batch.write_text("-2\n1\n")
    code, out, _ = run_cli(capsys, "certify", "--batch", str(batch))
    assert code == 2
    assert "TIGHT" in out and "REFUSED" in out


def test_certify_json_output(capsys):
    code, out, _ = run_cli(capsys, "certify", "--r", "0", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["verified"] is True
    assert data["certificate"]["slope"] == "0"


def test_missing_batch_file_exits_2(capsys):
    code, _, err = run_cli(capsys, "certify", "--batch", "/nonexistent/slopes.txt")
    assert code == 2 and "error:" in err


def test_output_bytes_deterministic(capsys):
    first = run_cli(capsys, "certify", "--r", "9/5", "--json")
    second = run_cli(capsys, "certify", "--r", "9/5", "--json")
    assert first == second
    third = run_cli(capsys, "ranks", "--max-k", "6", "--json")
    fourth = run_cli(capsys, "ranks", "--max-k", "6", "--json")
    assert third == fourth
