import json
import math

import numpy as np
import pytest
from util import paley6_roux

from rouxforge.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_family_psl2_q13(tmp_path, capsys):
    out = tmp_path / "psl13.json"
    code, _, _ = run(["family", "psl2", "--q", "13", "--out", str(out)], capsys)
    assert code == 0
    report = json.loads(out.read_text())
    assert report["passed"] is True
    quad = next(c for c in report["characters"] if c["character"]["image_order"] == 2)
    k1 = next(ls for ls in quad["line_sets"] if ls["k"] == 1)
    assert k1["etf"]["d"] == 7
    assert k1["real_algebraic"] is True


def test_family_psl2_q9_exit2(capsys):
    code, _, err = run(["family", "psl2", "--q", "9"], capsys)
    assert code == 2
    assert "exceptional" in err and "cover" in err


def test_family_psl2_even_q_exit2(capsys):
    code, _, err = run(["family", "psl2", "--q", "8"], capsys)
    assert code == 2
    assert "even" in err


def test_family_psu3_q3_blocks(tmp_path, capsys):
    out = tmp_path / "psu3.json"
    code, _, _ = run(["family", "psu3", "--q", "3", "--out", str(out)], capsys)
    assert code == 0
    report = json.loads(out.read_text())
    orders = sorted(
        c["character"]["image_order"] for c in report["characters"] if c["higman"]
    )
    assert orders == [1, 2, 4, 4]
    assert report["passed"] is True


def test_family_reports_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["family", "psl2", "--q", "5", "--out", str(a)], capsys)[0] == 0
    assert run(["family", "psl2", "--q", "5", "--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_family_csv_summary(tmp_path, capsys):
    out = tmp_path / "psl5.csv"
    code, _, _ = run(
        ["family", "psl2", "--q", "5", "--format", "csv", "--out", str(out)], capsys
    )
    assert code == 0
    text = out.read_text().splitlines()
    assert text[0].startswith("family,q,n,character")
    assert any(",3," in line for line in text[1:])


def test_family_sp(capsys):
    code, out, _ = run(["family", "sp", "--m", "3", "--epsilon", "-"], capsys)
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_detect_s3(tmp_path, capsys):
    spec = {"kind": "permutation", "degree": 3, "generators": [[1, 0, 2], [1, 2, 0]]}
    path = tmp_path / "s3.json"
    path.write_text(json.dumps(spec))
    code, out, _ = run(["detect", str(path)], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["n"] == 3
    assert report["character_count"] == 2
    for row in report["characters"]:
        assert row["higman"] is True
        assert row["params"] is not None
        dims = {round(e["d"]) for e in row["idempotents"]}
        assert dims <= {1, 2}


def test_detect_sl25_projective(tmp_path, capsys):
    spec = {
        "kind": "matrix",
        "field": {"p": 5, "k": 1, "irreducible": [0, 1]},
        "dim": 2,
        "generators": [[1, 1, 0, 1], [0, 1, 4, 0]],
        "action": "projective",
    }
    path = tmp_path / "sl25.json"
    path.write_text(json.dumps(spec))
    code, out, _ = run(["detect", str(path), "--jobs", "2"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["n"] == 6
    quad = [
        row
        for row in report["characters"]
        if row["higman"] and row["character"]["image_order"] == 2
    ]
    assert len(quad) == 1
    assert quad[0]["params"] == [2, 0, 2, 0]
    assert quad[0]["key"][1] == 0
    higman_count = sum(1 for row in report["characters"] if row["higman"])
    assert higman_count == 2


def test_detect_intransitive_exit3(tmp_path, capsys):
    spec = {"kind": "permutation", "degree": 4, "generators": [[1, 0, 2, 3]]}
    path = tmp_path / "c2.json"
    path.write_text(json.dumps(spec))
    code, _, err = run(["detect", str(path)], capsys)
    assert code == 3
    assert "H1" in err


def test_detect_not_doubly_transitive_exit3(tmp_path, capsys):
    spec = {"kind": "permutation", "degree": 4, "generators": [[1, 2, 3, 0]]}
    path = tmp_path / "c4.json"
    path.write_text(json.dumps(spec))
    code, _, err = run(["detect", str(path)], capsys)
    assert code == 3


def test_detect_malformed_exit2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(["detect", str(path)], capsys)[0] == 2
    path.write_text(json.dumps({"kind": "nonsense"}))
    assert run(["detect", str(path)], capsys)[0] == 2


def test_detect_cache_roundtrip(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("ROUXFORGE_CACHE", str(tmp_path / "cache"))
    spec = {"kind": "permutation", "degree": 3, "generators": [[1, 0, 2], [1, 2, 0]]}
    path = tmp_path / "s3.json"
    path.write_text(json.dumps(spec))
    code1, out1, _ = run(["detect", str(path)], capsys)
    assert code1 == 0
    cached = list((tmp_path / "cache").glob("group-*.json"))
    assert len(cached) == 1
    code2, out2, _ = run(["detect", str(path)], capsys)
    assert code2 == 0
    assert out1 == out2


def test_verify_roux_file(tmp_path, capsys):
    B = paley6_roux(4)
    path = tmp_path / "roux.json"
    path.write_text(json.dumps(B.to_json()))
    code, out, _ = run(["verify", str(path), "--kind", "roux"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["passed"] is True
    assert report["params"]["c"] == [2, 0, 2, 0]


def test_verify_corrupted_roux_locates_cell(tmp_path, capsys):
    B = paley6_roux(4)
    blob = B.to_json()
    blob["entries"][0][1] = (blob["entries"][0][1] + 1) % 4  # break inverse-symmetry
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(blob))
    code, out, _ = run(["verify", str(path), "--kind", "roux"], capsys)
    assert code == 1
    report = json.loads(out)
    assert report["passed"] is False
    assert report["error"]["cell"] == [0, 1]


def test_verify_signature_all_ones(tmp_path, capsys):
    n = 4
    S = np.ones((n, n)) - np.eye(n)
    blob = {"n": n, "entries": [[float(v.real), float(v.imag)] for v in S.flatten()]}
    path = tmp_path / "sig.json"
    path.write_text(json.dumps(blob))
    code, out, _ = run(["verify", str(path), "--kind", "signature"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["certificate"]["d"] == 1


def test_verify_etf_gram(tmp_path, capsys):
    from rouxforge.lines import gram_from_signature
    from rouxforge.roux import signature_matrix

    gram, _ = gram_from_signature(signature_matrix(paley6_roux(4), 1))
    blob = {
        "n": 6,
        "entries": [[float(v.real), float(v.imag)] for v in gram.matrix.flatten()],
    }
    path = tmp_path / "gram.json"
    path.write_text(json.dumps(blob))
    code, out, _ = run(["verify", str(path), "--kind", "etf"], capsys)
    assert code == 0
    assert json.loads(out)["certificate"]["mu"] == pytest.approx(1 / math.sqrt(5))


def test_verify_twograph(tmp_path, capsys):
    from rouxforge.lines import two_graph_from_lines
    from rouxforge.roux import signature_matrix

    tg = two_graph_from_lines(signature_matrix(paley6_roux(4), 1))
    path = tmp_path / "tg.json"
    path.write_text(json.dumps(tg.to_json()))
    code, out, _ = run(["verify", str(path), "--kind", "twograph"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["regularity"]["regular"] is True
    assert report["regularity"]["d"] == pytest.approx(3)


def test_verify_exported_psl27_roux(tmp_path, capsys):
    from rouxforge.families import sl2_family

    rep = sl2_family(7)
    block = next(b for b in rep.characters if b.higman and b.image_order == 2)
    path = tmp_path / "psl27.json"
    path.write_text(json.dumps(block.roux_matrix.to_json()))
    code, out, _ = run(["verify", str(path), "--kind", "roux"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["params"]["c"] == [0, 3, 0, 3]


def test_tolerance_override_flags(tmp_path, capsys):
    import rouxforge.lines as lines_mod
    from rouxforge.lines import gram_from_signature
    from rouxforge.roux import signature_matrix

    gram, vectors = gram_from_signature(signature_matrix(paley6_roux(4), 1))
    vectors[1, 0] += 0.01  # tilt one vector: still a Gram, no longer equiangular
    vectors[:, 0] /= np.linalg.norm(vectors[:, 0])
    M = vectors.conj().T @ vectors
    blob = {"n": 6, "entries": [[float(v.real), float(v.imag)] for v in M.flatten()]}
    path = tmp_path / "gram.json"
    path.write_text(json.dumps(blob))
    default_tol = lines_mod.ETF_TOL
    try:
        assert run(["verify", str(path), "--kind", "etf"], capsys)[0] == 1
        assert run(
            ["verify", str(path), "--kind", "etf", "--tol-etf", "0.05"], capsys
        )[0] == 0
    finally:
        lines_mod.ETF_TOL = default_tol
