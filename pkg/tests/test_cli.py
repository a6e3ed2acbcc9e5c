from __future__ import annotations

import json

import numpy as np

from rankcodes import build_field
from rankcodes.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_construct_line_counts(capsys):
    code, out, err = run(capsys, "construct", "--field", "3^1:3:1", "--code", "cst:k=2,T=1")
    assert code == 0 and len(out.splitlines()) == 729
    assert "size=729" in err and "claimed_distance=2" in err
    code, out, _ = run(capsys, "construct", "--field", "2^1:3:1", "--code", "gab:k=2")
    assert code == 0 and len(out.splitlines()) == 64


def test_construct_invalid(capsys):
    assert run(capsys, "construct", "--field", "3^1:3:1", "--code", "cst:k=2,T=")[0] == 2
    assert run(capsys, "construct", "--field", "3:3:1", "--code", "gab:k=2")[0] == 2
    assert run(capsys, "construct", "--field", "3^1:3:1", "--code", "gab:k=2", "--guard", "10")[0] == 2
    assert run(capsys, "bogus")[0] == 2


def test_verify_cst_and_oonl(capsys):
    code, out, _ = run(capsys, "verify", "--field", "3^1:3:1", "--code", "cst:k=2,T=1", "--mode", "exhaustive")
    rep = json.loads(out)
    assert code == 0 and rep["is_mrd"] and rep["min_distance"] == 2
    code, out, _ = run(capsys, "verify", "--field", "3^1:3:1", "--code", "oonl:k=2,I=1")
    rep = json.loads(out)
    assert code == 0 and rep["is_mrd"] and rep["flags"]["fq_closed"] is False


def test_verify_refuses_sampled(capsys):
    assert run(capsys, "verify", "--field", "3^1:3:1", "--code", "gab:k=2", "--mode", "sampled")[0] == 2


def test_verify_corrupted_file(tmp_path, capsys):
    path = tmp_path / "code.txt"
    run(capsys, "construct", "--field", "3^1:3:1", "--code", "cst:k=2,T=1", "--header", "--out", str(path))
    lines = path.read_text().splitlines()
    F = build_field(3, 1, 3, 1)
    w = np.array([int(v) for v in lines[4].split(",")])
    lines[11] = ",".join(str(int(v)) for v in F.add(w, np.array([1, 1, 1])))
    path.write_text("\n".join(lines) + "\n")
    code, out, _ = run(capsys, "verify", "--field", "3^1:3:1", "--code-file", str(path), "--no-flags")
    rep = json.loads(out)
    assert code == 1 and not rep["is_mrd"]
    assert rep["claimed_distance"] == 2 and rep["witness"]["rank"] == 1 and len(rep["witness"]["pair"]) == 2


def test_verify_csv_and_determinism(tmp_path, capsys):
    args = ["verify", "--field", "2^1:3:1", "--code", "gab:k=2", "--seed", "3"]
    a = run(capsys, *args)[1]
    b = run(capsys, *args)[1]
    assert a == b
    code, out, _ = run(capsys, *args, "--format", "csv")
    assert out.splitlines()[0] == "rank,count" and code == 0


def test_geometry(capsys):
    code, out, _ = run(capsys, "geometry", "--field", "2^1:4:1", "--k", "3", "--T", "1")
    rep = json.loads(out)
    assert code == 0 and rep["ok"] and rep["K_size"]["value"] == 273
    code, out, _ = run(capsys, "geometry", "--field", "3^1:3:1", "--k", "2", "--T", "1")
    rep = json.loads(out)
    assert code == 0 and rep["vertex_rank"] == 0 and rep["K_size"]["value"] == rep["E_size"]["value"]
    assert run(capsys, "geometry", "--field", "3^1:3:1", "--k", "3")[0] == 2


def test_compare(capsys):
    code, out, _ = run(capsys, "compare", "--field", "3^1:3:2", "--code", "cst:k=2,T=1", "--code", "oonl:k=2,I=1")
    assert code == 0 and json.loads(out)["verdict"] == "DISTINGUISHED"
    code, out, _ = run(capsys, "compare", "--field", "3^1:3:1", "--code", "gab:k=2", "--code", "cst:k=2,T=1,2")
    assert code == 3 and json.loads(out)["verdict"] == "INCONCLUSIVE"
    code, _, _ = run(capsys, "compare", "--field", "3^1:3:1", "--code", "gab:k=2", "--code", "gab:k=2")
    assert code == 3


def test_puncture(capsys):
    code, out, _ = run(capsys, "puncture", "--field", "2^1:4:1", "--code", "cst:k=3,T=1", "--u", "1")
    rep = json.loads(out)
    assert code == 0 and rep["shape"] == [3, 4] and rep["size"] == 256
    assert rep["min_distance"] == 2 and rep["is_mrd"]
    for u in ("0", "4"):
        assert run(capsys, "puncture", "--field", "2^1:4:1", "--code", "cst:k=3,T=1", "--u", u)[0] == 2


def test_idealiser(tmp_path, capsys):
    m1 = tmp_path / "c1.txt"
    m1.write_text("1,2;3,4\n3,4;3,4\n")
    code, out, _ = run(capsys, "idealiser", "--field", "5^1:2:1", "--matrix-file", str(m1), "--side", "left")
    rep = json.loads(out)
    assert code == 0 and rep["left"]["invertible"] == 1
    code, out, _ = run(capsys, "idealiser", "--field", "2^1:3:1", "--code", "cst:k=2,T=1")
    rep = json.loads(out)
    assert rep["left"]["size"] == 8 and rep["left"]["is_field"]
