import io
import json

import numpy as np
import pytest

from posmap import cli
from posmap.bidual import BidualProbe
from posmap.serialize import ParseError, map_from_json, matrix_from_json, matrix_to_json


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


def test_matrix_roundtrip(rng):
    a = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    back = matrix_from_json(json.loads(json.dumps(matrix_to_json(a))))
    assert np.array_equal(back, a)


def test_matrix_bad_entry_is_located():
    with pytest.raises(ParseError, match=r"\$.data\[1\]"):
        matrix_from_json({"rows": 1, "cols": 2, "data": [[1, 0], "2"]})


def test_compose_is_right_to_left():
    spec = {"kind": "compose", "maps": [
        {"kind": "ad", "s": matrix_to_json(np.eye(2, 3))},
        {"kind": "transpose", "r": 2},
    ]}
    phi = map_from_json(spec)
    a = np.array([[1, 2], [3, 4]])
    assert np.array_equal(phi(a), [[1, 3, 0], [2, 4, 0], [0, 0, 0]])


def test_unknown_kind_is_located():
    with pytest.raises(ParseError, match=r"\$.maps\[0\].kind"):
        map_from_json({"kind": "compose", "maps": [{"kind": "nope"}]})


def test_choi_command(tmp_path, capsys):
    path = write(tmp_path, "id2.json", {"kind": "identity", "r": 2})
    out = str(tmp_path / "r.json")
    assert cli.main(["choi", "--in", path, "--json", out]) == 0
    report = json.loads(open(out).read())
    got = matrix_from_json(report["results"]["choi"])
    assert np.array_equal(got, [[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]])
    assert report["seed"] == 42
    assert report["tolerances"] == {"rank_tol": 1e-9, "entry_tol": 1e-9}


def test_special_check(capsys):
    assert cli.main(["check", "--cone", "blockpos", "--special", "1,1,0.6,0.5"]) == 0
    assert "not member, margin -0.1" in capsys.readouterr().out


def test_woronowicz_command(tmp_path, capsys):
    path = write(tmp_path, "id3.json", {"kind": "identity", "r": 3})
    out = str(tmp_path / "w.json")
    assert cli.main(["woronowicz", "--in", path, "--json", out]) == 0
    res = json.loads(open(out).read())["results"]
    assert res["dim_N"] == 24 and res["dim_ker_hat"] == 24
    assert res["verdict"] == "exposed_by_theorem"


def test_stdin_input(monkeypatch, capsys):
    monkeypatch.setattr("sys.stdin", io.StringIO('{"kind": "identity", "r": 2}'))
    assert cli.main(["check", "--cone", "cp"]) == 0
    assert capsys.readouterr().out.startswith("member")


def test_malformed_json(tmp_path, capsys):
    path = write(tmp_path, "bad.json", '{"kind": "identity",\n "r": }')
    assert cli.main(["choi", "--in", path]) == 1
    assert "line 2, column 7" in capsys.readouterr().err


def test_dimension_mismatch(tmp_path, capsys):
    eye3 = matrix_to_json(np.eye(3))
    path = write(tmp_path, "a.json", {"map": {"kind": "identity", "r": 2}, "a": eye3})
    assert cli.main(["apply", "--in", path]) == 1
    err = capsys.readouterr().err
    assert "M_2" in err and "(3, 3)" in err
    path = write(tmp_path, "p.json", {"a": matrix_to_json(np.eye(2)), "b": eye3})
    assert cli.main(["pair", "--in", path]) == 1
    err = capsys.readouterr().err
    assert "(2, 2)" in err and "(3, 3)" in err


def test_usage_errors(capsys):
    assert cli.main(["nonsense"]) == 1
    assert cli.main(["check", "--cone", "blockpos", "--special", "1,2"]) == 1


def test_not_member_exits_zero(tmp_path):
    path = write(tmp_path, "t.json", {"kind": "transpose", "r": 2})
    assert cli.main(["check", "--cone", "cp", "--in", path]) == 0


def test_reports_are_byte_identical(tmp_path):
    s = matrix_to_json(np.array([[1, 2j], [0, 1]]))
    path = write(tmp_path, "s.json", s)
    a, b = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert cli.main(["pipeline-marciniak", "--in", path, "--json", a]) == 0
    assert cli.main(["pipeline-marciniak", "--in", path, "--json", b]) == 0
    assert open(a).read() == open(b).read()
    report = json.loads(open(a).read())
    assert report["results"]["verdict"] == "exposed (numerical certificate)"


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("POSMAP_SEED", "7")
    path = write(tmp_path, "id2.json", {"kind": "identity", "r": 2})
    out = str(tmp_path / "r.json")
    assert cli.main(["bidual", "--in", path, "--json", out]) == 0
    assert json.loads(open(out).read())["seed"] == 7
    assert cli.main(["bidual", "--in", path, "--json", out, "--seed", "3"]) == 0
    assert json.loads(open(out).read())["seed"] == 3


def test_timing_only_on_request(tmp_path):
    path = write(tmp_path, "id2.json", {"kind": "identity", "r": 2})
    out = str(tmp_path / "r.json")
    cli.main(["choi", "--in", path, "--json", out])
    assert "timing_ms" not in json.loads(open(out).read())
    cli.main(["choi", "--in", path, "--json", out, "--timing"])
    assert "timing_ms" in json.loads(open(out).read())


def test_instability_exits_two(tmp_path, monkeypatch, capsys):
    def unstable(*args, **kwargs):
        return BidualProbe(3, [], 10, 10, False, stable=False, dimension_at_double=2)

    monkeypatch.setattr(cli, "probe_bidual", unstable)
    path = write(tmp_path, "id2.json", {"kind": "identity", "r": 2})
    assert cli.main(["bidual", "--in", path]) == 2
    assert "bidual" in capsys.readouterr().err


def test_reduce_command(tmp_path):
    path = write(tmp_path, "s.json", matrix_to_json(np.outer([1, 1j], [2, 0, 1])))
    out = str(tmp_path / "r.json")
    assert cli.main(["reduce", "--in", path, "--json", out]) == 0
    res = json.loads(open(out).read())["results"]
    assert res["rank"] == 1 and res["reconstruction_residual"] < 1e-12
