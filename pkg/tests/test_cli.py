import json

import numpy as np
import pytest
from click.testing import CliRunner

from huadomains import io
from huadomains.cli import main

BALL_MERGE = {"base": {"kind": "ball", "d": 2}, "fibers": [{"dim": 2, "exp": 1.0}, {"dim": 2, "exp": 2.0}]}
BALL4 = {"base": {"kind": "ball", "d": 4}, "fibers": [{"dim": 2, "exp": 2.0}]}
I22 = {"base": {"kind": "I", "m": 2, "n": 2}, "fibers": [{"dim": 2, "exp": 1.0}, {"dim": 2, "exp": 2.0}]}
FIXTURE = {"base": {"kind": "ball", "d": 2}, "fibers": [{"dim": 2, "exp": 2.0}, {"dim": 2, "exp": 3.0}]}


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)

    return write


def run(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def pts(*points):
    return "".join(json.dumps(p) + "\n" for p in points)


def test_norm_examples(files):
    spec = files("s.json", I22)
    zero4 = [[0, 0]] * 4
    origin = {"z": zero4, "w": [[[0, 0]] * 2, [[0, 0]] * 2]}
    boundary = {"z": zero4, "w": [[[1, 0], [0, 0]], [[0, 0]] * 2]}
    outside = {"z": zero4, "w": [[[1, 0], [0, 0]], [[1, 0], [0, 0]]]}
    r = run("norm", spec, files("p.jsonl", pts(origin, boundary, outside)))
    assert r.exit_code == 0, r.output
    recs = json.loads(r.output)["records"]
    assert recs[0]["N"] == 1 and recs[0]["margin"] == 1
    assert abs(recs[1]["margin"]) < 1e-9
    assert recs[2]["margin"] < 0


def test_member(files):
    spec = files("s.json", I22)
    p = {"z": [[0.1, 0]] * 4, "w": [[[0.1, 0]] * 2, [[0.1, 0]] * 2]}
    r = run("member", spec, files("p.jsonl", pts(p)))
    assert r.exit_code == 0 and json.loads(r.output)["summary"]["inside"] == 1


def test_classify_sampled(files):
    r = run("classify", files("s.json", FIXTURE), "--samples", 500)
    assert r.exit_code == 0, r.output
    counts = json.loads(r.output)["summary"]["counts"]
    assert counts.get("B0", 0) + counts.get("B1", 0) == 500 and "BaseEdge" not in counts


def test_classify_pure_ball_and_edge(files):
    r = run("classify", files("b.json", {"base": {"kind": "ball", "d": 3}}), "--samples", 20)
    assert json.loads(r.output)["summary"]["counts"] == {"B0": 20}
    edge = {"z": [[1, 0], [0, 0]], "w": [[[0, 0]] * 2, [[0, 0]] * 2]}
    r = run("classify", files("s.json", FIXTURE), "--points", files("p.jsonl", pts(edge)))
    assert json.loads(r.output)["records"][0]["tag"] == "BaseEdge"


def test_levi(files):
    spec = files("s.json", FIXTURE)
    r = run("levi", spec, "--samples", 20)
    assert r.exit_code == 0, r.output
    recs = json.loads(r.output)["records"]
    for rec in recs:
        assert rec["min_eigenvalue"] > 1e-7
        assert abs(rec["min_eigenvalue"] - rec["min_eigenvalue_fd"]) <= 1e-5 * rec["min_eigenvalue"]
    r = run("levi", spec, "--samples", 5, "--zero-block", 1, "--no-fd")
    for rec in json.loads(r.output)["records"]:
        assert rec["min_eigenvalue"] < 1e-8 and abs(rec["levi_T0"]) < 1e-8


def test_aut_sample_and_apply(files, tmp_path):
    spec = files("s.json", I22)
    r = run("aut-sample", spec, "--seed", 3)
    assert r.exit_code == 0
    g = files("g.json", r.output.strip())
    points = run("sample-boundary", spec, "--samples", 5)
    p = files("p.jsonl", points.output)
    r = run("aut-apply", g, p)
    assert r.exit_code == 0, r.output
    for rec in json.loads(r.output)["records"]:
        assert abs(rec["margin_after"]) < 1e-9


def test_equiv(files):
    r = run("equiv", files("a.json", BALL_MERGE), files("b.json", BALL4), "--samples", 200)
    assert r.exit_code == 0, r.output
    summary = json.loads(r.output)["summary"]
    assert summary["equivalent"] is True and summary["residuals"]["membership_mismatches"] == 0
    other = dict(I22, fibers=[{"dim": 2, "exp": 1.0}, {"dim": 2, "exp": 3.0}])
    r = run("equiv", files("c.json", I22), files("d.json", other))
    assert r.exit_code == 1 and json.loads(r.output)["summary"]["equivalent"] is False


def test_equiv_undetermined(files):
    a = {"base": {"kind": "IV", "n": 3}, "fibers": [{"dim": 1, "exp": 2.0}]}
    b = {"base": {"kind": "III", "n": 2}, "fibers": [{"dim": 1, "exp": 2.0}]}
    r = run("equiv", files("a.json", a), files("b.json", b))
    assert r.exit_code == 1 and json.loads(r.output)["summary"]["equivalent"] is None


def test_recover(files):
    spec = files("e.json", {"fibers": [{"dim": 2, "exp": 2.0}, {"dim": 3, "exp": 3.0}]})
    r = run("recover", files("l.json", io.encode_array(np.eye(5))), spec, spec)
    assert r.exit_code == 0, r.output
    rec = json.loads(r.output)["records"][0]
    assert rec["accepted"] and rec["sigma"] == [1, 2]
    r = run("recover", files("m.json", io.encode_array(np.ones((5, 5)))), spec, spec)
    assert r.exit_code == 1 and json.loads(r.output)["records"][0]["offending"]


def test_exit_codes(files):
    spec = files("s.json", I22)
    assert run("classify", files("n.json", BALL_MERGE)).exit_code == 2
    assert run("classify", spec, "--tol", -1).exit_code == 2
    assert run("classify", spec, "--samples", 0).exit_code == 2
    assert run("classify", files("bad.json", "{not json")).exit_code == 3
    bad_pts = files("bad.jsonl", '{"z": [[0, 0]]}\n{oops\n')
    r = run("member", spec, bad_pts)
    assert r.exit_code == 3 and "line 2" in r.output
    assert run("member", spec, files("p.jsonl", pts({"z": [[0, 0]]}))).exit_code == 2
    two_ones = dict(I22, fibers=[{"dim": 1, "exp": 1.0}, {"dim": 1, "exp": 1.0}])
    assert run("classify", files("t.json", two_ones)).exit_code == 2


def test_json_csv_round_trip(files):
    spec = files("s.json", FIXTURE)
    a = run("levi", spec, "--samples", 4)
    b = run("levi", spec, "--samples", 4, "--format", "csv")
    assert b.output.startswith("# ")
    assert io.loads_report(b.output, "csv") == io.loads_report(a.output, "json")
    c = run("classify", spec, "--samples", 6, "--format", "csv")
    d = run("classify", spec, "--samples", 6)
    assert io.loads_report(c.output, "csv") == json.loads(d.output)


def test_determinism(files):
    spec = files("s.json", FIXTURE)
    assert run("levi", spec, "--samples", 5, "--seed", 9).output == run("levi", spec, "--samples", 5, "--seed", 9).output
    assert run("levi", spec, "--samples", 5, "--seed", 9).output != run("levi", spec, "--samples", 5, "--seed", 8).output


def test_selftest_small():
    r = run("selftest", "--scale", 0.2)
    assert r.exit_code == 0, r.output
    assert json.loads(r.output)["summary"]["failed"] == []
