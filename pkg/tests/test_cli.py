import json
from fractions import Fraction

import pytest

from punctual import cli


def write_jsonl(path, records):
    with open(path, "w") as f:
        for r in records:
            f.write(json.dumps(r) + "\n")
    return str(path)


@pytest.fixture
def cauchy_fixture(tmp_path):
    seq = ["", "0", "01", "011", "0110"]
    return write_jsonl(
        tmp_path / "cauchy.jsonl",
        [{"x": n, "t_converge": n + 2, "value": seq[n]} for n in range(5)],
    )


@pytest.fixture
def ivt_fixture(tmp_path):
    recs = [
        {"x": "0/1", "t_converge": 0, "value": -1},
        {"x": "1/1", "t_converge": 0, "value": 1},
    ]
    root = Fraction(1, 3)
    a, b = Fraction(0), Fraction(1)
    for t in range(1, 24):
        mid = (a + b) / 2
        recs.append(
            {
                "x": "%d/%d" % (mid.numerator, mid.denominator),
                "t_converge": t,
                "value": -1 if mid < root else 1,
            }
        )
        if mid < root:
            a = mid
        else:
            b = mid
    return write_jsonl(tmp_path / "ivt.jsonl", recs)


def test_serialization_helpers():
    assert cli.to_jsonable(Fraction(3, 4)) == "3/4"
    assert cli.parse_scalar("3/4") == Fraction(3, 4)
    with pytest.raises(Exception):
        cli.to_jsonable(0.5)
    with pytest.raises(cli.ParseError):
        cli.parse_scalar(0.5)
    a = cli.canonical_bytes({"b": 1, "a": [2, 3]})
    b = cli.canonical_bytes({"a": [2, 3], "b": 1})
    assert a == b


def test_transform_cauchy_exit_zero(cauchy_fixture, tmp_path, capsys):
    out = str(tmp_path / "report.json")
    code = cli.main(
        ["transform", "cauchy", "--instance", cauchy_fixture, "--horizon", "24", "--out", out]
    )
    assert code == 0
    report = json.load(open(out))
    assert report["schema"] == cli.SCHEMA
    assert all(a.get("ok", True) for a in report["audits"])


def test_transform_ivt_exit_zero(ivt_fixture, tmp_path):
    out = str(tmp_path / "ivt.json")
    code = cli.main(
        ["transform", "ivt", "--instance", ivt_fixture, "--horizon", "20", "--out", out]
    )
    assert code == 0


def test_malformed_jsonl_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{oops\n")
    code = cli.main(["transform", "cauchy", "--instance", str(bad)])
    capsys.readouterr()
    assert code == 2


def test_bad_scenario_parameters():
    report, code = cli.run({"kind": ["transform", "cauchy"], "horizon": 0})
    assert code == 2
    report, code = cli.run({"kind": ["transform", "cauchy"], "budget_c": -1, "horizon": 4})
    assert code == 2
    report, code = cli.run({"kind": ["nonsense"], "horizon": 4})
    assert code == 2


def test_online_hall_violation_reported(tmp_path, capsys):
    fx = write_jsonl(
        tmp_path / "hall.jsonl",
        [
            {"meta": {"b_side": [100]}},
            {"a": 0, "neighbors": [100]},
            {"a": 1, "neighbors": [100]},
        ],
    )
    rep, code = cli.run({"kind": ["online", "hall"], "instance": fx, "horizon": 4})
    assert code == 0  # violation witness is a valid answer
    assert rep["deterministic"]["matching"] is None
    assert rep["deterministic"]["violation"] == [0, 1]


def test_replay_match_and_divergence(cauchy_fixture, tmp_path, capsys):
    out = str(tmp_path / "trace.json")
    assert (
        cli.main(
            ["transform", "cauchy", "--instance", cauchy_fixture, "--horizon", "16", "--out", out]
        )
        == 0
    )
    assert cli.main(["replay", out]) == 0
    verdict = json.loads(capsys.readouterr().out)
    assert verdict["verdict"] == "match"
    # edit one deterministic stage: divergence with its index reported
    trace = json.load(open(out))
    stages = trace["deterministic"]["stages"]
    stages[5] = ["corrupted", stages[5][1] if isinstance(stages[5], list) else 0]
    json.dump(trace, open(out, "w"))
    assert cli.main(["replay", out]) == 4
    verdict = json.loads(capsys.readouterr().out)
    assert verdict["verdict"] == "divergence"
    assert verdict["first_differing_stage"] == 5


def test_replay_unreadable_trace(tmp_path, capsys):
    p = tmp_path / "junk.json"
    p.write_text("not json")
    assert cli.main(["replay", str(p)]) == 2
    capsys.readouterr()


def test_golden_dir_record_then_match(cauchy_fixture, tmp_path, capsys, monkeypatch):
    gdir = tmp_path / "golden"
    monkeypatch.setenv("PUNCTUAL_GOLDEN_DIR", str(gdir))
    out = str(tmp_path / "g.json")
    argv = ["transform", "cauchy", "--instance", cauchy_fixture, "--horizon", "12", "--out", out]
    assert cli.main(argv) == 0
    assert "recorded" in capsys.readouterr().out
    assert cli.main(argv) == 0
    assert "match" in capsys.readouterr().out


def test_structures_subcommands(tmp_path):
    pred = write_jsonl(
        tmp_path / "pred.jsonl",
        [{"meta": {"default": 0, "count": 4, "horizon": 64}}]
        + [{"n": n, "y": y} for n, y in enumerate([0, 4, 7, 2])],
    )
    for kind in ("dlo", "rg", "ba"):
        rep, code = cli.run({"kind": ["structures", "build", kind], "horizon": 32, "prefix": 8})
        assert code == 0, (kind, rep)
        rep, code = cli.run(
            {"kind": ["structures", "decode", kind], "instance": pred, "horizon": 64, "prefix": 8}
        )
        assert code == 0, (kind, rep)
        decoded = rep["deterministic"]["decoded"]
        assert decoded == [0, 4, 7, 2], (kind, decoded)


def test_diagonal_uc_scenario(tmp_path):
    fx = write_jsonl(
        tmp_path / "uc.jsonl",
        [{"meta": {"max_index": 4}}, {"entry": [[i, 0, 2 * i] for i in range(12)]}],
    )
    rep, code = cli.run({"kind": ["diagonal", "uc"], "instance": fx, "horizon": 64})
    assert code == 0, rep
    assert rep["deterministic"]["breakpoints"]
