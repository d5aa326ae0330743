"""
End-to-end runs of the command-line front end.
"""

import json
import re

import pytest

import database
from main import main, parse_schedule
from errors import ExpressionSyntaxError
from graph_core import complete_graph


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def _report(capsys, argv):
    code, out = _run(capsys, argv)
    return code, json.loads(out)


class TestReports:
    def test_spectral(self, capsys):
        code, report = _report(capsys, ["spectral", "--u", "1", "--T", "3"])
        assert code == 0
        assert report["command"] == "spectral"
        assert set(report) == {"command", "version", "config", "results", "checks", "timestamp"}
        assert report["results"][0]["threshold"] == pytest.approx(13.8155, abs=0.05)
        assert all(set(c) == {"name", "pass", "lhs", "rhs"} for c in report["checks"])
        assert all(c["pass"] for c in report["checks"])

    def test_moments(self, capsys, graph_file):
        path = graph_file(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "d")])
        code, report = _report(capsys, ["moments", "--graph", path, "--vertex", "b", "--max-p", "5"])
        assert code == 0
        assert [row["moment"] for row in report["results"]] == pytest.approx([1, 2, 5, 14, 42])

    def test_fock_norm(self, capsys, graph_file):
        path = graph_file(["a", "b"])
        code, report = _report(capsys, ["fock-norm", "--graph", path, "--poly", "X_a + X_b", "--depth", "4"])
        assert code == 0
        assert report["results"][0]["value"] == pytest.approx(2 ** 0.5)

    def test_reg_norm(self, capsys, graph_file):
        path = graph_file(["a", "b"], [("a", "b")])
        code, report = _report(capsys, ["reg-norm", "--graph", path, "--z", "[a] + [a'] + [b] + [b']",
                                        "--radius", "6", "--moment-k", "6"])
        assert code == 0
        moment = [row for row in report["results"] if row.get("k") == 6][0]
        assert 3.0 <= moment["value"] <= 4.0

    def test_limit_check(self, capsys, graph_file):
        path = graph_file(["a", "b"])
        code, report = _report(capsys, ["limit-check", "--graph", path, "--m", "1,2,3,4", "--depth", "2"])
        assert code == 0
        assert [row["m"] for row in report["results"]] == [1, 2, 3, 4]
        assert all(row["pass"] for row in report["results"])

    def test_sample_norm(self, capsys, graph_file):
        path = graph_file(["a", "b", "c"], [("a", "b"), ("b", "c")])
        code, report = _report(capsys, ["sample-norm", "--graph", path, "--m", "2", "--K", "all=2", "--trials", "2"])
        assert code == 0
        assert [row["seed"] for row in report["results"]] == [20240101, 20240102]
        assert any(c["name"].startswith("commute") for c in report["checks"])

    def test_sample_norm_without_aux(self, capsys, graph_file):
        path = graph_file(["a", "b"])
        code, report = _report(capsys, ["sample-norm", "--graph", path, "--m", "3", "--no-aux"])
        assert code == 0
        assert report["results"][0]["dim"] == 3

    def test_sgrm_concentration(self, capsys):
        code, report = _report(capsys, ["sample-norm", "--n", "300", "--trials", "4"])
        assert code == 0
        assert len(report["results"]) == 4

    def test_unitary_rep(self, capsys, graph_file):
        path = graph_file(["a", "b", "c"], [("a", "b"), ("b", "c")])
        code, report = _report(capsys, ["unitary-rep", "--graph", path, "--m", "2", "--K", "all=2",
                                        "--z", "[a c a' c']", "--pairs", "3"])
        assert code == 0
        row = report["results"][0]
        assert row["dim"] == 16
        assert row["distance_from_identity"] > 0
        assert "ac" in row["commutators"]

    def test_converge(self, capsys, graph_file):
        path = graph_file(["a", "b"], [("a", "b")])
        code, report = _report(capsys, ["converge", "--graph", path, "--z", "[a] + [a'] + [b] + [b']",
                                        "--schedule", "K=4;8", "--trials", "2", "--radius", "4",
                                        "--moment-k", "3", "--seed", "11"])
        assert code == 0
        experiment = report["results"][0]
        assert len(experiment["schedule"]) == 2
        assert [cell["seed"] for cell in experiment["schedule"][0]["seeds"]] == [11, 12]

    def test_csv(self, capsys):
        code, out = _run(capsys, ["spectral", "--out", "csv"])
        assert code == 0
        assert "pairing_value" in out.splitlines()[0]

    def test_repeated_runs_are_byte_identical(self, capsys, graph_file):
        path = graph_file(["a", "b", "c"], [("a", "b"), ("b", "c")])
        argv = ["unitary-rep", "--graph", path, "--m", "2", "--K", "all=2", "--z", "[a c a' c']",
                "--pairs", "3", "--trials", "2"]
        outputs = []
        for _ in range(2):
            code, out = _run(capsys, argv)
            assert code == 0
            outputs.append(re.sub(r'"timestamp":\s*"[^"]*"', "", out))
        assert outputs[0] == outputs[1]


class TestSeveralM:
    def test_sample_norm(self, capsys, graph_file):
        path = graph_file(["a", "b", "c"], [("a", "b"), ("b", "c")])
        code, report = _report(capsys, ["sample-norm", "--graph", path, "--m", "1,2", "--K", "all=2", "--trials", "2"])
        assert code == 0
        assert [(row["m"], row["seed"]) for row in report["results"]] == [
            (1, 20240101), (1, 20240102), (2, 20240101), (2, 20240102)
        ]
        commute = [c["name"] for c in report["checks"] if c["name"].startswith("commute")]
        assert any("m=1" in name for name in commute)
        assert any("m=2" in name for name in commute)

    def test_unitary_rep(self, capsys, graph_file):
        path = graph_file(["a", "b", "c"], [("a", "b"), ("b", "c")])
        code, report = _report(capsys, ["unitary-rep", "--graph", path, "--m", "1,2", "--K", "all=2", "--pairs", "2"])
        assert code == 0
        assert [row["dim"] for row in report["results"]] == [8, 16]
        names = {c["name"] for c in report["checks"]}
        assert "homomorphism m=1 seed=20240101 pair=0" in names
        assert "homomorphism m=2 seed=20240101 pair=1" in names

    def test_converge(self, capsys, graph_file):
        path = graph_file(["a", "b"], [("a", "b")])
        code, report = _report(capsys, ["converge", "--graph", path, "--z", "[a] + [a'] + [b] + [b']",
                                        "--schedule", "K=4;8", "--m", "1,2", "--radius", "4", "--moment-k", "3"])
        assert code == 0
        schedule = report["results"][0]["schedule"]
        assert [row["m"] for row in schedule] == [1, 1, 2, 2]


class TestExitCodes:
    def test_missing_graph_file(self, capsys, tmp_path):
        code, out = _run(capsys, ["moments", "--graph", str(tmp_path / "nope.json")])
        assert code == 1
        assert json.loads(out)["success"] is False

    def test_bad_expression(self, capsys, graph_file):
        path = graph_file(["a", "b"])
        code, _ = _run(capsys, ["reg-norm", "--graph", path, "--z", "[a"])
        assert code == 1

    def test_unknown_vertex(self, capsys, graph_file):
        path = graph_file(["a", "b"])
        code, _ = _run(capsys, ["fock-norm", "--graph", path, "--poly", "X_z"])
        assert code == 1

    def test_guard(self, capsys, graph_file):
        path = graph_file(["a", "b", "c"])
        code, _ = _run(capsys, ["sample-norm", "--graph", path, "--m", "4", "--K", "all=8", "--guard-dim", "100"])
        assert code == 2

    def test_failed_self_check(self, capsys):
        code, report = _report(capsys, ["spectral", "--u", "0.25", "--T", "3"])
        assert code == 3
        assert not all(c["pass"] for c in report["checks"])

    def test_complete_graph_has_no_key_pair(self, capsys, graph_file):
        path = graph_file(["a", "b"], [("a", "b")])
        code, _ = _run(capsys, ["limit-check", "--graph", path])
        assert code == 1


class TestCache:
    def test_second_run_is_served_from_cache(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setattr(database, "CACHE_PATH", tmp_path / "results.db")
        argv = ["spectral", "--u", "1.5", "--cache"]
        first_code, first = _report(capsys, argv)
        second_code = main(argv)
        captured = capsys.readouterr()
        second = json.loads(captured.out)
        assert first_code == second_code == 0
        assert "cached" in captured.err
        assert second["results"] == first["results"]
        assert second["checks"] == first["checks"]


class TestSchedule:
    def test_parse(self):
        g = complete_graph(["a", "b"])
        points = parse_schedule("K=8;16", 2, g)
        assert [p.K for p in points] == [{"a": 8, "b": 8}, {"a": 16, "b": 16}]
        assert all(p.m == 2 for p in points)

    @pytest.mark.parametrize("text", ["8;16", "K=8;x"])
    def test_errors(self, text):
        with pytest.raises(ExpressionSyntaxError):
            parse_schedule(text, 1, complete_graph(["a", "b"]))
