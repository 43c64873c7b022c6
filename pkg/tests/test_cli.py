import json

import numpy as np
import pytest

from pbcstab import cli
from pbcstab.catalog import ex2_system, ex5_control, ex5_system
from pbcstab.model import constant_control, dump_document


def write_doc(tmp_path, sys_, u=None, name="case.json"):
    path = tmp_path / name
    path.write_text(json.dumps(dump_document(sys_, u)))
    return str(path)


@pytest.fixture
def ex5_doc(tmp_path):
    return write_doc(tmp_path, ex5_system(), ex5_control())


@pytest.fixture
def ex2_doc(tmp_path):
    sys_ = ex2_system()
    return write_doc(tmp_path, sys_, constant_control(0.0, sys_.T))


class TestValidate:
    def test_valid_system(self, ex5_doc, capsys):
        assert cli.main(["validate", ex5_doc]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["valid"] is True

    def test_invalid_system(self, tmp_path, capsys):
        from pbcstab.model import PBCSystem
        doc = write_doc(tmp_path,
                        PBCSystem([[0, 1], [-1, 0]], np.zeros((2, 2)), 1.0))
        assert cli.main(["validate", doc]) == 2
        out = json.loads(capsys.readouterr().out)
        assert out["valid"] is False
        assert out["messages"]

    def test_missing_file(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["validate", str(tmp_path / "nope.json")])
        assert exc.value.code == 1

    def test_garbage_file(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(SystemExit) as exc:
            cli.main(["validate", str(path)])
        assert exc.value.code == 1


class TestAnalyze:
    def test_ex5_bundle(self, ex5_doc, capsys):
        assert cli.main(["analyze", ex5_doc]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["first_order"]["verdict"] == "consistent"
        assert out["high_order"]["verdict"] == "rules_out"
        assert out["perron"]["rho"] == pytest.approx(0.5238042, rel=1e-6)

    def test_ex2_singular_bundle(self, ex2_doc, capsys):
        assert cli.main(["analyze", ex2_doc]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["first_order"]["verdict"] == "vacuous"
        assert out["high_order"]["verdict"] == "rules_out"
        assert out["high_order"]["value"] == pytest.approx(20.0, abs=1e-9)

    def test_missing_control(self, tmp_path, capsys):
        doc = write_doc(tmp_path, ex5_system())
        assert cli.main(["analyze", doc]) == 1

    def test_invalid_system(self, tmp_path, capsys):
        from pbcstab.model import PBCSystem
        doc = write_doc(tmp_path,
                        PBCSystem([[0, 1], [-1, 0]], np.zeros((2, 2)), 1.0),
                        constant_control(0.0, 1.0))
        assert cli.main(["analyze", doc]) == 2

    def test_not_simple(self, tmp_path, capsys):
        from pbcstab.model import PBCSystem
        doc = write_doc(tmp_path, PBCSystem(np.zeros((2, 2)),
                                            np.zeros((2, 2)), 1.0),
                        constant_control(0.0, 1.0))
        assert cli.main(["analyze", doc]) == 3

    def test_csv_and_figure(self, ex5_doc, tmp_path, capsys):
        csv = tmp_path / "m.csv"
        assert cli.main(["analyze", ex5_doc, "--csv", str(csv)]) == 0
        out = json.loads(capsys.readouterr().out)
        assert csv.exists()
        assert csv.read_text().startswith("time,m\n")
        png = tmp_path / "m.png"
        assert png.exists()
        assert png.stat().st_size > 0
        assert out["csv"] == str(csv)
        assert out["figure"] == str(png)

    def test_rerun_identical(self, ex5_doc, capsys):
        cli.main(["analyze", ex5_doc])
        first = capsys.readouterr().out
        cli.main(["analyze", ex5_doc])
        second = capsys.readouterr().out
        assert first == second


class TestSearch:
    def test_grid_search(self, ex5_doc, capsys):
        assert cli.main(["search", ex5_doc, "--arcs", "4",
                         "--grid", "9"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["best_rho"] >= 1.0 - 1e-9
        assert out["evaluations"] > 0

    def test_refine_flag(self, ex5_doc, capsys):
        assert cli.main(["search", ex5_doc, "--arcs", "2", "--grid", "5",
                         "--refine"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert all(b >= a for a, b in zip(out["trace"], out["trace"][1:]))

    def test_horizons_with_csv(self, tmp_path, capsys):
        sys_ = ex2_system()
        doc = write_doc(tmp_path, sys_)
        csv = tmp_path / "curve.csv"
        assert cli.main(["search", doc, "--arcs", "1", "--grid", "2",
                         "--horizons", "0.5,1.0", "--csv", str(csv)]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["status"] == "not_GAS_certified"
        assert out["witness_rho"] > 1.0
        lines = csv.read_text().splitlines()
        assert lines[0] == "t,rho_root"
        assert len(lines) == 3
        assert (tmp_path / "curve.png").exists()

    def test_budget_env(self, ex5_doc, capsys, monkeypatch):
        monkeypatch.setenv(cli.BUDGET_ENV, "10")
        assert cli.main(["search", ex5_doc, "--arcs", "4",
                         "--grid", "9"]) == 4

    def test_invalid_system(self, tmp_path, capsys):
        from pbcstab.model import PBCSystem
        doc = write_doc(tmp_path,
                        PBCSystem([[0, 1], [-1, 0]], np.zeros((2, 2)), 1.0))
        assert cli.main(["search", doc]) == 2


class TestReproduce:
    @pytest.mark.parametrize("case", ["ex2", "ex4", "ex5"])
    def test_benchmarks_pass(self, case, capsys):
        assert cli.main(["reproduce", case]) == 0
        out = capsys.readouterr().out
        assert "all checks passed" in out
        assert "FAIL" not in out
