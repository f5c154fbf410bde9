import json
import xml.etree.ElementTree as ET

import pytest

from polya_cert.cli import main


@pytest.fixture
def square_file(tmp_path):
    path = tmp_path / "square.json"
    path.write_text(json.dumps({"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]}))
    return str(path)


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


class TestBoundsCommand:
    def test_prints_paper_digits(self, capsys, tmp_path):
        code = main(["bounds", "--out", str(tmp_path)])
        out = capsys.readouterr().out
        assert code == 0
        assert "0.0398" in out
        assert "0.0499" in out
        assert "0.0796" in out

    def test_csv_written(self, tmp_path):
        main(["bounds", "--out", str(tmp_path), "--format", "csv", "--format", "json"])
        csv_text = read(tmp_path / "bounds.csv").decode()
        assert csv_text.splitlines()[0] == "bound,coefficient,coefficient_full,formula"
        data = json.loads(read(tmp_path / "bounds.json"))
        assert [row["bound"] for row in data] == ["kroger", "convex", "polya"]


class TestVerifyCommand:
    def test_single_lambda(self, square_file, tmp_path, capsys):
        out = tmp_path / "out"
        code = main([
            "verify", "--domain", square_file, "--lambda", "100",
            "--out", str(out), "--format", "csv", "--format", "json", "--format", "svg",
        ])
        assert code == 0
        lines = read(out / "verify.csv").decode().splitlines()
        assert lines[0] == (
            "lambda,area,n_N,bound_polya,bound_kroger,bound_convex,"
            "packing_l,certificate,pass"
        )
        row = lines[1].split(",")
        assert row[0] == "100"
        assert int(row[2]) == 13
        assert row[5].startswith("4.99")
        assert row[8] == "true"
        # report JSON mirrors the CSV
        data = json.loads(read(out / "verify.json"))
        assert data[0]["n_N"] == 13 and data[0]["pass"] is True
        # SVG plot is well-formed XML
        tree = ET.parse(out / "verify.svg")
        assert tree.getroot().tag.endswith("svg")

    def test_missing_domain_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            main(["verify", "--domain", str(tmp_path / "nope.json")])
        assert err.value.code == 2

    def test_invalid_domain_exits_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"vertices": [[0, 0], [1, 0]]}))
        with pytest.raises(SystemExit) as err:
            main(["verify", "--domain", str(bad)])
        assert err.value.code == 2

    def test_bad_lambda_exits_2(self, square_file):
        with pytest.raises(SystemExit) as err:
            main(["verify", "--domain", square_file, "--lambda", "1:2"])
        assert err.value.code == 2

    def test_lambda_sweep(self, square_file, tmp_path):
        out = tmp_path / "out"
        code = main([
            "verify", "--domain", square_file, "--lambda", "20:80:3", "--out", str(out),
        ])
        assert code == 0
        lines = read(out / "verify.csv").decode().splitlines()
        assert len(lines) == 4

    def test_deterministic_output(self, square_file, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            main([
                "verify", "--domain", square_file, "--lambda", "50",
                "--out", str(out), "--format", "csv", "--format", "json",
            ])
        assert read(out1 / "verify.csv") == read(out2 / "verify.csv")
        assert read(out1 / "verify.json") == read(out2 / "verify.json")

    def test_plot_failure_does_not_change_exit_code(self, square_file, tmp_path, monkeypatch, capsys):
        from polya_cert import plots

        def boom(*args, **kwargs):
            raise RuntimeError("no backend")

        monkeypatch.setattr(plots, "plot_counting_bounds", boom)
        code = main([
            "verify", "--domain", square_file, "--lambda", "50",
            "--out", str(tmp_path / "out"), "--format", "svg", "--format", "csv",
        ])
        assert code == 0
        assert "plot emission failed" in capsys.readouterr().err

    def test_failed_bound_exits_1_and_names_row(self, square_file, tmp_path, monkeypatch, capsys):
        # force a failing report through the pipeline to exercise the contract
        import polya_cert.cli as cli_mod
        from polya_cert.bounds import BoundReport

        def fake_verify(polygon, lam, **kwargs):
            return BoundReport(
                lam=float(lam), area=1.0, n_N=1, polya=8.0, kroger=4.0,
                convex=5.0, packing_l=5, certificate=float(lam), passed=False,
            )

        monkeypatch.setattr(cli_mod.bounds_mod, "verify_counting_bound", fake_verify)
        code = main([
            "verify", "--domain", square_file, "--lambda", "100",
            "--out", str(tmp_path / "out"),
        ])
        assert code == 1
        err = capsys.readouterr().err
        assert "lambda=100" in err and "FAIL" in err

    def test_shift_search_failure_exits_1(self, square_file, tmp_path, monkeypatch, capsys):
        import polya_cert.cli as cli_mod
        from polya_cert.lattice import ShiftSearchError

        def fake_packing(polygon, r, **kwargs):
            raise ShiftSearchError("no shift reached the guaranteed count")

        monkeypatch.setattr(cli_mod, "packing_points", fake_packing)
        code = main([
            "shift-search", "--domain", square_file, "--r", "0.1",
            "--out", str(tmp_path / "out"),
        ])
        assert code == 1
        assert "FAIL" in capsys.readouterr().err


class TestSpectrumCommand:
    def test_csv_and_mesh(self, square_file, tmp_path):
        out = tmp_path / "out"
        code = main([
            "spectrum", "--domain", square_file, "--h", "0.1", "--m", "6",
            "--out", str(out), "--format", "csv", "--format", "svg", "--export-mesh",
        ])
        assert code == 0
        lines = read(out / "spectrum.csv").decode().splitlines()
        assert lines[0] == "k,mu_k"
        assert len(lines) == 7
        k, mu = lines[1].split(",")
        assert k == "1" and abs(float(mu)) < 1e-8
        off = read(out / "mesh.off").decode().splitlines()
        assert off[0] == "OFF"
        ET.parse(out / "spectrum.svg")


class TestShiftSearchCommand:
    def test_json_schema(self, square_file, tmp_path):
        out = tmp_path / "out"
        code = main([
            "shift-search", "--domain", square_file, "--r", "0.1",
            "--out", str(out), "--format", "json", "--format", "svg",
        ])
        assert code == 0
        data = json.loads(read(out / "shift_search.json"))
        assert set(data) == {"r", "b", "count", "guaranteed_min", "points"}
        assert data["count"] >= 29
        assert len(data["points"]) == data["count"]
        ET.parse(out / "shift_search.svg")


class TestTableCommands:
    def test_dim_table(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["dim-table", "--out", str(out), "--format", "csv"])
        assert code == 0
        lines = read(out / "dim_table.csv").decode().splitlines()
        assert lines[0] == "d,kroger_coeff,levenshtein_density,remark_rhs,strict"
        assert len(lines) == 23  # header + d in [3, 24]
        assert all(line.endswith("true") for line in lines[1:])

    def test_dim_table_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        main(["dim-table", "--out", str(a), "--format", "csv"])
        main(["dim-table", "--out", str(b), "--format", "csv"])
        assert read(a / "dim_table.csv") == read(b / "dim_table.csv")

    def test_lemma_check(self, tmp_path):
        out = tmp_path / "out"
        code = main(["lemma-check", "--out", str(out), "--format", "csv"])
        assert code == 0
        lines = read(out / "lemma_check.csv").decode().splitlines()
        assert lines[0] == "nu,s,lhs,rhs,gap_ok,identity_residual"
        assert len(lines) == 41  # 4 orders x 10 steps
