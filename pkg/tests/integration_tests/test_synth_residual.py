import json
from pathlib import Path

import pytest
from expcorr.ingest import ingest_csv
from expcorr.synthgen import generate_landscape, neutralization_landscape
from expcorr.table import SampleRow, SampleTable

from tests.utils.cli import run, write_table

SNAPSHOT = Path(__file__).parents[1] / "data" / "synth_snapshot.json"


class TestSynth:
    def test_bundled_landscape(self, tmp_path):
        out = tmp_path / "synth.csv"
        result, report = run(["synth", "--out", str(out)], tmp_path / "r.json")

        assert result.exit_code == 0, result.output
        assert report is not None
        assert report["results"]["rows"] == 120
        assert report["results"]["seed"] == 42
        assert report["results"]["processes"] == {"low": 60, "high": 60}
        assert ingest_csv(out) == generate_landscape(neutralization_landscape())
        snapshot = json.loads(SNAPSHOT.read_text(encoding="utf-8"))
        assert report["results"]["output"] == "sha256:" + snapshot["csv_sha256"]

    def test_byte_identical_reruns(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        run(["synth", "--out", str(first), "--seed", "7"], tmp_path / "r1.json")
        _, report = run(["synth", "--out", str(second), "--seed", "7"], tmp_path / "r2.json")

        assert first.read_bytes() == second.read_bytes()
        assert report is not None
        assert report["results"]["seed"] == 7

    def test_config(self, tmp_path):
        config = tmp_path / "landscape.json"
        spec = neutralization_landscape().to_dict()
        spec["processes"][0]["sample_count"] = 5
        config.write_text(json.dumps(spec), encoding="utf-8")
        out = tmp_path / "synth.csv"

        result, report = run(["synth", "-c", str(config), "--out", str(out)], tmp_path / "r.json")

        assert result.exit_code == 0, result.output
        assert report is not None
        assert report["results"]["rows"] == 65
        assert str(config) in report["inputs"]

    @pytest.mark.parametrize("content", ["{", '{"seed": 1}'])
    def test_invalid_config(self, tmp_path, content):
        config = tmp_path / "landscape.json"
        config.write_text(content, encoding="utf-8")
        args = ["synth", "-c", str(config), "--out", str(tmp_path / "o.csv")]
        result, _ = run(args, tmp_path / "r.json")

        assert result.exit_code == 3
        assert "ERROR" in result.output

    def test_unwritable_output(self, tmp_path):
        out = tmp_path / "missing" / "synth.csv"
        result, report = run(["synth", "--out", str(out)], tmp_path / "r.json")

        assert result.exit_code == 3
        assert report is None
        assert "ERROR [cli.io]" in result.output


@pytest.fixture
def three_rows_csv(tmp_path):
    rows = [
        SampleRow("1", 0.0, 0.0, {"A": 1.0, "B": 10.0}),
        SampleRow("2", 0.0, 0.0, {"A": 1.1, "B": 20.0}),
        SampleRow("3", 0.0, 0.0, {"A": 2.0, "B": 10.0}),
    ]
    return write_table(SampleTable(rows, variables=["A", "B"]), tmp_path / "three.csv")


class TestResidual:
    def test_explicit_edges(self, tmp_path, three_rows_csv):
        args = ["residual", "-i", str(three_rows_csv), "--vars", "A,B"]
        result, report = run(
            args + ["--edges-a", "0.5,1.5,2.5", "--edges-b", "5,15,25"], tmp_path / "r.json"
        )

        assert result.exit_code == 0, result.output
        assert report is not None
        per_point = report["results"]["per_point"]
        assert per_point["1"] == pytest.approx(0.0888888888889, abs=1e-12)
        assert per_point["3"] == 0.0
        assert report["results"]["total"] == pytest.approx(2 * 0.0888888888889, abs=1e-12)

    def test_default_bins_and_fit(self, tmp_path):
        table = generate_landscape(neutralization_landscape())
        path = write_table(table, tmp_path / "synth.csv")
        args = ["residual", "-i", str(path), "--vars", "c,n", "--fit-degree", "1"]
        result, report = run(args, tmp_path / "r.json")

        assert result.exit_code == 0, result.output
        assert report is not None
        assert report["results"]["n"] == 120
        assert report["results"]["weighting"] == "collapsed"
        assert report["results"]["fit"]["degree"] == 1

    @pytest.mark.parametrize(
        "extra, exit_code",
        [
            (["--edges-a", "0,1"], 3),
            (["--bins-a", "2", "--edges-a", "0,5"], 3),
            (["--edges-b", "5,x"], 3),
            (["--fit-degree", "2", "--bins-b", "1"], 4),
        ],
    )
    def test_errors(self, tmp_path, three_rows_csv, extra, exit_code):
        args = ["residual", "-i", str(three_rows_csv), "--vars", "A,B", *extra]
        result, _ = run(args, tmp_path / "r.json")

        assert result.exit_code == exit_code
        assert "ERROR" in result.output
