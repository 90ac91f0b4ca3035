import json
import re

import pytest
from expcorr.functional import functional_correlation
from expcorr.surface import FittedField
from expcorr.table import SampleRow, SampleTable

from tests.utils.cli import run, write_table
from tests.utils.planar import planar_fields, planar_table


@pytest.fixture
def planar_csv(tmp_path):
    return write_table(planar_table(), tmp_path / "planar.csv")


class TestFit:
    def test_fit_and_save(self, tmp_path, planar_csv):
        saved = tmp_path / "fields.json"
        result, report = run(
            ["fit", "-i", str(planar_csv), "--vars", "c,p", "-d", "1", "--save-field", str(saved)],
            tmp_path / "r.json",
        )

        assert result.exit_code == 0, result.output
        assert report is not None
        assert set(report["results"]) == {"c", "p"}
        assert report["results"]["c"]["rss"] <= 1e-16
        assert report["results"]["p"]["method"] == "ols"

        fields = {k: FittedField.from_dict(v) for k, v in json.loads(saved.read_text()).items()}
        assert fields["p"].poly.coefficient((1, 0)) == pytest.approx(2.0)

    def test_unwritable_field_file(self, tmp_path, planar_csv):
        saved = tmp_path / "missing" / "fields.json"
        result, report = run(
            ["fit", "-i", str(planar_csv), "--vars", "c", "-d", "1", "--save-field", str(saved)],
            tmp_path / "r.json",
        )

        assert result.exit_code == 3
        assert report is None
        assert "ERROR [cli.io]" in result.output

    def test_correspondence_objective(self, tmp_path, planar_csv):
        result, report = run(
            ["fit", "-i", str(planar_csv), "--vars", "c", "--objective", "correspondence"],
            tmp_path / "r.json",
        )

        assert result.exit_code == 0, result.output
        assert report is not None
        assert report["results"]["c"]["method"] == "correspondence"

    def test_underdetermined(self, tmp_path):
        path = write_table(planar_table(count=3), tmp_path / "small.csv")
        result, _ = run(["fit", "-i", str(path), "--vars", "c", "-d", "3"], tmp_path / "r.json")

        assert result.exit_code == 4
        assert "surface-fit.fit_surface[c]" in result.output

    def test_degree_out_of_range(self, tmp_path, planar_csv):
        args = ["fit", "-i", str(planar_csv), "--vars", "c", "-d", "5"]
        result, _ = run(args, tmp_path / "r.json")

        assert result.exit_code == 2


class TestFcorr:
    @pytest.mark.parametrize("integration", ["exact-monomial", "quadrature"])
    def test_matches_library(self, tmp_path, planar_csv, integration):
        result, report = run(
            ["fcorr", "-i", str(planar_csv), "--vars", "c,p", "-d", "1"]
            + ["--integration", integration],
            tmp_path / "r.json",
        )

        assert result.exit_code == 0, result.output
        assert report is not None
        fields = planar_fields()
        expected = functional_correlation(fields["c"], fields["p"]).r12
        assert report["results"]["r12"] == pytest.approx(expected, abs=1e-9)
        assert report["results"]["method"] == integration
        assert report["results"]["n"] == 25

    def test_negative_fields_warn(self, tmp_path, planar_csv):
        result, report = run(
            ["fcorr", "-i", str(planar_csv), "--vars", "c,n", "-d", "1"], tmp_path / "r.json"
        )

        assert result.exit_code == 0, result.output
        assert report is not None
        assert report["results"]["negative_fields"] == ["n"]
        assert report["warnings"]
        assert "WARNING" in result.output

    def test_degenerate_field(self, tmp_path):
        rows = [
            SampleRow(f"{i}{j}", float(i), float(j), {"a": 1.0 + i, "z": 0.0})
            for i in range(3)
            for j in range(3)
        ]
        path = write_table(SampleTable(rows, variables=["a", "z"]), tmp_path / "z.csv")
        result, _ = run(["fcorr", "-i", str(path), "--vars", "a,z", "-d", "1"], tmp_path / "r.json")

        assert result.exit_code == 4
        assert "functional-corr" in result.output


class TestCouple:
    def test_planar(self, tmp_path, planar_csv):
        result, report = run(["couple", "-i", str(planar_csv)], tmp_path / "r.json")

        assert result.exit_code == 0, result.output
        assert report is not None
        results = report["results"]
        assert sorted(re.findall(r"[a-z]", results["components"][0])) == ["c", "n", "p"]
        assert results["verification"]["max_abs"] <= 1e-8
        assert len(results["provenance"]) == 6
        assert results["degree"] == 1

    def test_duplicate_names(self, tmp_path, planar_csv):
        result, _ = run(
            ["couple", "-i", str(planar_csv), "--vars", "c,n,p,p"], tmp_path / "r.json"
        )

        assert result.exit_code == 3
        assert "cli.flags" in result.output
