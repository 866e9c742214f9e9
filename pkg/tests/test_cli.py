import json

import pytest

from sherdcube.cli import main
from sherdcube.etl import write_bundle


@pytest.fixture(scope="module")
def workspace(tmp_path_factory, acceptance_bundle):
    """Generated source bundle plus an ingested star directory."""
    root = tmp_path_factory.mktemp("cli")
    source = root / "source"
    star = root / "star"
    files, echo = acceptance_bundle
    write_bundle(source, files)
    assert main(["ingest", str(source), "--out", str(star)]) == 0
    return {"root": root, "source": source, "star": star, "echo": echo}


class TestGenerate:
    def test_generate_writes_bundle_and_manifest(self, tmp_path, capsys):
        out = tmp_path / "gen"
        assert main(["generate", "--seed", "42", "--out", str(out)]) == 0
        assert (out / "samples.csv").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["seed"] == 42
        assert "wrote" in capsys.readouterr().out

    def test_generate_deterministic_across_runs(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        assert main(["generate", "--seed", "9", "--out", str(a)]) == 0
        assert main(["generate", "--seed", "9", "--out", str(b)]) == 0
        for name in ("samples.csv", "analyses.csv", "manifest.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_custom_manifest_file(self, tmp_path):
        from sherdcube.generator import default_manifest

        manifest = default_manifest(seed=5)
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps(manifest.to_dict()))
        out = tmp_path / "gen"
        assert main(["generate", "--manifest", str(path), "--out", str(out)]) == 0
        assert json.loads((out / "manifest.json").read_text())["seed"] == 5


class TestIngest:
    def test_ingest_reports_fact_count(self, workspace, capsys, tmp_path):
        out = tmp_path / "star2"
        assert main(["ingest", str(workspace["source"]), "--out", str(out)]) == 0
        message = capsys.readouterr().out
        assert f"ingested {workspace['echo']['derived']['analysis_count']} facts" in message

    def test_ingest_invalid_bundle_exits_1(self, tmp_path, capsys):
        bad = tmp_path / "bad"
        write_bundle(bad, {
            "samples.csv": b"sample_id,description_id,provenance_id,dating_id,group_id,media_ids\n"
                           b"s1,,L-missing,,,\n",
            "locations.csv": b"location_id,site,town,region,country,lat,lon\nL1,,,,Greece,,\n",
            "analyses.csv": b"analysis_id,sample_id,technique,component,value,unit,run_tag\n",
        })
        assert main(["ingest", str(bad), "--out", str(tmp_path / "out")]) == 1
        assert "ref_integrity" in capsys.readouterr().err

    def test_missing_directory_is_usage_error(self, tmp_path, capsys):
        code = main(["ingest", str(tmp_path / "nowhere"), "--out", str(tmp_path / "o")])
        assert code == 1 or code == 2  # empty dir -> missing files -> data error


class TestQuery:
    def test_count_facts_equals_analyses_rows(self, workspace, capsys):
        assert main(["query", str(workspace["star"]), "--cql", "MEASURE count(facts);"]) == 0
        out = capsys.readouterr().out
        expected = workspace["echo"]["derived"]["analysis_count"]
        # oracle: data line count of the exported analyses table
        rows = (workspace["star"] / "analyses.csv").read_text().count("\n") - 1
        assert rows == expected
        assert str(expected) in out

    def test_syntax_error_exit_2_with_caret(self, workspace, capsys):
        code = main(["query", str(workspace["star"]), "--cql", "MEASURE count(samples'"])
        assert code == 2
        err = capsys.readouterr().err
        assert "^" in err
        assert "syntax error" in err

    def test_semantic_error_exit_1(self, workspace, capsys):
        code = main(["query", str(workspace["star"]), "--cql",
                     "MEASURE count(samples) GROUP BY weather;"])
        assert code == 1
        assert "semantic error" in capsys.readouterr().err

    def test_cql_from_file(self, workspace, tmp_path, capsys):
        script = tmp_path / "query.cql"
        script.write_text("MEASURE count(samples) GROUP BY provenance AT country;")
        assert main(["query", str(workspace["star"]), "--cql", str(script)]) == 0
        out = capsys.readouterr().out
        assert "provenance.country" in out
        assert "TOTAL" in out

    def test_json_output_is_byte_identical_across_runs(self, workspace, capsys):
        args = ["query", str(workspace["star"]), "--cql",
                "MEASURE avg OF CHEMISTRY.Al IN wt_percent GROUP BY provenance AT country;",
                "--format", "json"]
        assert main(args) == 0
        first = capsys.readouterr().out
        assert main(args) == 0
        second = capsys.readouterr().out
        assert first == second
        payload = json.loads(first)
        assert all(isinstance(r[-1], str) for r in payload["rows"])

    def test_csv_output(self, workspace, capsys):
        assert main(["query", str(workspace["star"]), "--cql",
                     "MEASURE count(samples) GROUP BY groups;", "--format", "csv"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "groups.group,count(samples)"

    def test_unknown_member_label_renders_brackets(self, workspace, capsys):
        assert main(["query", str(workspace["star"]), "--cql",
                     "MEASURE count(facts) GROUP BY provenance AT country;"]) == 0
        out = capsys.readouterr().out
        assert "⟨unknown country⟩" in out


class TestScenario:
    def test_zeuxippus_scenario_totals(self, workspace, capsys):
        assert main(["scenario", "zeuxippus", str(workspace["star"])]) == 0
        out = capsys.readouterr().out
        assert "163" in out
        assert "87" in out
        assert out.count("TOTAL") == 2
        assert "Typological classification" in out
        assert "Chemical classification" in out

    def test_unknown_scenario(self, workspace, capsys):
        assert main(["scenario", "nope", str(workspace["star"])]) == 2


class TestChart:
    def test_compare_payload_matches_service_shape(self, workspace, tmp_path):
        from sherdcube.cube import build_cube
        from sherdcube.etl import load_star
        from sherdcube.payloads import chart_compare_json
        from test_generator import STRICTO_QUERY, TYPOLOGY_QUERY

        out = tmp_path / "chart.json"
        assert main([
            "chart", "compare", str(workspace["star"]),
            "--left", TYPOLOGY_QUERY, "--right", STRICTO_QUERY,
            "--axis", "provenance.country", "--out", str(out),
        ]) == 0
        payload = json.loads(out.read_text())

        cube = build_cube(load_star(workspace["star"]))
        direct = chart_compare_json(cube, TYPOLOGY_QUERY, STRICTO_QUERY, "provenance.country")
        assert payload == direct
        assert payload["left"]["total"] == "163"
        assert payload["right"]["total"] == "87"

    def test_axis_mismatch_exit_1(self, workspace, capsys, tmp_path):
        from test_generator import STRICTO_QUERY, TYPOLOGY_QUERY

        code = main([
            "chart", "compare", str(workspace["star"]),
            "--left", TYPOLOGY_QUERY, "--right", STRICTO_QUERY,
            "--axis", "provenance.region", "--out", str(tmp_path / "x.json"),
        ])
        assert code == 1
        assert "expected provenance.region" in capsys.readouterr().err
