"""Command line behaviour: exit codes, overrides, output files."""

import json

import pytest

from obameter.cli import main


@pytest.fixture(scope="module")
def cli_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli-corpus")
    code = main([
        "simulate", "--out", str(root),
        "--personas", "2", "--repetitions", "1",
        "--budget", "25", "--seed", "9",
    ])
    assert code == 0
    return root


class TestSimulate:
    def test_writes_corpus_and_prints_summary(self, cli_corpus, capsys):
        out = capsys.readouterr().out
        assert (cli_corpus / "world.json").exists()
        code = main([
            "simulate", "--out", str(cli_corpus),
            "--personas", "2", "--repetitions", "1",
            "--budget", "25", "--seed", "9",
        ])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["sessions"] == 2 * 1 * 1 + 1
        assert summary["personas"] == 2

    def test_bad_manifest_is_a_config_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"buget": 1}), encoding="utf-8")
        code = main(["simulate", "--out", str(tmp_path / "x"),
                     "--manifest", str(bad)])
        assert code == 2
        assert "configuration error" in capsys.readouterr().err


class TestAnalyze:
    def test_default_run(self, cli_corpus, capsys):
        assert main(["analyze", str(cli_corpus)]) == 0
        out = capsys.readouterr().out
        assert "scored" in out
        report = json.loads((cli_corpus / "report.json").read_text(encoding="utf-8"))
        assert report["filters"]["enabled"] == "rscdg"

    def test_filter_set_override(self, cli_corpus):
        assert main(["analyze", str(cli_corpus), "--filters", "r",
                     "--tprime", "2.0"]) == 0
        report = json.loads((cli_corpus / "report.json").read_text(encoding="utf-8"))
        assert report["filters"] == {"enabled": "r", "t_prime": 2.0}
        assert {c["filters"] for c in report["cells"]} == {"r"}

    def test_unknown_filter_set_rejected_by_parser(self, cli_corpus):
        with pytest.raises(SystemExit):
            main(["analyze", str(cli_corpus), "--filters", "xyz"])

    def test_missing_corpus_is_a_data_error(self, tmp_path, capsys):
        (tmp_path / "empty").mkdir()
        assert main(["analyze", str(tmp_path / "empty")]) == 3
        assert "corpus error" in capsys.readouterr().err


class TestFilter:
    def test_prints_attrition_rows(self, cli_corpus, capsys):
        assert main(["filter", str(cli_corpus), "--filters", "rsc"]) == 0
        rows = json.loads(capsys.readouterr().out)
        assert len(rows) == 2
        for row in rows:
            assert set(row["attrition"]) == {
                "input", "after_retargeting", "after_static_contextual",
            }


class TestValidate:
    def test_zero_noise_sweep(self, cli_corpus, capsys):
        assert main(["validate", str(cli_corpus),
                     "--spurious-levels", "0.0", "--dropout", "0.0"]) == 0
        out = capsys.readouterr().out
        assert "clean profile pure: yes" in out
        assert "recall 1.0000" in out
        assert (cli_corpus / "performance.json").exists()

    def test_missing_world_state_is_a_data_error(self, cli_corpus, tmp_path, capsys):
        clone = tmp_path / "no-world"
        clone.mkdir()
        for p in cli_corpus.iterdir():
            if p.name != "world.json":
                (clone / p.name).write_bytes(p.read_bytes())
        assert main(["validate", str(clone), "--spurious-levels", "0.0"]) == 3
        assert "corpus error" in capsys.readouterr().err


class TestReport:
    def test_digest_after_analyze_and_validate(self, cli_corpus, capsys):
        assert main(["analyze", str(cli_corpus)]) == 0
        assert main(["validate", str(cli_corpus),
                     "--spurious-levels", "0.0", "--dropout", "0.0"]) == 0
        capsys.readouterr()
        assert main(["report", str(cli_corpus)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("experiment ")
        assert "validation (dropout 0.0)" in out
        assert "clean profile pure: yes" in out

    def test_report_without_analysis_is_a_data_error(self, tmp_path, capsys):
        (tmp_path / "fresh").mkdir()
        assert main(["report", str(tmp_path / "fresh")]) == 3
        assert "corpus error" in capsys.readouterr().err
