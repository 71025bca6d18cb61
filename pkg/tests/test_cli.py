import filecmp
import json

from soundtrace.cli import main


def run(args):
    return main([str(a) for a in args])


def generate_small(tmp_path, out="corpus", seed=5):
    out = tmp_path / out
    assert run(["generate", "--kind", "parupa", "--bins", "3", "--words", "200",
                "--seed", seed, "--out", out]) == 0
    return out


class TestGenerate:
    def test_writes_target_and_control(self, tmp_path, capsys):
        out = generate_small(tmp_path)
        assert (out / "target" / "manifest.tsv").exists()
        assert (out / "control" / "manifest.tsv").exists()
        assert (out / "generate_config.json").exists()
        assert "3 target" in capsys.readouterr().out

    def test_byte_identical_across_runs(self, tmp_path):
        a = generate_small(tmp_path, "a")
        b = generate_small(tmp_path, "b")
        for sub in ("target", "control"):
            for f in sorted((a / sub).iterdir()):
                assert filecmp.cmp(f, b / sub / f.name, shallow=False), f.name

    def test_lexicon_kind(self, tmp_path):
        out = tmp_path / "lex"
        assert run(["generate", "--kind", "lexicon", "--bins", "2", "--words", "100",
                    "--seed", "1", "--out", out]) == 0
        tokens = (out / "target" / "bin_01.txt").read_text(encoding="utf-8").split()
        assert len(tokens) == 100


class TestSimulate:
    def test_applies_rule(self, tmp_path, capsys):
        corpus = generate_small(tmp_path)
        rules = tmp_path / "rules.txt"
        rules.write_text("p > b / _ {i,u}\n", encoding="utf-8")
        out = tmp_path / "sim"
        assert run(["simulate", "--corpus", corpus / "target", "--rules", rules,
                    "--schedule", "0,0.5,1", "--seed", "2", "--out", out]) == 0
        assert (out / "target" / "manifest.tsv").exists()
        assert (out / "control" / "manifest.tsv").exists()
        # bin 1 untouched, bin 3 fully rewritten
        b1 = (out / "target" / "bin_01.txt").read_text(encoding="utf-8")
        assert b1 == (corpus / "target" / "bin_01.txt").read_text(encoding="utf-8")
        b3 = (out / "target" / "bin_03.txt").read_text(encoding="utf-8")
        assert "pi" not in b3 and "pu" not in b3

    def test_schedule_length_mismatch_fails(self, tmp_path, capsys):
        corpus = generate_small(tmp_path)
        rules = tmp_path / "rules.txt"
        rules.write_text("p > b / _ {i,u}\n", encoding="utf-8")
        code = run(["simulate", "--corpus", corpus / "target", "--rules", rules,
                    "--schedule", "0,1", "--seed", "2", "--out", tmp_path / "x"])
        assert code == 2
        assert "error:" in capsys.readouterr().err


class TestAnalyzeAndReport:
    def config(self, tmp_path):
        cfg = {
            "source": {"kind": "parupa", "words_per_bin": 600, "n_bins": 5},
            "change": {"rule": "p > b / _ {i,u}", "schedule": "linear"},
            "window": 2, "ref_char": "p", "moving_char": "b",
            "replicates": 2, "seed": 0,
            "output_dir": str(tmp_path / "results"),
        }
        path = tmp_path / "config.json"
        path.write_text(json.dumps(cfg), encoding="utf-8")
        return path

    def test_analyze_writes_results(self, tmp_path, capsys):
        cfg = self.config(tmp_path)
        assert run(["analyze", "--config", cfg]) == 0
        out = capsys.readouterr().out
        assert "Bin:Control" in out
        results = tmp_path / "results"
        for name in ("coefficients.json", "coefficients.txt", "distances.csv",
                     "dimensions.csv", "config.json"):
            assert (results / name).exists(), name

    def test_report_renders_figures(self, tmp_path, capsys):
        cfg = self.config(tmp_path)
        assert run(["analyze", "--config", cfg]) == 0
        capsys.readouterr()
        assert run(["report", "--results", tmp_path / "results"]) == 0
        out = capsys.readouterr().out
        assert (tmp_path / "results" / "interaction.png").exists()
        assert (tmp_path / "results" / "dimensions.png").exists()
        assert "Effect" in out

    def test_dims_prints_top_contexts(self, tmp_path, capsys):
        cfg = self.config(tmp_path)
        assert run(["dims", "--config", cfg, "--out", tmp_path / "dims"]) == 0
        out = capsys.readouterr().out
        assert "dimension(s) kept" in out
        assert (tmp_path / "dims" / "dimensions.csv").exists()

    def test_cli_overrides(self, tmp_path):
        cfg = self.config(tmp_path)
        out2 = tmp_path / "other"
        assert run(["analyze", "--config", cfg, "--replicates", "1",
                    "--seed", "9", "--out", out2]) == 0
        written = json.loads((out2 / "config.json").read_text(encoding="utf-8"))
        assert written["replicates"] == 1 and written["seed"] == 9

    def test_missing_config_exits_two(self, tmp_path, capsys):
        assert run(["analyze", "--config", tmp_path / "nope.json"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_invalid_config_exits_two(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"source": {"kind": "parupa"}, "window": 1,
                                    "ref_char": "p", "moving_char": "b"}),
                        encoding="utf-8")
        assert run(["analyze", "--config", path]) == 2
        assert "window" in capsys.readouterr().err

    def test_report_on_empty_directory_exits_two(self, tmp_path, capsys):
        assert run(["report", "--results", tmp_path]) == 2
        assert "error:" in capsys.readouterr().err
