"""Command-line interface: subcommands, overrides and exit codes."""

import numpy as np

from irsofdm.cli import main

TINY = """
scenario: rate-vs-power
seed: 3
n_drops: 2
power_sweep_dbm: [0, 10]
system:
  n_elements: 4
  n_subcarriers: 4
"""


def write(tmp_path, text, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestValidateConfig:
    def test_valid_file(self, tmp_path, capsys):
        rc = main(["validate-config", write(tmp_path, TINY)])
        assert rc == 0
        assert capsys.readouterr().out.startswith("ok:")

    def test_unknown_key(self, tmp_path, capsys):
        rc = main(["validate-config", write(tmp_path, "system:\n  n_elemts: 4\n")])
        assert rc == 2
        assert "configuration error" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert main(["validate-config", str(tmp_path / "nope.yaml")]) == 2

    def test_broken_yaml(self, tmp_path):
        assert main(["validate-config", write(tmp_path, "a: [unclosed\n")]) == 2


class TestRun:
    def test_rate_sweep_to_file(self, tmp_path, capsys):
        out = tmp_path / "rates.csv"
        rc = main(["run", write(tmp_path, TINY), "--out", str(out)])
        assert rc == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("sweep_var,")
        assert len(lines) == 1 + 2 * 3
        assert "power_dbm = 0.0" in capsys.readouterr().err

    def test_defaults_to_stdout(self, tmp_path, capsys):
        rc = main(["run", write(tmp_path, TINY)])
        assert rc == 0
        assert capsys.readouterr().out.startswith("sweep_var,")

    def test_scenario_and_drops_overrides(self, tmp_path):
        out = tmp_path / "trace.csv"
        rc = main(["run", write(tmp_path, TINY), "--scenario", "convergence-trace",
                   "--out", str(out)])
        assert rc == 0
        assert out.read_text().splitlines()[0] == "stage,iteration,objective"

    def test_drops_override_lands_in_csv(self, tmp_path):
        out = tmp_path / "rates.csv"
        rc = main(["run", write(tmp_path, TINY), "--drops", "3", "--out", str(out)])
        assert rc == 0
        assert out.read_text().splitlines()[1].split(",")[5] == "3"

    def test_seed_override_changes_output(self, tmp_path):
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        cfg = write(tmp_path, TINY)
        assert main(["run", cfg, "--out", str(out_a)]) == 0
        assert main(["run", cfg, "--seed", "9", "--out", str(out_b)]) == 0
        assert out_a.read_text() != out_b.read_text()

    def test_invalid_override_is_config_error(self, tmp_path):
        assert main(["run", write(tmp_path, TINY), "--drops", "0"]) == 2

    def test_bad_config_file(self, tmp_path):
        assert main(["run", write(tmp_path, "power_sweep_dbm: []\n")]) == 2

    def test_unreachable_phase_is_numerical_failure(self, tmp_path, capsys):
        cfg = write(tmp_path, ("scenario: model-validation\n"
                               "validation:\n  target_phases_deg: [180]\n"))
        out = tmp_path / "val.csv"
        rc = main(["run", cfg, "--out", str(out)])
        assert rc == 3
        assert "failed" in capsys.readouterr().err

    def test_model_validation_writes_curves(self, tmp_path, capsys):
        cfg = write(tmp_path, ("scenario: model-validation\n"
                               "validation:\n  n_points: 11\n"))
        out = tmp_path / "val.csv"
        rc = main(["run", cfg, "--out", str(out)])
        assert rc == 0
        body = np.loadtxt(out, delimiter=",", skiprows=1)
        assert body.shape == (5 * 11, 6)
        assert "max phase error" in capsys.readouterr().err

    def test_element_sweep_scenario(self, tmp_path):
        cfg = write(tmp_path, ("scenario: rate-vs-elements\n"
                               "n_drops: 2\n"
                               "element_sweep: [0, 2]\n"
                               "system:\n  n_elements: 2\n  n_subcarriers: 4\n"))
        out = tmp_path / "elems.csv"
        assert main(["run", cfg, "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 1 + 2 * 3
        assert lines[1].split(",")[0] == "n_elements"
