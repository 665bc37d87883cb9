import json
import math

import numpy as np
import pytest

from kerrnet import cli, scenarios
from kerrnet.errors import ConfigError

FAST_SPECTRUM = ["--set", "spectrum.n_points=61"]


def run_cli(args):
    return cli.main(args)


class TestConfig:
    def test_defaults_validate(self):
        cfg = scenarios.load_config()
        assert cfg["schema_version"] == scenarios.SCHEMA_VERSION

    def test_unknown_preset(self):
        with pytest.raises(ConfigError):
            scenarios.load_config(preset="fig7")

    def test_preset_overlay(self):
        cfg = scenarios.load_config(preset="fig4")
        assert cfg["model"]["k_a"] == 0.5
        assert cfg["robustness"]["t_max"] == 5.0

    def test_set_override_parses_json(self):
        cfg = scenarios.load_config(overrides=["ramp.alpha=0.3",
                                               "model.topology=open",
                                               "integrator.t_max=null"])
        assert cfg["ramp"]["alpha"] == 0.3
        assert cfg["model"]["topology"] == "open"
        assert cfg["integrator"]["t_max"] is None

    def test_set_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown configuration key"):
            scenarios.load_config(overrides=["model.coupling=2"])

    def test_bad_json_file_is_line_addressed(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{\n  "model": {\n    "j": ,\n  }\n}')
        with pytest.raises(ConfigError, match=r"cfg\.json:3:\d+"):
            scenarios.load_config(config_path=str(path))

    def test_semantic_error_names_key(self, tmp_path):
        with pytest.raises(ConfigError, match="noise.kind"):
            scenarios.load_config(overrides=["noise.kind=thermal"])

    def test_validation_ranges(self):
        for override in ("model.n_cavities=1", "integrator.dt=0",
                         "spectrum.level_pair=[0,2]", "ramp.alpha=-1"):
            with pytest.raises(ConfigError):
                scenarios.load_config(overrides=[override])


class TestSpectrumScenario:
    def test_files_and_columns(self, tmp_path):
        rc = run_cli(["spectrum", "--preset", "fig1", "--out", str(tmp_path),
                      *FAST_SPECTRUM])
        assert rc == 0
        header = (tmp_path / "spectrum.csv").read_text().splitlines()[0]
        assert header.split(",")[:2] == ["phi", "level_0"]
        alc = (tmp_path / "alc.csv").read_text().splitlines()
        assert alc[0] == "phi_star,gap,level_lo,level_hi"
        meta = json.loads((tmp_path / "spectrum.meta.json").read_text())
        assert meta["schema_version"] == scenarios.SCHEMA_VERSION
        assert meta["config"]["model"]["topology"] == "periodic"

    def test_full_resolution_finds_both_crossings(self, tmp_path):
        rc = run_cli(["spectrum", "--preset", "fig1", "--out", str(tmp_path)])
        assert rc == 0
        rows = (tmp_path / "alc.csv").read_text().splitlines()[1:]
        stars = [float(r.split(",")[0]) for r in rows]
        assert len(stars) == 2
        assert abs(stars[0] - math.pi / 3) <= 0.05
        assert abs(stars[1] - 5 * math.pi / 6) <= 0.05

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert run_cli(["spectrum", "--preset", "fig1", "--out", str(out),
                            *FAST_SPECTRUM]) == 0
        assert (a / "spectrum.csv").read_bytes() == (b / "spectrum.csv").read_bytes()
        assert (a / "alc.csv").read_bytes() == (b / "alc.csv").read_bytes()

    def test_csv_number_format(self, tmp_path):
        run_cli(["spectrum", "--preset", "fig1", "--out", str(tmp_path),
                 *FAST_SPECTRUM])
        body = (tmp_path / "spectrum.csv").read_text().splitlines()[1:]
        for line in body[:5]:
            for tok in line.split(","):
                assert "E" not in tok  # lowercase scientific notation only
                float(tok)  # parseable with the C locale


class TestPassageScenario:
    def test_trajectory_columns(self, tmp_path):
        rc = run_cli(["passage", "--preset", "fig2", "--out", str(tmp_path),
                      "--set", "integrator.dt=0.01",
                      "--set", "integrator.cadence=200"])
        assert rc == 0
        lines = (tmp_path / "trajectory.csv").read_text().splitlines()
        assert lines[0] == ",".join(scenarios.TRAJECTORY_COLUMNS)
        assert len(lines) > 3

    def test_constant_fidelity_for_held_eigenstate(self, tmp_path):
        rc = run_cli(["passage", "--out", str(tmp_path),
                      "--set", "ramp.alpha=0",
                      "--set", "ramp.phi_start=1.5707963267948966",
                      "--set", "integrator.t_max=1.0",
                      "--set", "integrator.dt=0.005",
                      "--set", "integrator.cadence=40"])
        assert rc == 0
        rows = (tmp_path / "trajectory.csv").read_text().splitlines()[1:]
        cols = scenarios.TRAJECTORY_COLUMNS
        fid = [float(r.split(",")[cols.index("fidelity")]) for r in rows]
        assert np.ptp(fid) < 1e-10

    def test_adiabatic_mode(self, tmp_path):
        rc = run_cli(["passage", "--out", str(tmp_path),
                      "--set", "passage.mode=adiabatic",
                      "--set", "spectrum.n_points=25"])
        assert rc == 0
        rows = (tmp_path / "trajectory.csv").read_text().splitlines()[1:]
        assert len(rows) == 25
        cols = scenarios.TRAJECTORY_COLUMNS
        ng = [float(r.split(",")[cols.index("N_G")]) for r in rows]
        # entanglement along the adiabatic ground path jumps at the crossings
        assert max(ng) > ng[0]

    def test_noise_rejected(self, tmp_path):
        rc = run_cli(["passage", "--out", str(tmp_path),
                      "--set", "noise.kind=single_mode_loss",
                      "--set", "noise.gamma_a=0.1"])
        assert rc == 2

    def test_schmidt_column_is_integer_formatted(self, tmp_path):
        run_cli(["passage", "--out", str(tmp_path),
                 "--set", "ramp.alpha=0.5", "--set", "integrator.dt=0.01",
                 "--set", "integrator.cadence=100"])
        rows = (tmp_path / "trajectory.csv").read_text().splitlines()[1:]
        idx = scenarios.TRAJECTORY_COLUMNS.index("schmidt_number")
        assert all("." not in r.split(",")[idx] for r in rows)


class TestRobustnessScenario:
    def test_phase_flip_pair(self, tmp_path):
        rc = run_cli(["robustness", "--preset", "fig5", "--out", str(tmp_path),
                      "--set", "robustness.t_max=1.0",
                      "--set", "integrator.dt_open=0.002",
                      "--set", "integrator.cadence=50"])
        assert rc == 0
        lines = (tmp_path / "robustness.csv").read_text().splitlines()
        assert lines[0] == "t,fidelity_standard,fidelity_coupled"
        rows = [list(map(float, r.split(","))) for r in lines[1:]]
        coupled = np.array([r[2] for r in rows])
        standard = np.array([r[1] for r in rows])
        assert np.all(np.abs(coupled - 1.0) < 1e-8)
        assert standard[-1] < standard[0]

    def test_loss_pair_ordering(self, tmp_path):
        rc = run_cli(["robustness", "--preset", "fig4", "--out", str(tmp_path),
                      "--set", "robustness.t_max=0.5",
                      "--set", "integrator.dt_open=0.002",
                      "--set", "integrator.cadence=50"])
        assert rc == 0
        rows = [list(map(float, r.split(","))) for r in
                (tmp_path / "robustness.csv").read_text().splitlines()[1:]]
        for _, std, cpl in rows:
            assert cpl >= std - 1e-12

    def test_numerical_failure_exit_code(self, tmp_path):
        rc = run_cli(["robustness", "--preset", "fig5", "--out", str(tmp_path),
                      "--set", "integrator.dt_open=0.9",
                      "--set", "robustness.t_max=9.0"])
        assert rc == 3


class TestScanScenarios:
    def test_alpha_scan_outputs(self, tmp_path):
        rc = run_cli(["alpha-scan", "--out", str(tmp_path),
                      "--set", 'alpha_scan.alpha_grid=[0.3,0.5]',
                      "--set", "integrator.dt=0.01"])
        assert rc == 0
        lines = (tmp_path / "alpha_scan.csv").read_text().splitlines()
        assert lines[0] == "alpha,peak_fidelity"
        assert len(lines) == 3
        meta = json.loads((tmp_path / "alpha_scan.meta.json").read_text())
        assert meta["result"]["alpha_opt"] in (0.3, 0.5)

    def test_lossy_prep_outputs(self, tmp_path):
        rc = run_cli([
            "lossy-prep", "--preset", "fig6", "--out", str(tmp_path),
            "--set", 'lossy_prep.k_runs=[{"k": 1.0, "alpha_grid": [0.3, 0.5]}]',
            "--set", "lossy_prep.gamma_grid=[0.0,0.08]",
            "--set", 'lossy_prep.inset={"k": 1.0, "alphas": [0.3]}',
            "--set", "integrator.dt=0.01",
            "--set", "integrator.dt_open=0.005",
            "--set", "integrator.cadence=25",
        ])
        assert rc == 0
        lines = (tmp_path / "fidelity_vs_gamma.csv").read_text().splitlines()
        assert lines[0] == "gamma,k,alpha,peak_fidelity"
        assert len(lines) == 3  # one k, two gammas
        rows = [list(map(float, r.split(","))) for r in lines[1:]]
        assert rows[0][3] >= rows[1][3]  # losses reduce the peak
        inset = (tmp_path / "fidelity_vs_gamma_inset.csv").read_text().splitlines()
        assert len(inset) == 3

    def test_preset_subcommand_mismatch(self, tmp_path):
        assert run_cli(["spectrum", "--preset", "fig4",
                        "--out", str(tmp_path)]) == 2


def test_cli_unknown_subcommand():
    with pytest.raises(SystemExit):
        cli.main(["render"])
