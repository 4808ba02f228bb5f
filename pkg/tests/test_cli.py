import json

import numpy as np
import pytest

from pcstomo.cli import main
from pcstomo.fileio import load_density_file, load_mpo_file
from pcstomo.states import DensityMatrix, mpo_to_dense
from pcstomo.experiments import TRIALS_CSV_HEADER, SUMMARY_CSV_HEADER


def run_cli(*args):
    return main([str(a) for a in args])


class TestStateGen:
    @pytest.mark.parametrize(
        "extra",
        [
            ("--family", "lowrank", "--rank", "2"),
            ("--family", "mps", "--bond-dim", "2"),
            ("--family", "thermal", "--temperature", "0.5"),
            ("--family", "ghz"),
        ],
    )
    def test_families_produce_valid_states(self, tmp_path, extra):
        out = tmp_path / "state.rho1"
        assert run_cli("state", "gen", *extra, "--n", "3", "--seed", "7", "--out", out) == 0
        DensityMatrix.from_matrix(load_density_file(out))

    def test_mpo_output_matches_density(self, tmp_path):
        rho_path = tmp_path / "state.rho1"
        mpo_path = tmp_path / "state.mpo1"
        assert (
            run_cli(
                "state", "gen", "--family", "mps", "--bond-dim", "2", "--n", "4",
                "--seed", "3", "--out", rho_path, "--mpo-out", mpo_path,
            )
            == 0
        )
        dense = load_density_file(rho_path)
        mpo = load_mpo_file(mpo_path)
        assert np.max(np.abs(mpo_to_dense(mpo) - dense)) <= 1e-10

    def test_missing_family_parameter_is_config_error(self, tmp_path):
        assert run_cli("state", "gen", "--family", "lowrank", "--n", "2", "--out", tmp_path / "x") == 2


class TestMeasureReconstruct:
    def make_state(self, tmp_path):
        path = tmp_path / "gt.rho1"
        run_cli("state", "gen", "--family", "ghz", "--n", "2", "--out", path)
        return path

    def test_measure_writes_unit_trace_estimate(self, tmp_path):
        gt = self.make_state(tmp_path)
        est = tmp_path / "est.rho1"
        log = tmp_path / "log.csv"
        assert run_cli("measure", "--state", gt, "--measurements", "200", "--seed", "5", "--out", est, "--log", log) == 0
        mat = load_density_file(est)
        assert abs(np.trace(mat).real - 1.0) <= 1e-9
        assert len(log.read_text().strip().split("\n")) == 201

    def test_measure_replay_is_identical(self, tmp_path):
        gt = self.make_state(tmp_path)
        paths = []
        for tag in ("a", "b"):
            est = tmp_path / f"{tag}.rho1"
            run_cli("measure", "--state", gt, "--measurements", "100", "--seed", "9", "--out", est)
            paths.append(est)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_measure_rejects_unphysical_state_with_exit_3(self, tmp_path):
        from pcstomo.fileio import save_density_file

        bad = tmp_path / "bad.rho1"
        save_density_file(bad, np.diag([1.5, -0.5]).astype(complex))
        assert run_cli("measure", "--state", bad, "--measurements", "10", "--seed", "1", "--out", tmp_path / "x") == 3

    @pytest.mark.parametrize("method", ["cs", "simplex-pcs", "lr-pcs:2", "mpo-pcs:cap=2", "mpo-pcs:tol=1e-14"])
    def test_reconstruct_methods(self, tmp_path, method):
        gt = self.make_state(tmp_path)
        est = tmp_path / "est.rho1"
        run_cli("measure", "--state", gt, "--measurements", "300", "--seed", "2", "--out", est)
        out = tmp_path / "rec.rho1"
        assert run_cli("reconstruct", "--estimate", est, "--method", method, "--out", out) == 0
        mat = load_density_file(out)
        if method == "cs":
            assert np.array_equal(mat, load_density_file(est))
        else:
            DensityMatrix.from_matrix(mat)

    def test_reconstruct_bad_method_is_config_error(self, tmp_path):
        gt = self.make_state(tmp_path)
        assert run_cli("reconstruct", "--estimate", gt, "--method", "nope", "--out", tmp_path / "x") == 2


class TestExperimentCommands:
    def write_config(self, tmp_path, **overrides):
        data = {
            "experiment_id": "cli-t",
            "n_qubits": 2,
            "state": {"family": "lowrank", "rank": 1},
            "methods": ["cs", "simplex-pcs"],
            "m_grid": [20, 40],
            "trials": 2,
            "master_seed": 11,
            "fresh_state_per_trial": True,
        }
        data.update(overrides)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(data))
        return path

    def test_run_writes_both_csvs(self, tmp_path):
        cfg = self.write_config(tmp_path)
        out = tmp_path / "out"
        assert run_cli("experiment", "run", "--config", cfg, "--out", out) == 0
        trials = (out / "cli-t_trials.csv").read_text().strip().split("\n")
        summary = (out / "cli-t_summary.csv").read_text().strip().split("\n")
        assert trials[0] == TRIALS_CSV_HEADER
        assert len(trials) == 1 + 2 * 2 * 2
        assert summary[0] == SUMMARY_CSV_HEADER
        assert len(summary) == 1 + 2 * 2

    def test_unknown_config_key_exit_2(self, tmp_path):
        cfg = self.write_config(tmp_path, typo_key=1)
        assert run_cli("experiment", "run", "--config", cfg, "--out", tmp_path / "o") == 2

    def test_missing_config_exit_2(self, tmp_path):
        assert run_cli("experiment", "run", "--config", tmp_path / "none.json", "--out", tmp_path / "o") == 2

    def test_seed_override_changes_results(self, tmp_path):
        cfg = self.write_config(tmp_path)
        out_a, out_b, out_c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
        run_cli("experiment", "run", "--config", cfg, "--out", out_a)
        run_cli("experiment", "run", "--config", cfg, "--out", out_b, "--seed", "12")
        run_cli("experiment", "run", "--config", cfg, "--out", out_c, "--seed", "11")
        strip = lambda p: [",".join(l.split(",")[:9]) for l in (p / "cli-t_trials.csv").read_text().strip().split("\n")]
        assert strip(out_a) != strip(out_b)
        assert strip(out_a) == strip(out_c)

    def test_preset_emit_config(self, tmp_path):
        out = tmp_path / "cfgs"
        assert run_cli("experiment", "preset", "fig2", "--emit-config", out) == 0
        files = sorted(p.name for p in out.glob("*.json"))
        assert files == ["fig2-r1.json", "fig2-r16.json", "fig2-r4.json"]
        data = json.loads((out / "fig2-r1.json").read_text())
        assert data["m_grid"] == [250, 1000, 4000]

    def test_preset_requires_out_or_emit(self):
        assert run_cli("experiment", "preset", "fig2") == 2


class TestReportSummarize:
    def test_round_trip(self, tmp_path):
        cfg_path = TestExperimentCommands().write_config(tmp_path)
        out = tmp_path / "out"
        run_cli("experiment", "run", "--config", cfg_path, "--out", out)
        summary_path = tmp_path / "resummary.csv"
        assert run_cli("report", "summarize", out / "cli-t_trials.csv", "--out", summary_path) == 0
        assert summary_path.read_text() == (out / "cli-t_summary.csv").read_text()

    def test_stdout_mode(self, tmp_path, capsys):
        cfg_path = TestExperimentCommands().write_config(tmp_path, m_grid=[15], trials=1)
        out = tmp_path / "out"
        run_cli("experiment", "run", "--config", cfg_path, "--out", out)
        capsys.readouterr()
        assert run_cli("report", "summarize", out / "cli-t_trials.csv") == 0
        captured = capsys.readouterr().out.strip().split("\n")
        assert captured[0] == SUMMARY_CSV_HEADER
        assert len(captured) == 3

    def test_rejects_malformed_csv(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("not,a,header\n")
        assert run_cli("report", "summarize", bad) == 2
