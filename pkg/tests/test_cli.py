import csv
import os

import numpy as np
import yaml

import nlspec as nl
from nlspec import cli


def write_config(path, cfg):
    with open(path, "w") as fh:
        yaml.safe_dump(cfg, fh)
    return str(path)


def flow_config(out_dir, **overrides):
    cfg = {
        "functional": {"kind": "graph_tv"},
        "domain": {"grid": {"width": 6}},
        "input": {"generator": {"name": "gaussian", "seed": 4}},
        "command": "flow",
        "options": {"tau": 0.05, "max_steps": 400},
        "output_dir": str(out_dir),
        "seed": 4,
    }
    cfg.update(overrides)
    return cfg


class TestConfigParsing:
    def test_unknown_key_rejected(self, tmp_path, capsys):
        p = write_config(tmp_path / "c.yaml", {
            "functional": {"kind": "l1", "n": 2},
            "command": "flow",
            "banana": 1,
        })
        rc = cli.main(["run", p])
        assert rc == 1
        assert "banana" in capsys.readouterr().err

    def test_unknown_nested_key_rejected(self, tmp_path, capsys):
        p = write_config(tmp_path / "c.yaml", {
            "functional": {"kind": "graph_tv", "weight": 2},
            "domain": {"grid": {"width": 3}},
            "command": "flow",
        })
        rc = cli.main(["run", p])
        assert rc == 1
        assert "weight" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert cli.main(["run", str(tmp_path / "nope.yaml")]) == 1

    def test_unknown_command(self, tmp_path):
        p = write_config(tmp_path / "c.yaml", {
            "functional": {"kind": "l1", "n": 2}, "command": "resolve"})
        assert cli.main(["run", p]) == 1

    def test_input_exclusivity(self, tmp_path):
        p = write_config(tmp_path / "c.yaml", {
            "functional": {"kind": "l1", "n": 2},
            "input": {"values": [1, 2], "file": "x"},
            "command": "flow"})
        assert cli.main(["run", p]) == 1


class TestFlowRun:
    def test_artifacts_written(self, tmp_path):
        out = tmp_path / "out"
        p = write_config(tmp_path / "c.yaml", flow_config(out))
        assert cli.main(["run", p]) == 0
        assert (out / "manifest.yaml").exists()
        assert (out / "trace.csv").exists()
        assert (out / "signals" / "input.txt").exists()
        with open(out / "trace.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["k", "t", "tau", "J", "dist", "Lambda",
                           "zeta_norm", "profile_residual"]
        assert len(rows) > 2

    def test_eigenvector_input_constant_lambda(self, tmp_path):
        out = tmp_path / "out"
        cfg = {
            "functional": {"kind": "graph_tv"},
            "domain": {"n": 2, "edges": [[0, 1, 1.0]]},
            "input": {"values": [1.0, -1.0]},
            "command": "flow",
            "options": {"tau": 0.1, "prox_tol": 1e-13},
            "output_dir": str(out),
        }
        p = write_config(tmp_path / "c.yaml", cfg)
        assert cli.main(["run", p, "--profile"]) == 0
        with open(out / "trace.csv") as fh:
            rows = list(csv.DictReader(fh))
        lams = [float(r["Lambda"]) for r in rows if r["Lambda"] != "nan"]
        assert max(lams) - min(lams) <= 1e-8

    def test_determinism_byte_identical(self, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        pa = write_config(tmp_path / "a.yaml", flow_config(out_a))
        pb = write_config(tmp_path / "b.yaml", flow_config(out_b))
        assert cli.main(["run", pa]) == 0
        assert cli.main(["run", pb]) == 0
        assert (out_a / "trace.csv").read_bytes() == (out_b / "trace.csv").read_bytes()
        assert (out_a / "signals" / "u_last.txt").read_bytes() == \
            (out_b / "signals" / "u_last.txt").read_bytes()

    def test_2d_grid_writes_pgm(self, tmp_path):
        out = tmp_path / "out"
        cfg = flow_config(out)
        cfg["domain"] = {"grid": {"width": 4, "height": 3}}
        cfg["input"] = {"generator": {"name": "indicator", "nodes": [5]}}
        p = write_config(tmp_path / "c.yaml", cfg)
        assert cli.main(["run", p]) == 0
        pgm = (out / "signals" / "input.pgm").read_text().splitlines()
        assert pgm[0] == "P2"
        assert pgm[1] == "4 3"
        assert pgm[2] == "65535"
        manifest = yaml.safe_load((out / "manifest.yaml").read_text())
        assert "input.pgm" in manifest["signal_scaling"]

    def test_decompose_writes_bands(self, tmp_path):
        out = tmp_path / "out"
        cfg = flow_config(out, command="decompose")
        p = write_config(tmp_path / "c.yaml", cfg)
        assert cli.main(["run", p]) == 0
        bands = os.listdir(out / "bands")
        assert any(b.startswith("band_") for b in bands)
        manifest = yaml.safe_load((out / "manifest.yaml").read_text())
        assert manifest["resolved"]["reconstruction_residual"] <= 1e-6

    def test_env_seed_override(self, tmp_path, monkeypatch):
        out = tmp_path / "out"
        p = write_config(tmp_path / "c.yaml", flow_config(out))
        monkeypatch.setenv("NLSPEC_SEED", "99")
        assert cli.main(["run", p]) == 0
        manifest = yaml.safe_load((out / "manifest.yaml").read_text())
        assert manifest["seed"] == 99
        assert manifest["seed_from_env"] is True


class TestPowerRun:
    def test_eigen_csv_matches_oracle(self, tmp_path):
        out = tmp_path / "out"
        cfg = {
            "functional": {"kind": "quadratic_form",
                           "matrix": nl.laplacian_matrix(
                               nl.build_grid_graph(nl.GridSpec(width=6))).tolist()},
            "command": "power",
            "options": {"restarts": 3, "tol": 1e-14, "max_iter": 5000},
            "output_dir": str(out),
            "seed": 5,
        }
        p = write_config(tmp_path / "c.yaml", cfg)
        assert cli.main(["run", p]) == 0
        with open(out / "eigen.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 3
        L = np.asarray(cfg["functional"]["matrix"])
        lam1 = nl.dense_symmetric_eigs(L).eigenvalues[1]
        best = min(float(r["lambda"]) for r in rows)
        assert abs(best - lam1) / lam1 <= 1e-8


class TestOracleRun:
    def test_distance_and_spectrum(self, tmp_path):
        out = tmp_path / "out"
        cfg = {
            "functional": {"kind": "lipschitz_sup"},
            "domain": {"grid": {"width": 3, "boundary_mode": "dirichlet"}},
            "command": "oracle",
            "output_dir": str(out),
        }
        p = write_config(tmp_path / "c.yaml", cfg)
        assert cli.main(["run", p]) == 0
        d = np.loadtxt(out / "signals" / "distance.txt")[:, 1]
        assert np.allclose(d, [0, 1, 2, 1, 0])
        assert (out / "oracle.csv").exists()


class TestCompare:
    def _write_trace(self, tmp_path, name, lam_perturb=0.0):
        out = tmp_path / name
        cfg = flow_config(out)
        p = write_config(tmp_path / (name + ".yaml"), cfg)
        assert cli.main(["run", p]) == 0
        path = out / "trace.csv"
        if lam_perturb:
            with open(path) as fh:
                rows = list(csv.reader(fh))
            rows[2][5] = cli._fmt(float(rows[2][5]) + lam_perturb)
            with open(path, "w", newline="") as fh:
                csv.writer(fh).writerows(rows)
        return str(path)

    def test_identical_pass(self, tmp_path):
        a = self._write_trace(tmp_path, "a")
        assert cli.main(["compare", a, a]) == 0

    def test_perturbed_fails_with_location(self, tmp_path, capsys):
        a = self._write_trace(tmp_path, "a")
        b = self._write_trace(tmp_path, "b", lam_perturb=1e-3)
        tol = tmp_path / "tol.yaml"
        tol.write_text("Lambda: 1.0e-6\n")
        rc = cli.main(["compare", a, b, "--tol-file", str(tol)])
        assert rc == 2
        text = capsys.readouterr().out
        assert "Lambda" in text and "row 1" in text

    def test_schema_mismatch(self, tmp_path, capsys):
        a = self._write_trace(tmp_path, "a")
        other = tmp_path / "other.csv"
        other.write_text("x,y\n1,2\n")
        assert cli.main(["compare", a, str(other)]) == 2


class TestValidateCommand:
    def test_filter_runs_subset(self, capsys):
        rc = cli.main(["validate", "--filter", "oracles."])
        out = capsys.readouterr().out
        assert rc == 0
        assert "oracles.jacobi_reconstruction" in out
        assert "prox.nonexpansive" not in out
