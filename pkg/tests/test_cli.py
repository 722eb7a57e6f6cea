import csv

import numpy as np
import pytest

from spectral_potential_lab import IntervalGrid, optimal_potential, principal_eigenpair
from spectral_potential_lab.cli import main


def _read_csv(path):
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    return rows[0], rows[1:]


def test_eig_matches_library(tmp_path):
    out = tmp_path / "run"
    rc = main(["eig", "--geometry", "interval", "--v0", "0.6", "--n", "511",
               "--potential", "ball", "--outdir", str(out)])
    assert rc == 0
    header, rows = _read_csv(out / "summary.csv")
    assert header == ["lambda", "lambda2", "residual", "mass"]
    grid = IntervalGrid(-1.0, 1.0, 511)
    ref = principal_eigenpair(grid, optimal_potential(grid, 0.6)).lam
    assert float(rows[0][0]) == pytest.approx(ref, abs=1e-4)
    assert (out / "eig.gp").exists()
    assert (out / "eig.png").exists()
    assert (out / "run_config.txt").exists()


def test_eig_annulus_mass_column(tmp_path):
    out = tmp_path / "run"
    rc = main(["eig", "--geometry", "interval", "--v0", "0.6", "--n", "255",
               "--potential", "annulus", "--delta", "0.05", "--outdir", str(out)])
    assert rc == 0
    header, rows = _read_csv(out / "eig.csv")
    grid = IntervalGrid(-1.0, 1.0, 255)
    V = np.array([float(r[-1]) for r in rows])
    assert np.dot(grid.weights, V) == pytest.approx(0.6 * 2.0, abs=4 * grid.h)


def test_schema_line_present(tmp_path):
    out = tmp_path / "run"
    main(["eig", "--geometry", "interval", "--n", "127", "--outdir", str(out)])
    first = (out / "eig.csv").read_text().splitlines()[0]
    assert first == "# spectral-potential-lab schema v1"


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("geometry=interval\nn=127\nv0=0.5\n")
    out = tmp_path / "run"
    rc = main(["eig", "--config", str(cfg), "--v0", "0.6", "--outdir", str(out)])
    assert rc == 0
    resolved = dict(line.split("=", 1) for line in
                    (out / "run_config.txt").read_text().splitlines())
    assert resolved["v0"] == "0.6"  # flag beats file
    assert resolved["n"] == "127"


def test_malformed_config_key_exit_2(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("geometri=interval\n")
    rc = main(["eig", "--config", str(cfg), "--outdir", str(tmp_path / "x")])
    assert rc == 2


def test_infeasible_exit_3(tmp_path):
    rc = main(["eig", "--geometry", "interval", "--n", "127", "--potential",
               "annulus", "--delta", "50.0", "--outdir", str(tmp_path / "x")])
    assert rc == 3


def test_modes_headers_and_positivity(tmp_path):
    out = tmp_path / "modes"
    rc = main(["modes", "--v0", "0.25", "--n", "512", "--kmax", "6",
               "--outdir", str(out)])
    assert rc == 0
    header, rows = _read_csv(out / "omega.csv")
    assert header == ["k", "omega_k", "psi_at_rstar"]
    assert all(float(r[1]) > 0 for r in rows)
    assert (out / "omega.gp").exists() and (out / "omega.png").exists()


def test_deficit_deterministic_output(tmp_path):
    args = ["deficit", "--geometry", "disk", "--n", "128", "--v0", "0.25",
            "--plan", "annulus:2:delta=0.05;radial-random:2", "--seed", "3"]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(args + ["--outdir", str(out1)]) == 0
    assert main(args + ["--outdir", str(out2)]) == 0
    assert (out1 / "samples.csv").read_bytes() == (out2 / "samples.csv").read_bytes()


def test_deficit_unknown_family_exit(tmp_path):
    rc = main(["deficit", "--geometry", "disk", "--n", "64",
               "--plan", "mystery:2", "--outdir", str(tmp_path / "x")])
    assert rc != 0


def test_optimize_zero_delta_returns_ball(tmp_path):
    out = tmp_path / "opt"
    rc = main(["optimize", "--geometry", "interval", "--n", "255", "--v0", "0.6",
               "--deltas", "0.0", "--outdir", str(out)])
    assert rc == 0
    header, rows = _read_csv(out / "potential_delta_0.csv")
    grid = IntervalGrid(-1.0, 1.0, 255)
    V_star = optimal_potential(grid, 0.6)
    got = np.array([float(r[1]) for r in rows])
    assert np.allclose(got, V_star.values)
