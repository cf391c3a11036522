import os

import numpy as np
import pytest

from mlswe import (
    BoundaryKind,
    BoundarySpec,
    ConfigurationError,
    FrictionLaw,
    SimState,
    parse_scenario,
)
from mlswe.boundary import extend_state
from mlswe.cli import main as cli_main
from mlswe.scenario import lake_at_rest_heights
from mlswe.snapshots import (
    SeriesWriter,
    read_series,
    read_snapshot,
    write_snapshot_arrays,
)

MINIMAL = """
[grid]
x_min = 0
x_max = 10
cells = 20

[boundary]
left = wall
right = wall

[initial]
type = constant
height = 1.0

[output]
t_end = 0.5
"""

TRANSCRITICAL = """
[grid]
x_min = 0
x_max = 25
cells = 200
bed = bump
bed_height = 0.2
bed_center = 10.0
bed_half_width = 2.0

[layers]
count = 15

[physics]
viscosity = 0.01
friction = strickler
strickler_k = 30.0

[boundary]
left = discharge
left_value = 1.0
right = height
right_value = 0.6

[initial]
type = constant
height = 0.6

[output]
t_end = 100.0
order = 1
"""


def test_minimal_config_defaults():
    sc = parse_scenario(MINIMAL)
    assert sc.order == 1
    assert sc.cfl_safety == 0.9
    assert sc.fractions.size == 1
    assert sc.bed == "flat"
    assert sc.friction is FrictionLaw.NONE
    model, state = sc.build()
    assert model.grid.n_cells == 20
    assert np.all(state.H == 1.0)


def test_transcritical_config_parses_exactly():
    sc = parse_scenario(TRANSCRITICAL)
    assert sc.left is BoundaryKind.DISCHARGE and sc.left_value == 1.0
    assert sc.right is BoundaryKind.HEIGHT and sc.right_value == 0.6
    assert sc.friction is FrictionLaw.STRICKLER and sc.strickler_k == 30.0
    assert sc.viscosity == 0.01
    assert sc.fractions.size == 15
    model, _ = sc.build()
    # crest sampled at cell centers, so slightly below the nominal height
    assert model.bathy.z.max() == pytest.approx(0.2, abs=1e-3)


def test_bad_fractions_error_names_sum():
    bad = MINIMAL + "\n[layers]\nfractions = 0.5, 0.6\n"
    with pytest.raises(ConfigurationError) as err:
        parse_scenario(bad)
    assert any("sum to 1" in e for e in err.value.errors)
    assert any("1.1" in e for e in err.value.errors)


def test_unknown_key_and_missing_required_collected():
    broken = """
[grid]
x_min = 0
x_max = 10
cells = 20
wibble = 3

[boundary]
left = wall
right = wall

[initial]
type = constant
height = 1.0

[output]
t_end = 0.1
"""
    with pytest.raises(ConfigurationError) as err:
        parse_scenario(broken)
    assert any("wibble" in e for e in err.value.errors)

    missing = MINIMAL.replace("height = 1.0\n", "")
    with pytest.raises(ConfigurationError) as err:
        parse_scenario(missing)
    assert any("height" in e for e in err.value.errors)


def test_multiple_errors_reported_together():
    broken = """
[grid]
x_min = 5
x_max = 1
cells = 0

[boundary]
left = periodic
right = wall

[initial]
type = constant
height = 1.0

[output]
t_end = -1
"""
    with pytest.raises(ConfigurationError) as err:
        parse_scenario(broken)
    assert len(err.value.errors) >= 4


def test_serialize_roundtrip_idempotent():
    for text in (MINIMAL, TRANSCRITICAL):
        sc = parse_scenario(text)
        once = sc.serialize()
        twice = parse_scenario(once).serialize()
        assert once == twice


def test_wall_boundary_mirrors_lake():
    sc = parse_scenario(MINIMAL)
    model, state = sc.build()
    u = state.velocities(model.part)
    H_ext, u_ext, zb_ext = extend_state(state.H, u, model.bathy.z, model.bc,
                                        9.81)
    assert H_ext[1] == state.H[0] and H_ext[-2] == state.H[-1]
    assert np.all(u_ext[:, 1] == -u[:, 0])
    assert zb_ext[0] == model.bathy.z[1]


def test_discharge_ghost_spreads_inflow_uniformly():
    bc = BoundarySpec(left=BoundaryKind.DISCHARGE, left_value=1.0,
                      right=BoundaryKind.HEIGHT, right_value=0.6)
    H = np.full(4, 0.6)
    u = np.zeros((3, 4))
    H_ext, u_ext, _ = extend_state(H, u, np.zeros(4), bc, 9.81)
    assert H_ext[0] == 0.6
    assert np.all(u_ext[:, 0] == pytest.approx(1.0 / 0.6, rel=1e-15))
    # height-imposed side pins H and copies the interior velocity
    assert H_ext[-1] == 0.6
    assert np.all(u_ext[:, -1] == 0.0)


def test_periodic_ghosts_wrap():
    bc = BoundarySpec(left=BoundaryKind.PERIODIC, right=BoundaryKind.PERIODIC)
    H = np.array([1.0, 2.0, 3.0, 4.0])
    u = H[None, :] * 0.1
    H_ext, u_ext, _ = extend_state(H, u, np.zeros(4), bc, 9.81)
    assert list(H_ext[:2]) == [3.0, 4.0]
    assert list(H_ext[-2:]) == [1.0, 2.0]
    assert u_ext[0, 0] == pytest.approx(0.3)


def test_lake_at_rest_heights_exact_surface():
    rng = np.random.RandomState(16)
    zb = rng.uniform(0.0, 0.9, 200)
    H = lake_at_rest_heights(zb, 1.0)
    wet = H > 0.0
    assert np.all((H + zb)[wet] == 1.0)


def test_snapshot_roundtrip_bitwise(tmp_path):
    rng = np.random.RandomState(17)
    path = tmp_path / "snap.csv"
    x = np.sort(rng.uniform(0, 10, 6))
    zb = rng.uniform(-1, 1, 6)
    H = rng.uniform(0, 2, 6)
    u = rng.standard_normal((3, 6))
    w = rng.standard_normal((3, 6)) * 1e-7
    write_snapshot_arrays(path, x, zb, H, u, w)
    back = read_snapshot(path)
    assert np.array_equal(back["x"], x)
    assert np.array_equal(back["zb"], zb)
    assert np.array_equal(back["H"], H)
    assert np.array_equal(back["u"], u)
    assert np.array_equal(back["w"], w)


def test_snapshot_header_monolayer(tmp_path):
    path = tmp_path / "snap.csv"
    write_snapshot_arrays(path, np.array([0.5, 1.5]), np.zeros(2),
                          np.ones(2), np.zeros((1, 2)), np.zeros((1, 2)))
    with open(path) as fh:
        lines = [line.strip() for line in fh if line.strip()]
    assert lines[0] == "x,z_b,H,u_1,w_1"
    assert len(lines) == 3  # header + one row per cell


def test_series_roundtrip(tmp_path):
    path = tmp_path / "series.csv"
    writer = SeriesWriter(path)
    writer.append(0.0, 0.1, 5.0, 12.0)
    writer.append(0.1, 0.1, 5.0, 11.9)
    series = read_series(path)
    assert np.allclose(series["t"], [0.0, 0.1])
    assert np.allclose(series["energy"], [12.0, 11.9])


def test_cli_validate_and_exit_codes(tmp_path):
    good = tmp_path / "good.ini"
    good.write_text(MINIMAL)
    assert cli_main(["validate", "--config", str(good)]) == 0

    bad = tmp_path / "bad.ini"
    bad.write_text(MINIMAL.replace("type = constant", "type = nonsense"))
    assert cli_main(["validate", "--config", str(bad)]) == 2

    assert cli_main(["validate", "--config", str(tmp_path / "absent.ini")]) == 2


def test_cli_run_writes_outputs(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text(MINIMAL)
    out = tmp_path / "out"
    code = cli_main(["run", "--config", str(cfg), "--out", str(out),
                     "--tend", "0.2", "--snapshots", "0.1"])
    assert code == 0
    files = os.listdir(out)
    assert "scenario.ini" in files
    assert "series.csv" in files
    snaps = [f for f in files if f.startswith("snapshot_")]
    assert len(snaps) >= 2
    snap = read_snapshot(out / sorted(snaps)[-1])
    assert snap["H"].shape == (20,)


def test_cli_eigen_reports(tmp_path, capsys):
    cfg = tmp_path / "eig.ini"
    cfg.write_text(MINIMAL.replace("[output]\nt_end = 0.5",
                                   "[layers]\ncount = 3\n\n[output]\nt_end = 0"))
    assert cli_main(["eigen", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "max |Im(lambda)|" in out


def test_cli_report_renders_figures(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text(MINIMAL)
    out = tmp_path / "out"
    assert cli_main(["run", "--config", str(cfg), "--out", str(out),
                     "--tend", "0.1"]) == 0
    assert cli_main(["report", "--out", str(out)]) == 0
    pngs = [f for f in os.listdir(out) if f.endswith(".png")]
    assert "surface.png" in pngs
    assert "velocity_field.png" in pngs
