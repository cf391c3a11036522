import numpy as np
import pytest

from mlswe import (
    Bathymetry,
    ConfigurationError,
    Grid1D,
    LayerPartition,
    PhysParams,
    SimState,
    interface_elevations,
    layer_heights,
)


def test_grid_uniform():
    grid = Grid1D.uniform(0.0, 10.0, 5)
    assert grid.n_cells == 5
    assert np.allclose(grid.dx, 2.0)
    assert np.allclose(grid.x, [1, 3, 5, 7, 9])
    assert grid.total_length == 10.0


def test_grid_validation():
    with pytest.raises(ConfigurationError):
        Grid1D(x=[1.0, 0.5], dx=[0.5, 0.5])
    with pytest.raises(ConfigurationError):
        Grid1D(x=[0.0, 1.0], dx=[0.5, -0.5])


def test_partition_rejects_zero_fraction():
    with pytest.raises(ConfigurationError):
        LayerPartition(fractions=[0.5, 0.0, 0.5])
    with pytest.raises(ConfigurationError):
        LayerPartition(fractions=[0.5, 0.6])


def test_partition_uniform_sums_to_one():
    for n in (1, 2, 7, 15):
        part = LayerPartition.uniform(n)
        assert abs(part.fractions.sum() - 1.0) <= 1e-14
        assert part.cumulative[-1] == pytest.approx(1.0, abs=1e-14)


def test_phys_params_validation():
    with pytest.raises(ConfigurationError):
        PhysParams(gravity=0.0)
    with pytest.raises(ConfigurationError):
        PhysParams(viscosity=-1.0)


def test_layer_heights_examples():
    part = LayerPartition(fractions=[0.25, 0.75])
    state = SimState(H=np.array([2.0]), q=np.zeros((2, 1)))
    h = layer_heights(state, part)
    assert h[:, 0] == pytest.approx([0.5, 1.5])

    state = SimState(H=np.array([0.0]), q=np.zeros((2, 1)))
    assert np.all(layer_heights(state, part) == 0.0)

    # 15 uniform layers of the 0.6 m exit height are 0.04 m each
    part15 = LayerPartition.uniform(15)
    state = SimState(H=np.array([0.6]), q=np.zeros((15, 1)))
    assert layer_heights(state, part15)[:, 0] == pytest.approx(0.04, abs=1e-15)


def test_layer_heights_partition_of_unity():
    rng = np.random.RandomState(0)
    for _ in range(50):
        n = rng.randint(1, 9)
        frac = rng.uniform(0.1, 1.0, n)
        frac /= frac.sum()
        part = LayerPartition(fractions=frac)
        H = rng.uniform(0.0, 5.0, 12)
        state = SimState(H=H, q=np.zeros((n, 12)))
        h = layer_heights(state, part)
        assert np.all(np.abs(h.sum(axis=0) - H) <= 1e-14 * np.maximum(H, 1.0))


def test_interface_elevations_examples():
    part = LayerPartition(fractions=[0.5, 0.5])
    state = SimState(H=np.array([1.0]), q=np.zeros((2, 1)))
    z = interface_elevations(state, part, Bathymetry(z=[0.0]))
    assert z[:, 0] == pytest.approx([0.0, 0.5, 1.0])

    state = SimState(H=np.array([0.0]), q=np.zeros((2, 1)))
    z = interface_elevations(state, part, Bathymetry(z=[2.0]))
    assert np.all(z == 2.0)

    part3 = LayerPartition.uniform(3)
    state = SimState(H=np.array([0.6]), q=np.zeros((3, 1)))
    z = interface_elevations(state, part3, Bathymetry(z=[0.2]))
    assert z[:, 0] == pytest.approx([0.2, 0.4, 0.6, 0.8])
    assert np.all(np.diff(z, axis=0) >= 0.0)


def test_velocities_dry_threshold():
    part = LayerPartition.uniform(2)
    state = SimState(H=np.array([1.0, 1e-12]), q=np.array([[0.5, 0.3],
                                                           [0.5, 0.3]]))
    u = state.velocities(part)
    assert u[:, 0] == pytest.approx([1.0, 1.0])
    assert np.all(u[:, 1] == 0.0)


def test_dimension_mismatch_raises():
    part = LayerPartition.uniform(3)
    state = SimState(H=np.ones(4), q=np.zeros((2, 4)))
    with pytest.raises(ConfigurationError):
        layer_heights(state, part)
