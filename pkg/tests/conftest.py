import numpy as np
import pytest

from diracpoint import Grid, ModelParams, SpinorField


@pytest.fixture(scope="session")
def cubic_quintic() -> ModelParams:
    """Reference coupling U_j = -0.5|z|^2 + 0.25|z|^4, m = 1."""
    return ModelParams(m=1.0, u=((0.0, -0.5, 0.25), (0.0, -0.5, 0.25)))


@pytest.fixture(scope="session")
def linear_unit() -> ModelParams:
    return ModelParams(m=1.0, mode="linear", a=(1.0, 1.0))


@pytest.fixture()
def grid_small() -> Grid:
    return Grid(L=20.0, n=1024)


def l2_norm(field: SpinorField) -> float:
    return float(np.sqrt(field.grid.dx * np.sum(np.abs(field.values) ** 2)))


def l2_diff(a: SpinorField, b: SpinorField) -> float:
    return float(np.sqrt(a.grid.dx * np.sum(np.abs(a.values - b.values) ** 2)))


def gaussian_field(grid: Grid, amplitude=1.0, width=1.0, center=0.0,
                   carrier=0.0, spinor=(1.0, 0.0)) -> SpinorField:
    env = amplitude * np.exp(-((grid.x - center) ** 2) / (2 * width**2))
    wave = env * np.exp(1j * carrier * grid.x)
    return SpinorField(grid, np.stack((spinor[0] * wave, spinor[1] * wave)))
