"""Model definition: Dirac matrices, coupling parameters, fields, energy.

The system is a two-component complex field on a periodic 1D grid, driven by
the first-order operator ``alpha d/dx + m beta`` and a nonlinear oscillator
attached to the grid node at x = 0.  All spatial derivatives are spectral.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    DegenerateNonlinearity,
    LinearCouplingTooLarge,
    RWindowTooLarge,
)

ALPHA = np.array([[0.0, 1.0], [-1.0, 0.0]])
BETA = np.array([[1.0, 0.0], [0.0, -1.0]])


def check_clifford() -> None:
    """Verify alpha^2 = -I, beta^2 = I, and anticommutation, exactly."""
    ident = np.eye(2)
    if not (
        np.array_equal(ALPHA @ ALPHA, -ident)
        and np.array_equal(BETA @ BETA, ident)
        and np.array_equal(ALPHA @ BETA + BETA @ ALPHA, np.zeros((2, 2)))
    ):
        raise AssertionError("Dirac matrix identities violated")


check_clifford()


@dataclass(frozen=True)
class ModelParams:
    """Mass and oscillator coupling, either polynomial or linear.

    Polynomial mode: per-component coefficient lists ``u[j][n]`` define
    U_j(z) = sum_n u[j][n] |z|^(2n) with degree >= 2 and positive leading
    coefficient, so the energy is bounded below.  Linear mode: couplings
    ``a[j]`` with a_j < 2m, and U_j(z) = -a_j |z|^2 / 2.
    """

    m: float
    mode: str = "polynomial"
    u: Optional[tuple[tuple[float, ...], tuple[float, ...]]] = None
    a: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if self.m <= 0:
            raise DegenerateNonlinearity(f"mass must be positive, got {self.m}")
        if self.mode == "polynomial":
            if self.u is None:
                raise DegenerateNonlinearity("polynomial mode needs coefficients")
            u = tuple(tuple(float(c) for c in comp) for comp in self.u)
            object.__setattr__(self, "u", u)
            for j, comp in enumerate(u):
                degree = len(comp) - 1
                if degree < 2:
                    raise DegenerateNonlinearity(
                        f"component {j + 1}: degree {degree} < 2"
                    )
                if comp[-1] <= 0:
                    raise DegenerateNonlinearity(
                        f"component {j + 1}: leading coefficient {comp[-1]} <= 0"
                    )
        elif self.mode == "linear":
            if self.a is None:
                raise LinearCouplingTooLarge("linear mode needs couplings")
            a = tuple(float(v) for v in self.a)
            object.__setattr__(self, "a", a)
            for j, aj in enumerate(a):
                if aj >= 2.0 * self.m:
                    raise LinearCouplingTooLarge(
                        f"a_{j + 1} = {aj} >= 2m = {2 * self.m}"
                    )
        else:
            raise DegenerateNonlinearity(f"unknown mode {self.mode!r}")

    def to_json_dict(self) -> dict:
        doc = {"m": self.m, "mode": self.mode}
        if self.mode == "polynomial":
            doc["u"] = [list(comp) for comp in self.u]
        else:
            doc["a"] = list(self.a)
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ModelParams":
        mode = doc.get("mode", "polynomial")
        if mode == "polynomial":
            return cls(m=float(doc["m"]), mode=mode,
                       u=tuple(tuple(comp) for comp in doc["u"]))
        return cls(m=float(doc["m"]), mode=mode, a=tuple(doc["a"]))

    def coupling_coefficient(self, j: int, s):
        """a_j(s) in F_j(z) = a_j(|z|^2) z, with s = |z|^2.

        Polynomial mode: a_j(s) = -sum_{n>=1} 2n u_{n,j} s^(n-1); linear
        mode: the constant a_j.
        """
        if self.mode == "linear":
            return self.a[j - 1] * np.ones_like(np.asarray(s, dtype=float))
        coeffs = self.u[j - 1]
        acc = np.zeros_like(np.asarray(s, dtype=float))
        # Horner in s, highest power first
        for n in range(len(coeffs) - 1, 0, -1):
            acc = acc * s + (-2.0 * n * coeffs[n])
        return acc


def validate_params(p: ModelParams) -> None:
    """Re-run the construction-time admissibility checks on ``p``.

    Raises DegenerateNonlinearity or LinearCouplingTooLarge; returns None
    when the coupling admits the lower bound U >= A - B|z|^2 with B < m.
    """
    ModelParams(m=p.m, mode=p.mode, u=p.u, a=p.a)


def potential_U(p: ModelParams, zeta: Sequence[complex]) -> float:
    """Oscillator potential U(z) = U_1(z_1) + U_2(z_2), moduli only."""
    total = 0.0
    for j in (1, 2):
        s = abs(zeta[j - 1]) ** 2
        if p.mode == "linear":
            total += -0.5 * p.a[j - 1] * s
        else:
            coeffs = p.u[j - 1]
            acc = 0.0
            for n in range(len(coeffs) - 1, -1, -1):
                acc = acc * s + coeffs[n]
            total += acc
    return total


def nonlinearity_F(p: ModelParams, zeta) -> np.ndarray:
    """F(z) = (a_1(|z_1|^2) z_1, a_2(|z_2|^2) z_2), phase-equivariant.

    Accepts a pair of scalars or an array of shape (2, ...) and applies
    componentwise.
    """
    z = np.asarray(zeta, dtype=complex)
    out = np.empty_like(z)
    for j in (1, 2):
        s = np.abs(z[j - 1]) ** 2
        out[j - 1] = p.coupling_coefficient(j, s) * z[j - 1]
    return out


@dataclass
class Grid:
    """Uniform periodic grid on [-L, L) with x = 0 exactly on node N//2."""

    L: float
    n: int

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("L must be positive")
        if self.n < 4 or self.n & (self.n - 1):
            raise ValueError("n must be a power of two >= 4")
        self.dx = 2.0 * self.L / self.n
        self.zero_index = self.n // 2
        self.x = (np.arange(self.n) - self.zero_index) * self.dx
        self.k = 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)


@dataclass
class SpinorField:
    """Two complex components sampled on a shared grid, shape (2, n)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (2, self.grid.n):
            raise ValueError(f"expected shape (2, {self.grid.n})")

    @classmethod
    def zero(cls, grid: Grid) -> "SpinorField":
        return cls(grid, np.zeros((2, grid.n), dtype=complex))

    def copy(self) -> "SpinorField":
        return SpinorField(self.grid, self.values.copy())

    @property
    def at_zero(self) -> np.ndarray:
        """Point value (psi_1(0), psi_2(0))."""
        return self.values[:, self.grid.zero_index].copy()


def dirac_apply(f: SpinorField, p: ModelParams) -> SpinorField:
    """Apply alpha d/dx + m beta with the spectral derivative."""
    fh = np.fft.fft(f.values, axis=1)
    k = f.grid.k
    out = np.empty_like(fh)
    out[0] = p.m * fh[0] + 1j * k * fh[1]
    out[1] = -1j * k * fh[0] - p.m * fh[1]
    return SpinorField(f.grid, np.fft.ifft(out, axis=1))


def point_source_kernel(grid: Grid, m: float) -> tuple[np.ndarray, np.ndarray]:
    """Even/odd scalar profiles of the point-source shape.

    The kernel (beta - alpha sgn x) e^(-m|x|)/2 applied to a vector v is
    (v1*even - v2*odd, v1*odd - v2*even) with even = e^(-m|x|)/2 and
    odd = sgn(x) e^(-m|x|)/2; sgn(0) = 0, so at the origin it acts as
    beta/2.  Periodic images are O(e^(-mL)) and ignored.
    """
    decay = 0.5 * np.exp(-m * np.abs(grid.x))
    return decay, np.sign(grid.x) * decay


def apply_point_kernel(even: np.ndarray, odd: np.ndarray, v) -> np.ndarray:
    """Kernel times a two-vector, returning a (2, n) array."""
    return np.stack((v[0] * even - v[1] * odd, v[0] * odd - v[1] * even))


def dirac_inverse_delta(grid: Grid, p: ModelParams,
                        vector=(1.0, 1.0)) -> SpinorField:
    """Exact solution G of (alpha d/dx + m beta) G = delta(x) * vector."""
    even, odd = point_source_kernel(grid, p.m)
    return SpinorField(grid, apply_point_kernel(even, odd, vector))


def energy(f: SpinorField, p: ModelParams) -> float:
    """H(psi) = (1/2) <psi, (-d2/dx2 + m^2) psi> + U(psi(0)).

    The quadratic form is evaluated spectrally with the grid inner
    product dx * sum.
    """
    fh = np.fft.fft(f.values, axis=1)
    weight = f.grid.k**2 + p.m**2
    quad = 0.5 * (f.grid.dx / f.grid.n) * float(
        np.sum(weight * (np.abs(fh[0]) ** 2 + np.abs(fh[1]) ** 2))
    )
    return quad + potential_U(p, f.at_zero)


class Norms(NamedTuple):
    l2: float
    h1: float
    h1_local: float


def norms(f: SpinorField, p: ModelParams, R: Optional[float] = None) -> Norms:
    """L2 norm, the mass-weighted H1 norm, and its restriction to |x| < R.

    The H1 norm is (||f'||^2 + m^2 ||f||^2)^(1/2); the derivative is
    spectral.  With R omitted the local value equals the global one.
    """
    grid = f.grid
    if R is not None and not 0.0 < R <= grid.L:
        raise RWindowTooLarge(f"R = {R} outside (0, {grid.L}]")
    fh = np.fft.fft(f.values, axis=1)
    deriv = np.fft.ifft(1j * grid.k * fh, axis=1)
    dens = np.abs(f.values[0]) ** 2 + np.abs(f.values[1]) ** 2
    dens_h1 = np.abs(deriv[0]) ** 2 + np.abs(deriv[1]) ** 2 + p.m**2 * dens
    l2 = float(np.sqrt(grid.dx * dens.sum()))
    h1 = float(np.sqrt(grid.dx * dens_h1.sum()))
    if R is None:
        return Norms(l2, h1, h1)
    mask = np.abs(grid.x) <= R
    return Norms(l2, h1, float(np.sqrt(grid.dx * dens_h1[mask].sum())))
