"""Two-frequency solitary waves of the point-coupled Dirac field.

Nonzero waves exist only for frequencies in the open gap (-m, m).  Each
component owns one frequency: component 1 carries the even profile of
omega_1, component 2 the even profile of omega_2, and the partner component
picks up the matching odd profile.  Amplitudes solve 2 C kappa = F_j(C b_j)
with the boundary factor b_j below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import BranchPoint, LinearCouplingTooLarge, OmegaOutsideGap
from .model import Grid, ModelParams, SpinorField, nonlinearity_F


def kappa_gap(omega: float, m: float) -> float:
    """Decay rate sqrt(m^2 - omega^2) for |omega| <= m."""
    if abs(omega) > m:
        raise OmegaOutsideGap(f"|{omega}| > {m}")
    return math.sqrt((m - omega) * (m + omega))


def wave_number(omega, m: float) -> complex:
    """k(omega) = sqrt(omega^2 - m^2), Im k > 0 in the upper half-plane.

    Extended continuously to real omega: i*sqrt(m^2 - omega^2) inside the
    gap, sign(omega)*sqrt(omega^2 - m^2) outside (so omega*k > 0 there).
    """
    w = complex(omega)
    if w.imag < 0:
        raise ValueError("defined for Im omega >= 0 only")
    if w.imag == 0:
        x = w.real
        if abs(x) <= m:
            return 1j * math.sqrt((m - x) * (m + x))
        return complex(math.copysign(math.sqrt(x * x - m * m), x))
    return 1j * np.sqrt(complex(m * m - w * w))


@dataclass(frozen=True)
class DispersionPoint:
    omega: complex
    kappa: complex
    k: complex


def dispersion_point(omega, m: float) -> DispersionPoint:
    """Bundle omega with k(omega) and kappa(omega) = -i k(omega)."""
    k = wave_number(omega, m)
    return DispersionPoint(omega=complex(omega), kappa=-1j * k, k=k)


def stable_b(omega: float, j: int, m: float) -> float:
    """Boundary factor b_j = 1 + (-1)^(j+1) omega / (m + kappa).

    Algebraically identical to 1 + (-1)^(j+1) (m - kappa)/omega but finite
    through omega = 0.
    """
    if abs(omega) >= m:
        raise OmegaOutsideGap(f"|{omega}| >= {m}")
    sign = 1.0 if j == 1 else -1.0
    return 1.0 + sign * omega / (m + kappa_gap(omega, m))


def _amplitude_poly_scan(p: ModelParams, omega: float, j: int):
    """Bracket the amplitude equation in s = C^2 on [0, s_max].

    Returns (simple, tangential) lists of s-roots: sign changes are
    bisected to relative 1e-14; local minima of |g| that touch zero
    without a sign change (even multiplicity) are refined by ternary
    search and reported separately.
    """
    if p.mode != "polynomial":
        raise ValueError("amplitude branches need polynomial mode")
    b = stable_b(omega, j, p.m)
    kap = kappa_gap(omega, p.m)
    coeffs = p.u[j - 1]
    deg = len(coeffs) - 1

    # g(s) = a_j(s b^2) b - 2 kappa, coefficients in powers of s
    poly = np.zeros(deg)
    for n in range(1, deg + 1):
        poly[n - 1] = -2.0 * n * coeffs[n] * b ** (2 * n - 1)
    poly[0] -= 2.0 * kap

    def g(s):
        acc = 0.0
        for c in poly[::-1]:
            acc = acc * s + c
        return acc

    s_max = (2.0 * p.m / abs(coeffs[-1]) * max(1.0, b) ** (2 * deg)) ** (
        1.0 / (deg - 1)
    ) + 1.0
    grid = np.linspace(0.0, s_max, 4097)
    vals = np.array([g(s) for s in grid])
    scale = max(abs(poly).max() * max(1.0, s_max) ** (deg - 1), abs(2.0 * kap))

    simple = []
    for i in range(len(grid) - 1):
        ga, gb = vals[i], vals[i + 1]
        if ga == 0.0 and grid[i] > 0.0:
            simple.append(grid[i])
            continue
        if ga * gb < 0.0:
            lo, hi = grid[i], grid[i + 1]
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if hi - lo < 1e-14 * max(1.0, mid):
                    break
                if g(lo) * g(mid) <= 0.0:
                    hi = mid
                else:
                    lo = mid
            simple.append(0.5 * (lo + hi))
    if vals[-1] == 0.0:
        simple.append(grid[-1])

    tangential = []
    absvals = np.abs(vals)
    for i in range(1, len(grid) - 1):
        if not (absvals[i] <= absvals[i - 1] and absvals[i] <= absvals[i + 1]):
            continue
        lo, hi = grid[i - 1], grid[i + 1]
        for _ in range(120):
            third = (hi - lo) / 3.0
            if abs(g(lo + third)) < abs(g(hi - third)):
                hi = hi - third
            else:
                lo = lo + third
        s = 0.5 * (lo + hi)
        if abs(g(s)) > 1e-9 * scale or s <= 0.0:
            continue
        if any(abs(s - r) < 1e-8 * max(1.0, s) for r in simple):
            continue
        tangential.append(s)
    return simple, tangential


def amplitude_roots(p: ModelParams, omega: float, j: int) -> List[float]:
    """All C >= 0 solving 2 C kappa = F_j(C b_j), trivial root first.

    In s = C^2 this is a real polynomial of degree N_j - 1; sign changes
    on [0, s_max] are bracketed and bisected to relative 1e-14.  Roots of
    even multiplicity are excluded here (see scan_branch).
    """
    simple, _ = _amplitude_poly_scan(p, omega, j)
    out = [0.0]
    for s in sorted(simple):
        if s <= 0.0:
            continue
        c = math.sqrt(s)
        if out and abs(c - out[-1]) < 1e-12 * max(1.0, c):
            continue
        out.append(c)
    return out


def amplitude_residual(p: ModelParams, omega: float, j: int, c: complex) -> float:
    """|2 C kappa - F_j(C b_j)| for a candidate amplitude."""
    b = stable_b(omega, j, p.m)
    kap = kappa_gap(omega, p.m)
    z = np.zeros(2, dtype=complex)
    z[j - 1] = c * b
    return float(abs(2.0 * c * kap - nonlinearity_F(p, z)[j - 1]))


@dataclass
class SolitaryParams:
    """Frequencies and complex amplitudes of a two-frequency wave."""

    m: float
    omega1: float
    omega2: float
    C1: complex = 0.0
    C2: complex = 0.0

    def __post_init__(self):
        for w in (self.omega1, self.omega2):
            if abs(w) >= self.m:
                raise OmegaOutsideGap(f"|{w}| >= {self.m}")

    @property
    def kappa1(self) -> float:
        return kappa_gap(self.omega1, self.m)

    @property
    def kappa2(self) -> float:
        return kappa_gap(self.omega2, self.m)

    def certify(self, p: ModelParams) -> tuple[float, float]:
        """Amplitude-equation residuals of (|C1|, |C2|)."""
        return (
            amplitude_residual(p, self.omega1, 1, abs(self.C1)),
            amplitude_residual(p, self.omega2, 2, abs(self.C2)),
        )


def solitary_params(p: ModelParams, omega1: float, omega2: float,
                    root_index1: int = -1, root_index2: int = -1,
                    phase1: float = 0.0, phase2: float = 0.0) -> SolitaryParams:
    """Pick amplitude roots for each component and attach free phases."""
    c1 = amplitude_roots(p, omega1, 1)[root_index1]
    c2 = amplitude_roots(p, omega2, 2)[root_index2]
    return SolitaryParams(
        m=p.m, omega1=omega1, omega2=omega2,
        C1=c1 * complex(math.cos(phase1), math.sin(phase1)),
        C2=c2 * complex(math.cos(phase2), math.sin(phase2)),
    )


def _shape_factors(omega: float, m: float, x):
    """Stable pieces of the profile: decay e^(-kappa|x|), and the
    quotients E = (e^(-kappa|x|) - e^(-m|x|))/omega and
    Dq = (m e^(-kappa|x|) - kappa e^(-m|x|))/omega.

    Both quotients have removable singularities at omega = 0; they are
    evaluated through expm1 of (m - kappa)|x| = omega^2 |x| / (m + kappa).
    """
    ax = np.abs(np.asarray(x, dtype=float))
    kap = kappa_gap(omega, m)
    decay = np.exp(-kap * ax)
    mass_decay = np.exp(-m * ax)
    if omega == 0.0:
        zero = np.zeros_like(ax)
        return decay, mass_decay, zero, zero, kap
    E = mass_decay * np.expm1(omega * omega * ax / (m + kap)) / omega
    Dq = m * E + omega * mass_decay / (m + kap)
    return decay, mass_decay, E, Dq, kap


def profile_shape(omega: float, m: float, x, kind: int):
    """Unit-amplitude profile of the given pairing and its x-derivative.

    kind 1: (e^(-kappa|x|) + Dq, kappa sgn(x) E); kind 2 swaps the roles
    with the sign flips of the second pairing.  Returns (vals, derivs),
    each of shape (2,) + shape(x).
    """
    xarr = np.asarray(x, dtype=float)
    sgn = np.sign(xarr)
    decay, mass_decay, E, Dq, kap = _shape_factors(omega, m, xarr)
    edge = omega * mass_decay / (m + kap)  # (sgn x * E)' away from the cusp
    if kind == 1:
        vals = np.stack((decay + Dq, kap * sgn * E))
        derivs = np.stack((-sgn * kap * (decay + m * E),
                           kap * (-kap * E + edge)))
    elif kind == 2:
        vals = np.stack((-kap * sgn * E, decay - Dq))
        derivs = np.stack((-kap * (-kap * E + edge),
                           -sgn * kap * (decay - m * E)))
    else:
        raise ValueError("kind must be 1 or 2")
    return vals, derivs


def profile(sp: SolitaryParams, j: int, x) -> np.ndarray:
    """Profile of the j-th frequency at position(s) x, amplitude included."""
    c = sp.C1 if j == 1 else sp.C2
    omega = sp.omega1 if j == 1 else sp.omega2
    vals, _ = profile_shape(omega, sp.m, x, kind=j)
    return c * vals


def profile_slope_at_zero(omega: float, m: float, kind: int, side: int):
    """One-sided derivative of the unit profile at x = 0, side = +-1."""
    kap = kappa_gap(omega, m)
    edge = omega / (m + kap)
    if kind == 1:
        return np.array([-side * kap, kap * edge], dtype=complex)
    return np.array([-kap * edge, -side * kap], dtype=complex)


def solitary_field(sp: SolitaryParams, grid: Grid, t: float) -> SpinorField:
    """Sample the two-frequency wave at time t on the grid."""
    v1, _ = profile_shape(sp.omega1, sp.m, grid.x, kind=1)
    v2, _ = profile_shape(sp.omega2, sp.m, grid.x, kind=2)
    values = (sp.C1 * np.exp(-1j * sp.omega1 * t) * v1
              + sp.C2 * np.exp(-1j * sp.omega2 * t) * v2)
    return SpinorField(grid, values)


def jump_residual(sp: SolitaryParams, p: ModelParams,
                  t: float = 0.0) -> tuple[float, float]:
    """Defect of the derivative-jump identity at the coupling point.

    For a genuine solitary wave the one-sided derivatives satisfy
    psi_j'(0+) - psi_j'(0-) = -F_j(psi_j(0)), so both residuals vanish.
    """
    ph1 = sp.C1 * np.exp(-1j * sp.omega1 * t)
    ph2 = sp.C2 * np.exp(-1j * sp.omega2 * t)
    jump = (ph1 * (profile_slope_at_zero(sp.omega1, sp.m, 1, +1)
                   - profile_slope_at_zero(sp.omega1, sp.m, 1, -1))
            + ph2 * (profile_slope_at_zero(sp.omega2, sp.m, 2, +1)
                     - profile_slope_at_zero(sp.omega2, sp.m, 2, -1)))
    y0 = np.array([ph1 * stable_b(sp.omega1, 1, sp.m),
                   ph2 * stable_b(sp.omega2, 2, sp.m)])
    defect = jump + nonlinearity_F(p, y0)
    return float(abs(defect[0])), float(abs(defect[1]))


def linear_frequencies(p: ModelParams) -> tuple[Optional[float], Optional[float]]:
    """Unique per-component frequencies in the linear-coupling case.

    For 0 < a_j < 2m the frequency solves kappa + m + (-1)^j omega = a_j
    in closed form; for a_j <= 0 there is no nonzero wave.  The closed
    form is cross-checked against that identity before returning.
    """
    if p.mode != "linear":
        raise ValueError("linear mode only")
    out: list[Optional[float]] = []
    for j in (1, 2):
        a = p.a[j - 1]
        if a >= 2.0 * p.m:
            raise LinearCouplingTooLarge(f"a_{j} = {a} >= 2m")
        if a <= 0.0:
            out.append(None)
            continue
        sign = -1.0 if j == 1 else 1.0
        omega = 0.5 * sign * (a - p.m - math.sqrt(p.m * p.m - a * a + 2 * p.m * a))
        identity = kappa_gap(omega, p.m) + p.m + sign * omega
        if abs(identity - a) > 1e-10 * max(1.0, abs(a)):
            raise AssertionError(
                f"frequency {omega} fails the coupling identity: {identity} != {a}"
            )
        out.append(omega)
    return out[0], out[1]


def helmholtz_green(x: float, omega, m: float) -> complex:
    """Outgoing kernel e^(i k(omega)|x|) / (2 i k(omega)).

    Inside the gap this is -e^(-kappa|x|)/(2 kappa); on the branch points
    omega = +-m the kernel degenerates and evaluation is refused.
    """
    k = wave_number(omega, m)
    if abs(k) < 1e-9 * max(m, 1.0):
        raise BranchPoint(f"omega = {omega} at a branch point of k")
    return complex(np.exp(1j * k * abs(x)) / (2j * k))


@dataclass(frozen=True)
class BranchRoot:
    j: int
    omega: float
    root_index: int
    C: float
    residual: float
    h1_norm: float
    tangential: bool = False


def _profile_h1_norm(omega: float, m: float, c: float) -> float:
    """Mass-weighted H1 norm of a single-frequency profile, by quadrature."""
    if c == 0.0:
        return 0.0
    kap = kappa_gap(omega, m)
    span = 60.0 / min(kap, m) if kap > 0 else 60.0 / m
    x = np.linspace(0.0, span, 20001)
    vals, derivs = profile_shape(omega, m, x, kind=1)
    dens = (np.abs(derivs) ** 2).sum(axis=0) + m * m * (np.abs(vals) ** 2).sum(axis=0)
    # profiles are even/odd, so integrate one side and double
    return c * math.sqrt(2.0 * np.trapezoid(dens, x))


def scan_branch(p: ModelParams, j: int, omegas) -> List[BranchRoot]:
    """Enumerate admissible amplitudes over a frequency grid.

    Roots of even multiplicity (branch folds, where the amplitude
    polynomial touches zero without crossing) are included and flagged
    tangential.
    """
    records = []
    for omega in omegas:
        w = float(omega)
        roots = [(c, False) for c in amplitude_roots(p, w, j)]
        _, tangential = _amplitude_poly_scan(p, w, j)
        roots += [(math.sqrt(s), True) for s in tangential]
        for idx, (c, flat) in enumerate(roots):
            records.append(BranchRoot(
                j=j, omega=w, root_index=idx, C=c,
                residual=amplitude_residual(p, w, j, c),
                h1_norm=_profile_h1_norm(w, p.m, c),
                tangential=flat,
            ))
    return records
