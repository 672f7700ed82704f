"""Yngvason's wedge model in momentum space (one spatial direction beyond p1).

Functions are sampled on a product grid over ``(p0, p1, p2)``.  The flow

    V(lam) phi(p) = F(-lam p+, -p-/lam, -p2) / F(-p+, -p-, -p2) * phi(lam p+, p-/lam, p2)

with ``p+- = p0 +- p1`` multiplies by an F-ratio and boosts the
``(p0, p1)`` plane.  The boost is applied as three shears, each an exact
Fourier shift along one axis, so resampling is spectrally accurate and the
finite-difference oracle in ``t`` (with ``lam = e^{-2 pi t}``) sees no
interpolation noise.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, NumericalError, ShapeError
from .specfun import MARGIN_CELLS, NOISE_FLOOR, Grid1D

TWO_PI = 2.0 * np.pi

# Conventions selected by the oracle decomposition run (resolve_conventions):
# the boost term is BOOST_PREFACTOR * (p0 d/dp1 + p1 d/dp0) and the
# multiplication term is MULTIPLIER_SIGN * dr_symbol.
RESOLVED_BOOST_PREFACTOR = -TWO_PI
RESOLVED_MULTIPLIER_SIGN = -1
BOOST_PREFACTORS = (-TWO_PI, -2.0 * TWO_PI)


@dataclass(frozen=True, eq=False)
class MomentumGrid3:
    """Complex samples over the product of three uniform grids.

    ``support_radius`` bounds ``|p|`` on the region where the samples are
    not negligible; flows check it against the grid box.
    """

    p0: Grid1D
    p1: Grid1D
    p2: Grid1D
    values: np.ndarray
    support_radius: Optional[float] = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        shape = (self.p0.n, self.p1.n, self.p2.n)
        if vals.shape != shape:
            raise ShapeError(f"values have shape {vals.shape}, expected {shape}")
        if not np.all(np.isfinite(vals)):
            raise NumericalError("momentum-space samples must be finite")
        object.__setattr__(self, "values", vals)

    @property
    def mesh(self):
        return (self.p0.x[:, None, None], self.p1.x[None, :, None], self.p2.x[None, None, :])

    @property
    def cell_volume(self) -> float:
        return self.p0.h * self.p1.h * self.p2.h

    def with_values(self, values) -> "MomentumGrid3":
        return MomentumGrid3(self.p0, self.p1, self.p2, values, self.support_radius)

    def _check_compatible(self, other: "MomentumGrid3"):
        if (self.p0, self.p1, self.p2) != (other.p0, other.p1, other.p2):
            raise ShapeError("momentum grids differ")

    def __add__(self, other):
        self._check_compatible(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        self._check_compatible(other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar):
        return self.with_values(scalar * self.values)

    __rmul__ = __mul__

    def norm(self, weight=None) -> float:
        w = 1.0 if weight is None else weight
        return float(np.sqrt(self.cell_volume * np.sum(w * np.abs(self.values) ** 2)))


def centered_axes(n: int = 128, half_width: float = 8.0, offset: float = 0.0):
    g = Grid1D(-half_width + offset, half_width + offset, n)
    return g, g, g


def gaussian3(axes, center=(0.3, -0.2, 0.1), width: float = 0.6) -> MomentumGrid3:
    """Isotropic Gaussian; the support radius is where it falls below 1e-14."""
    g0, g1, g2 = axes
    c = np.asarray(center, dtype=float)
    r2 = ((g0.x[:, None, None] - c[0]) ** 2 + (g1.x[None, :, None] - c[1]) ** 2
          + (g2.x[None, None, :] - c[2]) ** 2)
    radius = float(np.linalg.norm(c) + width * np.sqrt(2.0 * np.log(1e14)))
    return MomentumGrid3(g0, g1, g2, np.exp(-0.5 * r2 / width ** 2), radius)


@dataclass(frozen=True)
class FFactory:
    """The factor ``F`` with ``M(p) = F(p) F(-p)``, evaluated in Cartesian momenta.

    The default is ``F(p) = (p2^2 + m^2)^{1/2} + (i/2)(p+ + p-)``.  A custom
    ``evaluation(p0, p1, p2)`` may be supplied instead.
    """

    m: float = 1.0
    evaluation: Optional[Callable] = None

    def __post_init__(self):
        if not (np.isfinite(self.m) and self.m >= 0):
            raise DomainError(f"mass must be >= 0, got {self.m}")

    def __call__(self, p0, p1, p2):
        if self.evaluation is not None:
            return np.asarray(self.evaluation(p0, p1, p2), dtype=complex)
        return np.sqrt(p2 * p2 + self.m ** 2) + 1j * (p0 + 0.0 * p1)

    def lightcone(self, pp, pm, p2):
        """``F`` with its first two slots given as light-cone components."""
        return self(0.5 * (pp + pm), 0.5 * (pp - pm), p2)

    def weight(self, p0, p1, p2):
        """``M(p) = F(p) F(-p)``, the density of the one-particle norm."""
        return np.real(self(p0, p1, p2) * self(-p0, -p1, -p2))


def printed_weight(p0, p1, p2, m):
    """``sum_{i>=1} (p^i)^2 + m^2``, the weight as displayed next to the factor F."""
    return p1 * p1 + p2 * p2 + m * m + 0.0 * p0


def dr_symbol(p0, p1, p2, m):
    """``-2 i pi p1 / ((p2^2 + m^2)^{1/2} - i p0)``."""
    p0, p1, p2 = (np.asarray(v, dtype=float) for v in (p0, p1, p2))
    if m <= 0 and np.any((p0 == 0) & (p2 == 0)):
        raise DomainError("dr_symbol denominator vanishes at p0 = p2 = 0 for m <= 0")
    out = -2j * np.pi * p1 / (np.sqrt(p2 * p2 + m * m) - 1j * p0)
    return complex(out) if out.ndim == 0 else out


def _shift_along(values, axis: int, grid: Grid1D, shifts):
    """``v(x + d) `` along ``axis`` with ``d`` broadcast against the other axes."""
    xi = grid.xi
    shape = [1, 1, 1]
    shape[axis] = grid.n
    xi_b = xi.reshape(shape)
    phase = np.exp(1j * xi_b * shifts)
    if grid.n % 2 == 0:
        # Nyquist mode as a cosine keeps real data real
        nyq = [slice(None)] * 3
        nyq[axis] = slice(grid.n // 2, grid.n // 2 + 1)
        phase[tuple(nyq)] = np.cos(xi_b[tuple(nyq)] * shifts)
    return np.fft.ifft(np.fft.fft(values, axis=axis) * phase, axis=axis)


def boost_resample(phi: MomentumGrid3, rapidity: float) -> np.ndarray:
    """Samples of ``phi(ch p0 + sh p1, sh p0 + ch p1, p2)`` on the grid nodes.

    The boost matrix factors as ``S_x(tanh(eta/2)) S_y(sinh eta) S_x(tanh(eta/2))``
    with ``S_x(s): (x, y) -> (x + s y, y)``; pulling back by a product applies the
    left-most factor first.
    """
    if rapidity == 0.0:
        return phi.values.copy()
    p0, p1, _ = phi.mesh
    s = np.tanh(0.5 * rapidity)
    c = np.sinh(rapidity)
    v = _shift_along(phi.values, 0, phi.p0, s * p1)
    v = _shift_along(v, 1, phi.p1, c * p0)
    return _shift_along(v, 0, phi.p0, s * p1)


def _check_box(phi: MomentumGrid3, lam: float):
    if phi.support_radius is None:
        return
    stretch = max(lam, 1.0 / lam)
    for g in (phi.p0, phi.p1):
        room = min(-g.lo, g.hi) - MARGIN_CELLS * g.h
        if phi.support_radius * stretch > room:
            raise DomainError(
                f"boosted support radius {phi.support_radius * stretch:.3g} exits the grid box ({room:.3g})"
            )


def _f_ratio(phi: MomentumGrid3, F: FFactory, lam: float):
    p0, p1, p2 = phi.mesh
    pp, pm = p0 + p1, p0 - p1
    den = F.lightcone(-pp, -pm, -p2)
    if np.any(np.abs(den) < 1e-12):
        raise NumericalError("F(-p) vanishes on the grid")
    return F.lightcone(-lam * pp, -pm / lam, -p2) / den


def v_flow(lam: float, phi: MomentumGrid3, F: FFactory) -> MomentumGrid3:
    if not (np.isfinite(lam) and lam > 0):
        raise DomainError(f"lambda must be positive, got {lam}")
    if lam == 1.0:
        return phi.with_values(phi.values.copy())
    _check_box(phi, lam)
    return phi.with_values(_f_ratio(phi, F, lam) * boost_resample(phi, np.log(lam)))


def _derivative(values, grid: Grid1D, axis: int):
    shape = [1, 1, 1]
    shape[axis] = grid.n
    mult = 1j * grid.xi
    mult[grid.n // 2] = 0.0
    c = np.fft.fft(values, axis=axis)
    c[np.abs(c) < NOISE_FLOOR * np.max(np.abs(c), initial=0.0)] = 0.0
    return np.fft.ifft(c * mult.reshape(shape), axis=axis)


def boost_term(phi: MomentumGrid3, prefactor: float = RESOLVED_BOOST_PREFACTOR) -> MomentumGrid3:
    """``prefactor * (p0 d/dp1 + p1 d/dp0) phi`` by spectral differentiation."""
    p0, p1, _ = phi.mesh
    d0 = _derivative(phi.values, phi.p0, 0)
    d1 = _derivative(phi.values, phi.p1, 1)
    return phi.with_values(prefactor * (p0 * d1 + p1 * d0))


def multiplication_term(phi: MomentumGrid3, m: float, sign: int = RESOLVED_MULTIPLIER_SIGN) -> MomentumGrid3:
    p0, p1, p2 = phi.mesh
    return phi.with_values(sign * dr_symbol(p0, p1, p2, m) * phi.values)


def yngvason_generator(phi: MomentumGrid3, m: float, boost_prefactor: float = RESOLVED_BOOST_PREFACTOR,
                       multiplier_sign: int = RESOLVED_MULTIPLIER_SIGN) -> MomentumGrid3:
    """Massive generator: multiplication by the mass-dependent symbol plus the boost term."""
    return multiplication_term(phi, m, multiplier_sign) + boost_term(phi, boost_prefactor)


def yngvason_general_generator(phi: MomentumGrid3, F: FFactory,
                               boost_prefactor: float = RESOLVED_BOOST_PREFACTOR,
                               multiplier_sign: int = RESOLVED_MULTIPLIER_SIGN,
                               fd_step: float = 1e-5) -> MomentumGrid3:
    """Generator for an arbitrary factor ``F``.

    The multiplication term is ``(2 pi / G) (p+ d/dp+ - p- d/dp-) G`` with
    ``G(p+, p-, p2) = F(-p+, -p-, -p2)``; the light-cone derivatives of ``G``
    are central differences of the callable.  The identity
    ``p+ d/dp+ - p- d/dp- = p1 d/dp0 + p0 d/dp1`` turns the remaining part
    into ``boost_term``.
    """
    p0, p1, p2 = phi.mesh
    pp, pm = p0 + p1, p0 - p1
    G = F.lightcone(-pp, -pm, -p2)
    if phi.support_radius is not None:
        near = (p0 ** 2 + p1 ** 2 + p2 ** 2) <= phi.support_radius ** 2
    else:
        near = np.ones(G.shape, dtype=bool)
    if np.any(np.abs(G[np.broadcast_to(near, G.shape)]) < 1e-12):
        raise NumericalError("|F(-p)| < 1e-12 on the support")
    hp = fd_step * (1.0 + np.abs(pp))
    hm = fd_step * (1.0 + np.abs(pm))
    dGp = (F.lightcone(-(pp + hp), -pm, -p2) - F.lightcone(-(pp - hp), -pm, -p2)) / (2.0 * hp)
    dGm = (F.lightcone(-pp, -(pm + hm), -p2) - F.lightcone(-pp, -(pm - hm), -p2)) / (2.0 * hm)
    with np.errstate(divide="ignore", invalid="ignore"):
        mult = multiplier_sign * TWO_PI / G * (pp * dGp - pm * dGm)
    mult = np.where(np.abs(G) < 1e-12, 0.0, mult)
    return phi.with_values(mult * phi.values) + boost_term(phi, boost_prefactor)


def yngvason_oracle(phi: MomentumGrid3, F: FFactory, h: float = 2.5e-3) -> MomentumGrid3:
    """Richardson-extrapolated central difference of ``t -> V(e^{-2 pi t}) phi`` at 0."""
    if not h > 0:
        raise DomainError("oracle step must be positive")

    def central(step):
        up = v_flow(np.exp(-TWO_PI * step), phi, F).values
        down = v_flow(np.exp(TWO_PI * step), phi, F).values
        return (up - down) / (2.0 * step)

    return phi.with_values((4.0 * central(h / 2.0) - central(h)) / 3.0)


def decomposition(phi: MomentumGrid3, F: FFactory, h: float = 2.5e-3) -> dict:
    """Compare the oracle with every (boost prefactor, multiplier sign) combination.

    Errors are relative L2 distances normalised by ``||phi||``.  The norms of
    the oracle, of its boost part and of the remainder (oracle minus the
    resolved boost term) are returned alongside.
    """
    ref = phi.norm()
    oracle = yngvason_oracle(phi, F, h)
    errors = {}
    for pref in BOOST_PREFACTORS:
        boost = boost_term(phi, pref)
        for sign in (1, -1):
            model = boost + multiplication_term(phi, F.m, sign)
            errors[(pref, sign)] = (oracle - model).norm() / ref
    remainder = oracle - boost_term(phi, RESOLVED_BOOST_PREFACTOR)
    return {
        "errors": errors,
        "oracle_norm": oracle.norm() / ref,
        "boost_norm": boost_term(phi, RESOLVED_BOOST_PREFACTOR).norm() / ref,
        "remainder_norm": remainder.norm() / ref,
    }


def select_convention(runs: dict, tol: float):
    """Pick the (prefactor, sign) pair meeting ``tol`` for every run.

    Returns ``(winner, status)``.  When several pairs pass (large masses make
    the multiplication term negligible) the resolved defaults are kept and the
    status is ``"ambiguous"``; when none passes the winner is ``None``.
    """
    good = None
    for res in runs.values():
        ok = {key for key, err in res["errors"].items() if err <= tol}
        good = ok if good is None else good & ok
    if not good:
        return None, "failed"
    if len(good) == 1:
        return next(iter(good)), "resolved"
    default = (RESOLVED_BOOST_PREFACTOR, RESOLVED_MULTIPLIER_SIGN)
    return (default if default in good else sorted(good)[0]), "ambiguous"


def resolve_conventions(phi: MomentumGrid3, masses, tol: float = 1e-4, h: float = 2.5e-3):
    """Run the decomposition for each mass and select the convention.

    Returns ``(winner_or_None, status, {mass: decomposition})``.
    """
    runs = {m: decomposition(phi, FFactory(m), h) for m in masses}
    winner, status = select_convention(runs, tol)
    return winner, status, runs


def unitarity_residual(phi: MomentumGrid3, F: FFactory, lam: float, weight=None) -> float:
    """``| ||V(lam) phi||_M - ||phi||_M | / ||phi||_M`` with ``M = F(p) F(-p)`` by default."""
    p0, p1, p2 = phi.mesh
    w = F.weight(p0, p1, p2) if weight is None else weight
    before = phi.norm(w)
    after = v_flow(lam, phi, F).norm(w)
    return abs(after - before) / before
