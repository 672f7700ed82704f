"""Thermal (Borchers-Yngvason) modular flows at inverse temperature beta.

On the positive half-line the flow is

    nu_plus(t, x) = beta/(2 pi) * log(1 + e^{-2 pi t} (e^{2 pi x / beta} - 1)),

defined where the argument of the logarithm is positive, and on the
negative half-line ``nu_minus(t, x) = -nu_plus(-t, -x)``.  In the variable
``u = e^{2 pi x/beta} - 1`` the flow is the linear scaling ``u -> e^{-2 pi t} u``,
which is how the group law and the apex behaviour are kept exact in floating
point: ``expm1`` forms ``u`` and ``log1p`` undoes it.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import lcgeom
from .errors import DomainError
from .lcgeom import LightConePoint, Region, RegionKind

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ThermalFlowParams:
    beta: float

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise DomainError(f"beta must be positive and finite, got {self.beta}")


class FlowKind(enum.Enum):
    THERMAL_PLUS = "by-plus"
    THERMAL_MINUS = "by-minus"
    DILATION = "dilation"
    BOOST = "boost"
    CONFORMAL_DC = "conformal-dc"


@dataclass(frozen=True)
class FlowSpec:
    """Which one-parameter flow acts on which region.

    For the thermal kinds the region selects the axis assignment:
    ``FORWARD_CONE`` uses ``nu_plus`` on both light-cone coordinates,
    ``RIGHT_WEDGE`` and ``DOUBLE_CONE`` use ``nu_minus`` on ``x_-`` and
    ``nu_plus`` on ``x_+``; ``BACKWARD_CONE`` uses ``nu_minus`` on both.
    """

    kind: FlowKind
    region: Region = field(default_factory=lambda: lcgeom.FORWARD_CONE)
    params: ThermalFlowParams = None

    def __post_init__(self):
        thermal = self.kind in (FlowKind.THERMAL_PLUS, FlowKind.THERMAL_MINUS)
        if thermal and self.params is None:
            raise DomainError("thermal flows need ThermalFlowParams")


def _check_beta(beta):
    if not np.all(np.isfinite(beta) & (np.asarray(beta) > 0)):
        raise DomainError(f"beta must be positive and finite, got {beta}")


def _plus_argument(t, x, beta):
    return np.exp(-TWO_PI * np.asarray(t, dtype=float)) * np.expm1(TWO_PI * np.asarray(x, dtype=float) / beta)


def admissible_plus(t, x, beta):
    """``1 + e^{-2 pi t}(e^{2 pi x/beta} - 1) > 0``, evaluated without cancellation."""
    _check_beta(beta)
    ok = _plus_argument(t, x, beta) > -1.0
    return bool(ok) if np.ndim(ok) == 0 else ok


def admissible_minus(t, x, beta):
    """``1 + e^{2 pi t}(e^{-2 pi x/beta} - 1) > 0``."""
    return admissible_plus(-np.asarray(t, dtype=float), -np.asarray(x, dtype=float), beta)


def nu_plus(t, x, beta):
    _check_beta(beta)
    y = _plus_argument(t, x, beta)
    bad = ~(y > -1.0)
    if np.any(bad):
        k = int(np.argmax(np.ravel(bad)))
        tt = float(np.ravel(np.broadcast_to(t, np.shape(y)))[k])
        xx = float(np.ravel(np.broadcast_to(x, np.shape(y)))[k])
        raise DomainError(f"nu_plus not admissible at t={tt}, x={xx}, beta={beta}")
    out = beta / TWO_PI * np.log1p(y)
    return float(out) if np.ndim(out) == 0 else out


def nu_minus(t, x, beta):
    try:
        out = -np.asarray(nu_plus(-np.asarray(t, dtype=float), -np.asarray(x, dtype=float), beta))
    except DomainError as exc:
        raise DomainError(str(exc).replace("nu_plus", "nu_minus (mirrored)")) from None
    return float(out) if out.ndim == 0 else out


def nu_plus_velocity(x, beta):
    """``d/dt nu_plus(t, x)`` at ``t = 0``, i.e. ``-beta (1 - e^{-2 pi x/beta})``."""
    return beta * np.expm1(-TWO_PI * np.asarray(x, dtype=float) / beta)


def nu_minus_velocity(x, beta):
    """``d/dt nu_minus(t, x)`` at ``t = 0``, i.e. ``beta (e^{2 pi x/beta} - 1)``."""
    return beta * np.expm1(TWO_PI * np.asarray(x, dtype=float) / beta)


def _axis_maps(spec: FlowSpec):
    """Return the pair of 1D maps applied to (x_+, x_-)."""
    kind = spec.kind
    if kind is FlowKind.BOOST:
        return (lambda t, x: np.exp(-TWO_PI * t) * x), (lambda t, x: np.exp(TWO_PI * t) * x)
    if kind is FlowKind.DILATION:
        f = lambda t, x: np.exp(-TWO_PI * t) * x  # noqa: E731
        return f, f
    if kind is FlowKind.CONFORMAL_DC:
        return lcgeom.conformal_dc_flow, lcgeom.conformal_dc_flow
    beta = spec.params.beta
    plus = lambda t, x: nu_plus(t, x, beta)  # noqa: E731
    minus = lambda t, x: nu_minus(t, x, beta)  # noqa: E731
    rk = spec.region.kind
    if kind is FlowKind.THERMAL_MINUS or rk is RegionKind.BACKWARD_CONE:
        return minus, minus
    if rk in (RegionKind.RIGHT_WEDGE, RegionKind.DOUBLE_CONE):
        return plus, minus
    return plus, plus


def flow_region(spec: FlowSpec, t, q: LightConePoint) -> LightConePoint:
    """Apply the flow of ``spec`` coordinate-wise to a light-cone point.

    Raises ``DomainError`` naming the coordinate whose admissibility failed.
    """
    fp, fm = _axis_maps(spec)
    try:
        xp = fp(t, q.xp)
    except DomainError as exc:
        raise DomainError(f"x_+ coordinate: {exc}") from None
    try:
        xm = fm(t, q.xm)
    except DomainError as exc:
        raise DomainError(f"x_- coordinate: {exc}") from None
    return LightConePoint(xp, xm)
