"""Two-dimensional Minkowski geometry in light-cone coordinates.

Points are handled either in Cartesian form ``(x0, x1)`` or in light-cone
form ``(xp, xm) = (x0 + x1, x0 - x1)``.  The massless reference flows
(boost on the right wedge, dilation on the forward cone and the conformal
flow of the standard double cone) act coordinate-wise in the light-cone
picture.  All functions accept scalars or numpy arrays.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SpacetimePoint:
    x0: float
    x1: float

    def __post_init__(self):
        if not (np.all(np.isfinite(self.x0)) and np.all(np.isfinite(self.x1))):
            raise DomainError(f"non-finite spacetime point ({self.x0}, {self.x1})")


@dataclass(frozen=True)
class LightConePoint:
    xp: float
    xm: float


class RegionKind(enum.Enum):
    RIGHT_WEDGE = "right-wedge"
    LEFT_WEDGE = "left-wedge"
    FORWARD_CONE = "forward-cone"
    BACKWARD_CONE = "backward-cone"
    DOUBLE_CONE = "double-cone"
    HALF_LINE_PLUS = "half-line-plus"
    HALF_LINE_MINUS = "half-line-minus"


@dataclass(frozen=True)
class Region:
    """An open region of the (x0, x1) plane or of a light-cone axis.

    For ``DOUBLE_CONE`` the two light-cone intervals must be given:
    ``interval_minus`` bounds ``x_-`` and lies in the negative half-line,
    ``interval_plus`` bounds ``x_+`` and lies in the positive one.
    """

    kind: RegionKind
    interval_minus: Optional[Tuple[float, float]] = None
    interval_plus: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.kind is not RegionKind.DOUBLE_CONE:
            return
        if self.interval_minus is None or self.interval_plus is None:
            raise DomainError("a double cone needs both light-cone intervals")
        (a_m, b_m), (a_p, b_p) = self.interval_minus, self.interval_plus
        if not (np.isfinite([a_m, b_m, a_p, b_p]).all() and a_m < b_m and a_p < b_p):
            raise DomainError("double-cone intervals must be bounded and non-empty")
        if b_m > 0.0 or a_p < 0.0:
            raise DomainError("double-cone intervals need I- in R- and I+ in R+")

    @classmethod
    def double_cone(cls, interval_minus, interval_plus) -> "Region":
        return cls(RegionKind.DOUBLE_CONE, tuple(interval_minus), tuple(interval_plus))


RIGHT_WEDGE = Region(RegionKind.RIGHT_WEDGE)
LEFT_WEDGE = Region(RegionKind.LEFT_WEDGE)
FORWARD_CONE = Region(RegionKind.FORWARD_CONE)
BACKWARD_CONE = Region(RegionKind.BACKWARD_CONE)
HALF_LINE_PLUS = Region(RegionKind.HALF_LINE_PLUS)
HALF_LINE_MINUS = Region(RegionKind.HALF_LINE_MINUS)


def to_lightcone(p: SpacetimePoint) -> LightConePoint:
    return LightConePoint(p.x0 + p.x1, p.x0 - p.x1)


def from_lightcone(q: LightConePoint) -> SpacetimePoint:
    return SpacetimePoint((q.xp + q.xm) / 2.0, (q.xp - q.xm) / 2.0)


def region_contains(r: Region, p: SpacetimePoint):
    """Membership test for the open region ``r``; boundary points are outside.

    The half-line regions refer to the spatial coordinate ``x1``.
    """
    x0, x1 = np.asarray(p.x0), np.asarray(p.x1)
    k = r.kind
    if k is RegionKind.RIGHT_WEDGE:
        out = np.abs(x0) < x1
    elif k is RegionKind.LEFT_WEDGE:
        out = np.abs(x0) < -x1
    elif k is RegionKind.FORWARD_CONE:
        out = (x0 * x0 - x1 * x1 > 0) & (x0 > 0)
    elif k is RegionKind.BACKWARD_CONE:
        out = (x0 * x0 - x1 * x1 > 0) & (x0 < 0)
    elif k is RegionKind.HALF_LINE_PLUS:
        out = x1 > 0
    elif k is RegionKind.HALF_LINE_MINUS:
        out = x1 < 0
    else:
        xp, xm = x0 + x1, x0 - x1
        (a_m, b_m), (a_p, b_p) = r.interval_minus, r.interval_plus
        out = (a_m < xm) & (xm < b_m) & (a_p < xp) & (xp < b_p)
    return bool(out) if np.ndim(out) == 0 else out


def boost_flow(t, q: LightConePoint) -> LightConePoint:
    """Lorentz boost with rapidity ``2*pi*t``: ``xp -> e^{-2 pi t} xp``, ``xm -> e^{2 pi t} xm``."""
    return LightConePoint(np.exp(-TWO_PI * t) * q.xp, np.exp(TWO_PI * t) * q.xm)


def dilation_flow(t, q: LightConePoint) -> LightConePoint:
    s = np.exp(-TWO_PI * t)
    return LightConePoint(s * q.xp, s * q.xm)


def conformal_dc_flow(s, x):
    """Conformal flow of the standard double cone on one light-cone coordinate.

    Evaluates ``(1 + x - e^{-s}(1 - x)) / (1 + x + e^{-s}(1 - x))`` for
    ``|x| < 1``; the endpoints ``x = +-1`` are fixed points and are accepted.
    The expression equals ``tanh(artanh(x) + s/2)``, which is the form used
    for evaluation because it does not cancel near the zero of the numerator.
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(np.abs(x) > 1.0) or not np.all(np.isfinite(x)):
        raise DomainError(f"conformal double-cone flow needs |x| <= 1, got {x}")
    with np.errstate(divide="ignore"):
        out = np.where(np.abs(x) == 1.0, x, np.tanh(np.arctanh(np.clip(x, -1.0, 1.0)) + 0.5 * s))
    return float(out) if out.ndim == 0 else out


def conformal_dc_flow_raw(s, x):
    """The conformal flow evaluated literally from the rational expression."""
    e = np.exp(-np.asarray(s, dtype=float))
    x = np.asarray(x, dtype=float)
    return (1.0 + x - e * (1.0 - x)) / (1.0 + x + e * (1.0 - x))
