"""Sampled checks of symbol-class estimates.

A symbol ``p(x, xi)`` of order ``m`` and type ``(rho, delta)`` obeys

    |d_xi^alpha d_x^beta p(x, xi)| <= C (1 + |xi|)^{m + delta*beta - rho*alpha}

for ``x`` in a compact window.  Sampling cannot prove such a bound; the
functions here fit decay exponents on a log-spaced band of large ``|xi|``
and report whether the samples are consistent with the claim.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, NumericalError

TWO_PI = 2.0 * np.pi
EPS = np.finfo(float).eps
DEFAULT_SLACK = 0.15
MAX_FD_DEPTH = 4

# Ray along which the Yngvason correction is read as a symbol in one variable.
YNGVASON_DIRECTION = (1.0 / math.sqrt(3.0),) * 3


@dataclass(frozen=True)
class SymbolClaim:
    m: float
    rho: float = 1.0
    delta: float = 0.5
    x_window: tuple = (0.0, 1.0)
    max_alpha: int = 3
    max_beta: int = 3

    def __post_init__(self):
        if not (0.0 < self.delta <= self.rho <= 1.0 and self.delta < 1.0):
            raise DomainError(f"need 0 < delta <= rho <= 1 and delta < 1, got rho={self.rho}, delta={self.delta}")
        a, b = self.x_window
        if not (np.isfinite(a) and np.isfinite(b) and a <= b):
            raise DomainError(f"x_window must be a bounded interval, got {self.x_window}")
        if not (0 <= self.max_alpha <= MAX_FD_DEPTH and 0 <= self.max_beta <= MAX_FD_DEPTH):
            raise DomainError(f"derivative orders are capped at {MAX_FD_DEPTH}")

    def bound(self, alpha: int, beta: int) -> float:
        return self.m + self.delta * beta - self.rho * alpha


@dataclass(frozen=True)
class SymbolEntry:
    alpha: int
    beta: int
    exponent: Optional[float]
    allowed: float
    constant: Optional[float]
    status: str  # "pass", "fail" or "noise"


@dataclass(frozen=True)
class SymbolReport:
    estimated_order: float
    entries: tuple
    passed: bool
    residuals: np.ndarray = field(repr=False)
    slack: float = DEFAULT_SLACK

    def table(self):
        return [(e.alpha, e.beta, e.exponent, e.allowed, e.constant, e.status) for e in self.entries]


def xi_band(xi_max: float, steps_per_octave: int = 8) -> np.ndarray:
    """Log-spaced magnitudes in ``[xi_max/10, xi_max]``."""
    if not xi_max >= 1e2:
        raise DomainError(f"xi_max must be >= 1e2, got {xi_max}")
    k = int(np.floor(np.log2(10.0) * steps_per_octave))
    return xi_max * 2.0 ** (-np.arange(k, -1, -1) / steps_per_octave)


def _x_samples(window, count: int = 5):
    a, b = window
    return np.array([a]) if a == b else np.linspace(a, b, count)


def _sup_over(symbol, xs, xi):
    """``max_{x, +-xi} |p(x, xi)|`` for each magnitude in ``xi``."""
    X = xs[:, None]
    vals = np.concatenate([np.abs(np.asarray(symbol(X, s * xi[None, :]), dtype=complex)) for s in (1.0, -1.0)])
    if not np.all(np.isfinite(vals)):
        raise NumericalError("symbol returned non-finite samples")
    return vals.max(axis=0)


def _slope(xi, vals):
    return float(np.polyfit(np.log1p(xi), np.log(vals), 1)[0])


def estimate_order(symbol: Callable, x_window=(0.0, 1.0), xi_max: float = 1e4) -> float:
    """Least-squares slope of ``log sup_x |p|`` against ``log(1 + |xi|)``."""
    xi = xi_band(xi_max)
    sup = _sup_over(symbol, _x_samples(x_window), xi)
    if np.any(sup == 0.0):
        raise NumericalError("symbol vanishes on the sampling band; order undefined")
    return _slope(xi, sup)


def _central_weights(k: int):
    """Offsets and weights of the k-th central difference with unit step."""
    i = np.arange(k + 1)
    w = np.array([(-1) ** j * math.comb(k, j) for j in i], dtype=float)
    return k / 2.0 - i, w


def fd_derivative(symbol, x, xi, alpha: int, beta: int, h_xi, h_x):
    """Nested central differences for ``d_xi^alpha d_x^beta p`` at ``(x, xi)``.

    Returns the estimate and the round-off level ``eps * sum|w| * max|p| / h^...``.
    """
    oa, wa = _central_weights(alpha)
    ob, wb = _central_weights(beta)
    acc = 0.0
    peak = 0.0
    for da, ca in zip(oa, wa):
        for db, cb in zip(ob, wb):
            v = np.asarray(symbol(x + db * h_x, xi + da * h_xi), dtype=complex)
            acc = acc + ca * cb * v
            peak = np.maximum(peak, np.abs(v))
    scale = h_xi ** alpha * h_x ** beta
    noise = EPS * np.sum(np.abs(wa)) * np.sum(np.abs(wb)) * peak / scale
    return acc / scale, noise


def _entry(symbol, claim, xs, xi, alpha, beta, slack):
    allowed = claim.bound(alpha, beta)
    if alpha == 0 and beta == 0:
        d = _sup_over(symbol, xs, xi)
        noise = np.zeros_like(d)
    else:
        step = EPS ** (1.0 / (alpha + beta + 2))
        X = xs[:, None]
        ds, ns = [], []
        for s in (1.0, -1.0):
            XI = s * xi[None, :]
            val, nz = fd_derivative(symbol, X, XI, alpha, beta, step * (1.0 + np.abs(XI)), step * (1.0 + np.abs(X)))
            ds.append(np.abs(val))
            ns.append(np.broadcast_to(nz, np.shape(val)))
        d_all, n_all = np.concatenate(ds), np.concatenate(ns)
        if not np.all(np.isfinite(d_all)):
            raise NumericalError(f"non-finite derivative estimate at alpha={alpha}, beta={beta}")
        # entries below the round-off level carry no information
        d_all = np.where(d_all > 10.0 * n_all, d_all, 0.0)
        d = d_all.max(axis=0)
        noise = np.where(d > 0, 0.0, 1.0)
    keep = (d > 0) & (noise == 0)
    if keep.sum() < 4:
        return SymbolEntry(alpha, beta, None, allowed, None, "noise")
    expo = _slope(xi[keep], d[keep])
    const = float(np.max(d[keep] / (1.0 + xi[keep]) ** allowed))
    status = "pass" if expo <= allowed + slack else "fail"
    return SymbolEntry(alpha, beta, expo, allowed, const, status)


def check_symbol_estimate(symbol: Callable, claim: SymbolClaim, xi_max: float = 1e4,
                          slack: float = DEFAULT_SLACK) -> SymbolReport:
    """Fit the decay exponent of every mixed derivative up to the claim's caps."""
    xi = xi_band(xi_max)
    xs = _x_samples(claim.x_window)
    entries = [
        _entry(symbol, claim, xs, xi, a, b, slack)
        for a in range(claim.max_alpha + 1)
        for b in range(claim.max_beta + 1)
    ]
    residuals = np.array([np.nan if e.exponent is None else e.exponent - e.allowed for e in entries])
    passed = all(e.status != "fail" for e in entries)
    order = estimate_order(symbol, claim.x_window, xi_max)
    return SymbolReport(order, tuple(entries), passed, residuals, slack)


class ReferenceSymbol(enum.Enum):
    YNGVASON_DR = "yngvason-dr"
    BY_MULTIPLIER = "by-multiplier"
    BY_HOERMANDER = "by-hoermander"


def yngvason_dr_symbol(m: float = 1.0, direction=YNGVASON_DIRECTION):
    """The Yngvason correction along the ray ``p = xi * direction``; ``x`` is unused."""
    from .yngvason import dr_symbol

    d0, d1, d2 = direction

    def p(x, xi):
        xi = np.asarray(xi, dtype=float) + 0.0 * np.asarray(x, dtype=float)
        return dr_symbol(xi * d0, xi * d1, xi * d2, m)

    return p


def by_multiplier_symbol(n: int, beta: float, reading: str = "k", sign: int = 1):
    """``sum_{k=1}^n ((i xi)/(i xi -+ 2 pi/beta))^e`` with ``e = k`` or ``e = n + 1``."""
    if n < 1 or not beta > 0:
        raise DomainError("need n >= 1 and beta > 0")
    if reading not in ("k", "n+1"):
        raise ValueError("reading must be 'k' or 'n+1'")
    a = TWO_PI / beta

    def p(x, xi):
        xi = np.asarray(xi, dtype=float) + 0.0 * np.asarray(x, dtype=float)
        r = 1j * xi / (1j * xi - sign * a)
        return sum(r ** (k if reading == "k" else n + 1) for k in range(1, n + 1))

    return p


def by_hoermander_symbol(n: int, beta: float, reading: str = "k", sign: int = 1, include_beta: bool = True):
    """The multiplier times ``e^{-+2 pi x/beta}`` (``/beta`` dropped when ``include_beta`` is false)."""
    mult = by_multiplier_symbol(n, beta, reading, sign)
    rate = TWO_PI / beta if include_beta else TWO_PI

    def p(x, xi):
        return mult(x, xi) * np.exp(-sign * rate * np.asarray(x, dtype=float))

    return p


def reference_symbols(name, n: int = 1, beta: float = 1.0, m: float = 1.0, reading: str = "k",
                      sign: int = 1, include_beta: bool = True) -> Callable:
    name = ReferenceSymbol(name)
    if name is ReferenceSymbol.YNGVASON_DR:
        return yngvason_dr_symbol(m)
    if name is ReferenceSymbol.BY_MULTIPLIER:
        return by_multiplier_symbol(n, beta, reading, sign)
    return by_hoermander_symbol(n, beta, reading, sign, include_beta)


def polynomial_symbol(k: int):
    return lambda x, xi: (np.asarray(xi, dtype=float) + 0.0 * np.asarray(x, dtype=float)) ** k + 0j
