import numpy as np
import pytest

from modgen import symcheck as sc
from modgen.errors import DomainError, NumericalError


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_order_of_pure_powers(k):
    assert sc.estimate_order(sc.polynomial_symbol(k)) == pytest.approx(k, abs=0.05)


def test_order_of_constant():
    assert sc.estimate_order(lambda x, xi: 1.0 + 0.0 * x * xi) == pytest.approx(0.0, abs=0.05)


def test_order_needs_large_band_and_finite_samples():
    with pytest.raises(DomainError):
        sc.estimate_order(sc.polynomial_symbol(1), xi_max=50.0)
    with pytest.raises(NumericalError):
        sc.estimate_order(lambda x, xi: np.nan + 0 * xi * x)


@pytest.mark.parametrize("rho, delta", [(1.0, 0.0), (0.5, 0.7), (1.2, 0.5), (1.0, 1.0)])
def test_claim_type_constraint(rho, delta):
    with pytest.raises(DomainError):
        sc.SymbolClaim(0.0, rho, delta)


def test_claim_caps_finite_difference_depth():
    with pytest.raises(DomainError):
        sc.SymbolClaim(0.0, max_alpha=5)


def test_linear_symbol_passes_order_one():
    rep = sc.check_symbol_estimate(sc.polynomial_symbol(1), sc.SymbolClaim(1.0, 1.0, 0.5))
    assert rep.passed
    entry = {(e.alpha, e.beta): e for e in rep.entries}[(1, 0)]
    assert entry.exponent == pytest.approx(0.0, abs=0.05)


def test_quadratic_fails_order_one_and_passes_two():
    assert not sc.check_symbol_estimate(sc.polynomial_symbol(2), sc.SymbolClaim(1.0)).passed
    assert sc.check_symbol_estimate(sc.polynomial_symbol(2), sc.SymbolClaim(2.0)).passed


@pytest.mark.parametrize("m", [0.0, 0.5, 1.0, 3.0])
def test_passing_is_monotone_in_claimed_order(m):
    sym = sc.reference_symbols("by-hoermander", n=2, beta=1.0)
    assert sc.check_symbol_estimate(sym, sc.SymbolClaim(m)).passed


def test_finite_differences_converge_at_second_order():
    sym = sc.polynomial_symbol(3)
    errs = []
    for h in (0.4, 0.2, 0.1, 0.05):
        val, _ = sc.fd_derivative(sym, 0.0, 2.0, 1, 0, h, 1.0)
        errs.append(abs(val - 12.0))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.allclose(rates, 2.0, atol=0.05)


def test_reference_symbol_values():
    mult = sc.reference_symbols("by-multiplier", n=1, beta=1.0)
    assert mult(0.0, 0.0) == 0
    assert abs(mult(0.0, 1e9) - 1) < 1e-8
    assert sc.reference_symbols("yngvason-dr")(0.0, 0.0) == 0
    printed = sc.reference_symbols("by-multiplier", n=2, beta=1.0, reading="n+1")
    r = 1j * 3.0 / (1j * 3.0 - 2 * np.pi)
    assert printed(0.0, 3.0) == pytest.approx(2 * r ** 3)
    with pytest.raises(ValueError):
        sc.reference_symbols("by-multiplier", reading="n")


def test_hoermander_exponent_flag():
    with_beta = sc.reference_symbols("by-hoermander", n=1, beta=2.0)
    without = sc.reference_symbols("by-hoermander", n=1, beta=2.0, include_beta=False)
    m = sc.reference_symbols("by-multiplier", n=1, beta=2.0)(0.5, 10.0)
    assert with_beta(0.5, 10.0) == pytest.approx(m * np.exp(-np.pi / 2))
    assert without(0.5, 10.0) == pytest.approx(m * np.exp(-np.pi))


@pytest.mark.parametrize("name", ["yngvason-dr", "by-multiplier", "by-hoermander"])
@pytest.mark.parametrize("reading", ["k", "n+1"])
@pytest.mark.parametrize("n, beta", [(1, 0.5), (3, 2.0)])
def test_reference_symbols_have_order_zero(name, reading, n, beta):
    sym = sc.reference_symbols(name, n=n, beta=beta, reading=reading)
    rep = sc.check_symbol_estimate(sym, sc.SymbolClaim(0.0))
    assert rep.estimated_order == pytest.approx(0.0, abs=0.1)
    assert rep.passed


def test_minus_axis_multiplier():
    sym = sc.reference_symbols("by-hoermander", n=2, beta=1.0, sign=-1)
    assert sc.check_symbol_estimate(sym, sc.SymbolClaim(0.0, x_window=(-1.0, 0.0))).passed


def test_yngvason_symbol_along_energy_axis_decays():
    # along p0 alone the symbol falls off like 1/p0; the radial reading is order 0
    along_p0 = sc.yngvason_dr_symbol(1.0, direction=(1.0, 0.0, 0.0))
    tilted = lambda x, xi: sc.yngvason_dr_symbol(1.0)(x, xi)  # noqa: E731
    p1_fixed = lambda x, xi: along_p0(x, xi) + 0 * x  # noqa: E731
    assert np.all(p1_fixed(0.0, np.array([10.0, 100.0])) == 0)
    from modgen.yngvason import dr_symbol
    sym = lambda x, xi: dr_symbol(xi + 0 * x, 1.0, 0.3, 1.0)  # noqa: E731
    assert sc.estimate_order(sym) == pytest.approx(-1.0, abs=0.05)
    assert sc.estimate_order(tilted) == pytest.approx(0.0, abs=0.05)
