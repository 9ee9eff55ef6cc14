import math

import numpy as np
import pytest

from mellin_lab.core import DEFAULT_CFG
from mellin_lab.errors import NormDivergent, RatioViolation
from mellin_lab.hardy import (
    boundary_decay_check,
    geometric_sequence,
    hardy_norm,
    nikolski_check,
    pointwise_bound_check,
    spectral_decay_relation,
    theta_ladder,
)
from mellin_lab.polar import PolarFunction, from_strip
from mellin_lab.quadrature import integrate_halfline
from mellin_lab.transform import mellin_forward

# (π/2)^{1/4} e^{(1 − 2^{-8})²}: the p = 2 oracle at a = 1, eight ladder rungs
GAUSS_H2_AT_1 = 3.0195216811314007


@pytest.fixture
def zero():
    return PolarFunction(lambda r, th: np.zeros(np.broadcast(r, th).shape, dtype=complex))


def test_theta_ladder():
    np.testing.assert_allclose(theta_ladder(1.0, 3), [0.5, 0.75, 0.875])
    assert theta_ladder(0.4, 8)[-1] < 0.4


def test_gauss_h2_norm(gauss_hardy, c):
    est = hardy_norm(gauss_hardy, 1.0, c, 2)
    assert est.value == pytest.approx(GAUSS_H2_AT_1, rel=1e-10)
    for th, plus, minus, avg in est.per_theta:
        expected = (math.pi / 2) ** 0.25 * math.exp(th * th)
        assert plus == pytest.approx(expected, rel=1e-10)
        assert minus == pytest.approx(expected, rel=1e-10)


def test_gauss_h1_norm(gauss_hardy, c):
    # ∫ |exp(−(u + iθ)²)| du = √π e^{θ²}
    est = hardy_norm(gauss_hardy, 1.0, c, 1)
    assert est.value == pytest.approx(math.sqrt(math.pi) * math.exp((1 - 2 ** -8) ** 2), rel=1e-10)


def test_hardy_zero_and_scaling(gauss_hardy, zero, c):
    assert hardy_norm(zero, 1.0, c, 2).value == 0.0
    base = hardy_norm(gauss_hardy, 0.8, c, 2).value
    assert hardy_norm(gauss_hardy.scaled(-2.5), 0.8, c, 2).value == pytest.approx(2.5 * base, rel=1e-12)


def test_hardy_norm_monotone_in_ladder(gauss_hardy, c):
    vals = [hardy_norm(gauss_hardy, 1.0, c, 2, theta_count=n).value for n in (2, 4, 8, 12)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_hardy_norm_arguments(gauss_hardy, c):
    with pytest.raises(ValueError):
        hardy_norm(gauss_hardy, 1.0, c, 3)
    narrow = from_strip(lambda z: np.exp(-z * z), c, strip_a=0.5)
    with pytest.raises(ValueError):
        hardy_norm(narrow, 1.0, c, 2)


def test_hardy_norm_divergent(c):
    # r^{-c} has infinite X²_c norm on every ray
    flat = PolarFunction(lambda r, th: np.exp(-c * np.log(r)) + 0j * th)
    with pytest.raises(NormDivergent):
        hardy_norm(flat, 1.0, c, 2)


def test_pointwise_bound(gauss_hardy, c, zero):
    rep = pointwise_bound_check(gauss_hardy, 1.0, 0.5, c, 2)
    assert 0 < rep.max_ratio <= 1
    assert rep.constant == pytest.approx((4 / (math.pi * 0.5)) ** 0.5)
    assert pointwise_bound_check(zero, 1.0, 0.5, c, 2).max_ratio == 0.0
    scaled = pointwise_bound_check(gauss_hardy.scaled(7.0), 1.0, 0.5, c, 2)
    assert scaled.max_ratio == pytest.approx(rep.max_ratio, rel=1e-12)


def test_pointwise_bound_rejects_outside_probes(gauss_hardy, c):
    with pytest.raises(ValueError):
        pointwise_bound_check(gauss_hardy, 1.0, 0.5, c, 2, probes=[(1.0, 0.6)])
    with pytest.raises(ValueError):
        pointwise_bound_check(gauss_hardy, 1.0, 1.0, c, 2)


def test_nikolski_gauss(gauss_hardy, c):
    t, off = geometric_sequence(0.4, N=50)
    assert off == -50 and t.size == 101
    lhs, rhs = nikolski_check(gauss_hardy, 1.0, c, 2, 0.4, t, off)
    u = 0.84 * np.arange(-50, 51)
    assert lhs == pytest.approx(math.sqrt(math.fsum(np.exp(-2 * u * u))), rel=1e-13)
    assert rhs == pytest.approx(math.sqrt(2 / (math.pi * 0.4)) * GAUSS_H2_AT_1, rel=1e-10)
    assert lhs <= rhs


def test_nikolski_zero(zero, c):
    t, off = geometric_sequence(0.4)
    assert nikolski_check(zero, 1.0, c, 2, 0.4, t, off) == (0.0, 0.0)


def test_nikolski_ratio_violation(gauss_hardy, c):
    delta = 0.4
    t = np.exp(2 * delta * np.arange(-3, 4))
    with pytest.raises(RatioViolation) as exc:
        nikolski_check(gauss_hardy, 1.0, c, 2, delta, t, -3)
    assert exc.value.index == -3
    t = np.array([1.0, 10.0, 10.5])
    with pytest.raises(RatioViolation) as exc:
        nikolski_check(gauss_hardy, 1.0, c, 2, delta, t, 0)
    assert exc.value.index == 1


def test_boundary_decay_gauss(gauss_hardy, c):
    rep = boundary_decay_check(gauss_hardy, 1.0, 0.5, c)
    assert rep.passed
    # |exp(−(±12 + iθ)²)| = e^{θ² − 144}
    assert rep.max_value == pytest.approx(math.exp(0.25 - 144), rel=1e-10)


def test_boundary_decay_flat_and_zero(c, zero):
    flat = PolarFunction(lambda r, th: np.exp(-c * np.log(r)) + 0j * th)
    rep = boundary_decay_check(flat, 1.0, 0.5, c)
    assert not rep.passed
    assert rep.max_value == pytest.approx(1.0)
    assert boundary_decay_check(zero, 1.0, 0.5, c).max_value == 0.0


@pytest.mark.parametrize("p", [1, 2])
@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.9])
def test_spectral_decay_gauss(gauss_hardy, c, p, alpha):
    rep = spectral_decay_relation(gauss_hardy, 1.0, c, p, alpha)
    assert rep.deviation <= 1e-6
    assert rep.normaliser == pytest.approx(math.sqrt(math.pi), rel=1e-10)


def test_spectral_decay_t0_row(gauss_hardy, c):
    rep = spectral_decay_relation(gauss_hardy, 1.0, c, 2, 0.5, t_grid=[-1.0, 0.0, 1.0])
    t, m0, shifted = rep.rows[1]
    assert t == 0.0 and shifted == pytest.approx(m0, rel=1e-12)


def test_spectral_decay_zero(zero, c):
    assert spectral_decay_relation(zero, 1.0, c, 2, 0.5).deviation == 0.0


def test_spectral_decay_detects_non_analytic(c):
    # exp(−(u − iθ)²) is anti-analytic; its ray spectra shift the wrong way
    G = lambda u, th: np.exp(-(np.asarray(u) - 1j * np.asarray(th)) ** 2)
    bad = PolarFunction(lambda r, th: np.exp(-c * np.log(r)) * G(np.log(r), th), c=c, log_form=G)
    assert spectral_decay_relation(bad, 1.0, c, 2, 0.5).deviation > 0.1


def test_restriction_spectrum_integrable(gauss_hardy, c):
    # ∫_0^∞ √π e^{−t²/4} dt = π
    S = mellin_forward(gauss_hardy.restriction(c), c, np.linspace(-20, 20, 401), sense="X2")
    assert np.max(np.abs(S.values[[0, -1]])) < 1e-12
    total = integrate_halfline(lambda t: np.abs(S(t)), 0.0, DEFAULT_CFG)
    assert total == pytest.approx(math.pi, rel=1e-6)
