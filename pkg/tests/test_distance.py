import math

import numpy as np
import pytest
from scipy.special import erfc

from mellin_lab import corpus
from mellin_lab.distance import (
    dist_tail,
    distance_audit,
    theorem6_bound,
    theorem6_case,
)
from mellin_lab.errors import NonConvergent, UnsupportedCombination
from mellin_lab.hardy import HardyNormEstimate, hardy_norm
from mellin_lab.polar import PolarFunction
from mellin_lab.quadrature import QuadratureConfig
from mellin_lab.transform import MellinSpectrum

C = 0.5


def unit_norm(a=1.0, p=2):
    return HardyNormEstimate(a, C, p, 1.0, [], [])


def gauss_spectrum(c=C):
    return MellinSpectrum(c, lambda v: math.sqrt(math.pi) * np.exp(-v * v / 4))


def test_box_tail():
    box = MellinSpectrum(C, lambda v: np.ones_like(v), 2.0, continuous=False)
    assert dist_tail(box, 1.0, 1) == pytest.approx(2.0, abs=1e-12)
    assert dist_tail(box, 1.0, 2) == pytest.approx(math.sqrt(2.0), abs=1e-12)
    assert dist_tail(box, 3.0, 1) == 0.0


def test_sampled_box_tail():
    v = np.linspace(-3, 3, 601)
    box = MellinSpectrum(C, None, 2.0, v, np.ones_like(v), continuous=False)
    assert dist_tail(box, 1.0, 1) == pytest.approx(2.0, abs=1e-12)


def test_gauss_tail_erfc():
    expected = math.sqrt(math.pi * math.sqrt(2 * math.pi) * erfc(math.sqrt(2)))
    assert dist_tail(gauss_spectrum(), 2.0, 2) == pytest.approx(expected, rel=1e-9)
    v = np.linspace(-20, 20, 4001)
    sampled = gauss_spectrum().sample(v)
    assert dist_tail(sampled, 2.0, 2) == pytest.approx(expected, rel=1e-5)


def test_gauss_tail_sup():
    assert dist_tail(gauss_spectrum(), 2.0, math.inf) == pytest.approx(math.sqrt(math.pi) / math.e)


def test_tail_monotone_and_width_bound():
    tri = MellinSpectrum(C, lambda v: np.maximum(1 - np.abs(v) / 3, 0.0), 3.0)
    for q in (1, 1.5, 2):
        vals = [dist_tail(tri, s, q) for s in (0.5, 1.0, 2.0, 2.9)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert vals[0] <= 6.0 ** (1 / q)


def test_holder_consistency():
    tri = MellinSpectrum(C, lambda v: np.maximum(1 - np.abs(v) / 3, 0.0), 3.0)
    sigma = 1.0
    width = 2 * (3.0 - sigma)
    d2 = dist_tail(tri, sigma, 2)
    for q in (1, 1.25, 1.5):
        assert dist_tail(tri, sigma, q) <= width ** (1 / q - 0.5) * d2 * (1 + 1e-12)


def test_tail_requires_resolved_grid():
    v = np.linspace(-3, 3, 61)
    S = MellinSpectrum(C, None, None, v, np.exp(-np.abs(v) / 10))
    with pytest.raises(NonConvergent):
        dist_tail(S, 1.0, 1)


def test_sup_needs_continuity():
    box = MellinSpectrum(C, lambda v: np.ones_like(v), 2.0, continuous=False)
    with pytest.raises(ValueError):
        dist_tail(box, 1.0, math.inf)
    with pytest.raises(ValueError):
        dist_tail(box, 0.0, 1)
    with pytest.raises(ValueError):
        dist_tail(box, 1.0, 0.5)


def test_theorem6_numbers():
    assert theorem6_bound(unit_norm(), 3.0, 2) == pytest.approx(2 * math.sqrt(math.pi) * math.exp(-3))
    assert theorem6_bound(unit_norm(), 3.0, 2) == pytest.approx(0.176490562, abs=1e-9)
    # σ = 0 plug-in for p = q = 1
    assert theorem6_bound(unit_norm(p=1), 0.0, 1) == pytest.approx(4.0)
    ratio = theorem6_bound(unit_norm(), 4.0, 2) / theorem6_bound(unit_norm(), 3.0, 2)
    assert ratio == pytest.approx(math.exp(-1))


def test_theorem6_cases():
    assert theorem6_case(1, math.inf) == "H1_general_q"
    assert theorem6_case(2, 2) == "H2_q2"
    assert theorem6_case(2, 1.5) == "H2_q_lt_2"
    for q in (2.5, math.inf):
        with pytest.raises(UnsupportedCombination):
            theorem6_bound(unit_norm(), 1.0, q)


def test_theorem6_q_lt_2_at_q_2_limit():
    # the q < 2 factor tends to 1 as q → 2
    near = theorem6_bound(unit_norm(), 1.0, 2 - 1e-9)
    assert near == pytest.approx(theorem6_bound(unit_norm(), 1.0, 2), rel=1e-6)


def test_gauss_audit_q2(gauss_hardy):
    reps = distance_audit(gauss_hardy, 1.0, C, 2, [1, 2, 4, 6], 2)
    assert all(r.slack >= 0 for r in reps)
    assert [r.bound_kind for r in reps] == ["H2_q2"] * 4
    # dist/bound behaves like e^{σ − σ²/4}, falling from σ = 2 on
    reps = distance_audit(gauss_hardy, 1.0, C, 2, [2, 4, 6, 8], 2, spectrum=gauss_spectrum())
    ratios = [r.dist_value / r.bound_value for r in reps]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))


def test_gauss_audit_beats_exponential(gauss_hardy):
    (rep,) = distance_audit(gauss_hardy, 1.0, C, 2, [8.0], 2, spectrum=gauss_spectrum())
    assert rep.dist_value / rep.bound_value < 1e-4


def test_gauss_audit_p1_all_q(gauss_hardy):
    for q in (1, 1.5, 2, math.inf):
        reps = distance_audit(gauss_hardy, 1.0, C, 1, [1, 2, 4], q, spectrum=gauss_spectrum())
        assert all(r.slack >= 0 for r in reps)
    (inf_rep,) = distance_audit(gauss_hardy, 1.0, C, 1, [2.0], math.inf, spectrum=gauss_spectrum())
    assert "grid supremum" in inf_rep.note


def test_lorentz_audit_closed_spectrum():
    e = corpus.get("lorentz-hardy")
    f, S = e.polar(C), e.spectrum(C)
    # the 1/u² tail only settles the p = 1 ray norms to about 1e-3
    h = hardy_norm(f, e.hardy_a, C, 1, cfg=QuadratureConfig(abs_tol=1e-3))
    for q in (1, 1.5, 2):
        reps = distance_audit(f, e.hardy_a, C, 1, [1, 2, 4, 6], q, hardy=h, spectrum=S)
        assert min(r.slack for r in reps) >= 0


def test_zero_audit(gauss_hardy):
    zero = PolarFunction(lambda r, th: np.zeros(np.broadcast(r, th).shape, dtype=complex))
    reps = distance_audit(zero, 1.0, C, 2, [1.0, 2.0], 2, t_grid=np.linspace(-5, 5, 101))
    assert all(r.dist_value == 0 and r.bound_value == 0 for r in reps)


def test_report_dict(gauss_hardy):
    (rep,) = distance_audit(gauss_hardy, 1.0, C, 2, [1.0], 2, spectrum=gauss_spectrum())
    d = rep.to_dict()
    assert d["slack"] == pytest.approx(d["bound_value"] - d["dist_value"])
    assert d["bound_kind"] == "H2_q2"
