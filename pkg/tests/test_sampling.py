import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import log_signal
from mellin_lab import corpus
from mellin_lab.errors import DomainError, MissingSample
from mellin_lab.sampling import (
    default_probes,
    lin_kernel,
    reconstruct,
    reconstruct_weighted,
    remainder_bound,
    remainder_measure,
    sample_signal,
    sampling_report,
    truncation_allowance,
)
from mellin_lab.transform import MellinSpectrum

C = 0.5
# 2 erfc(2): (1/π)·2√π ∫_4^∞ e^{−t²/4} dt
GAUSS_TAIL_AT_4 = 0.009355469962094532


def gauss_spectrum(c=C):
    return MellinSpectrum(c, lambda t: math.sqrt(math.pi) * np.exp(-t * t / 4))


def test_lin_kernel_values():
    assert lin_kernel(0.3, 1.0) == 1.0
    for k in (-2, -1, 1, 2):
        assert abs(lin_kernel(0.0, math.exp(k))) < 1e-15
    assert lin_kernel(0.0, math.exp(0.5)) == pytest.approx(2 / math.pi, rel=1e-15)
    assert lin_kernel(1.0, math.e ** 0.5) == pytest.approx(math.exp(-0.5) * 2 / math.pi, rel=1e-14)


def test_lin_kernel_taylor_branch_is_continuous():
    x = np.exp(np.array([-2e-6, -1e-6 + 1e-12, 1e-6 - 1e-12, 1e-6, 2e-6]))
    vals = lin_kernel(0.0, x)
    exact = np.sin(math.pi * np.log(x)) / (math.pi * np.log(x))
    np.testing.assert_allclose(vals, exact, rtol=1e-15)


def test_lin_kernel_domain():
    with pytest.raises(DomainError):
        lin_kernel(0.5, 0.0)
    with pytest.raises(DomainError):
        lin_kernel(0.5, np.array([1.0, -2.0]))


def test_reconstruct_single_sample_is_lin():
    samples = {k: (1.0 if k == 0 else 0.0) for k in range(-3, 4)}
    x = np.exp(np.linspace(-4, 4, 33))
    for n in (0, 3):
        np.testing.assert_allclose(reconstruct(samples, C, 1.0, x, n).real, lin_kernel(C, x),
                                   rtol=1e-14, atol=1e-300)


def test_reconstruct_is_exact_at_nodes():
    g = corpus.get("sinc2").signal(C)
    T, n = 1 / math.pi, 50
    raw = sample_signal(g, T, n)
    j = np.arange(-10, 11)
    x = np.exp(j / T)
    got = reconstruct(raw, C, T, x, n)
    want = np.array([raw[k] for k in j])
    # every other node is an exact zero of sinc²; compare against the largest sample
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-12 * np.max(np.abs(want)))


@pytest.mark.parametrize("cid,T", [("linc", 1.0), ("sinc2", 1 / math.pi), ("log-gauss-hardy", 1.5),
                                   ("lorentz-hardy", 2.0)])
def test_weighted_node_exactness(cid, T):
    g = corpus.get(cid).signal(C)
    n = 400
    G = sample_signal(g, T, n, weighted=True)
    u = np.arange(-n, n + 1) / T
    vals = np.array([G[k] for k in range(-n, n + 1)])
    err = np.abs(reconstruct_weighted(G, T, u, n) - vals)
    assert np.max(err) <= 1e-12 * np.max(np.abs(vals))


def test_missing_sample():
    samples = {k: 1.0 for k in range(-3, 4) if k != 2}
    with pytest.raises(MissingSample) as exc:
        reconstruct(samples, C, 1.0, 2.0, 3)
    assert exc.value.k == 2
    with pytest.raises(MissingSample):
        reconstruct_weighted(samples, 1.0, [0.0], 3)


def test_remainder_bound_gauss_erfc():
    T = 4 / math.pi
    assert remainder_bound(gauss_spectrum(), C, T, 1.0) == pytest.approx(GAUSS_TAIL_AT_4, rel=1e-10)


def test_remainder_bound_scales_like_power():
    T = 4 / math.pi
    b1, b2 = remainder_bound(gauss_spectrum(), C, T, np.array([0.7, 1.4]))
    assert b2 / b1 == pytest.approx(2 ** -C, rel=1e-14)


def test_remainder_bound_zero_for_bandlimited():
    tri = MellinSpectrum(C, lambda t: np.maximum(1 - np.abs(t), 0.0), 1.0)
    assert remainder_bound(tri, C, 1 / math.pi, 3.0) == 0.0


def test_sinc2_report():
    g = corpus.get("sinc2").signal(C)
    x = np.exp(np.linspace(math.log(0.2), math.log(5.0), 301))
    rep = sampling_report(g, C, 1 / math.pi, 200, x)
    assert rep.bound == 0.0
    assert rep.slack >= 0
    assert rep.max_abs_error <= rep.truncation
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["n"] == 200 and d["n_probes"] == 301


def test_bandlimited_remainder_small():
    g = corpus.get("sinc2").signal(C)
    T, n = 1 / math.pi, 400
    u = np.log(default_probes())
    G = sample_signal(g, T, n, weighted=True)
    assert np.max(np.abs(g.weighted(u) - reconstruct_weighted(G, T, u, n))) < 1e-8


def test_oversampling_does_not_hurt():
    g = corpus.get("sinc2").signal(C)
    u = np.log(default_probes())
    errs = []
    for T in (1 / math.pi, 1.5 / math.pi, 2 / math.pi):
        G = sample_signal(g, T, 400, weighted=True)
        errs.append(np.max(np.abs(g.weighted(u) - reconstruct_weighted(G, T, u, 400))))
    assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))


def test_gauss_report_within_bound():
    g = corpus.get("log-gauss").signal(C)
    rep = sampling_report(g, C, 1.0, 400)
    assert rep.slack >= 0
    assert rep.max_abs_error <= rep.bound


def test_truncation_allowance_vanishes_for_long_series():
    g = corpus.get("log-gauss-hardy").signal(C)
    # samples e^{−(k/T)²} beyond |k| = 400 are far below double precision
    assert np.max(truncation_allowance(g, C, 1.0, [0.0, 1.0], 400)) == 0.0
    lor = corpus.get("lorentz-hardy").signal(C)
    small, large = (np.max(truncation_allowance(lor, C, 1.0, [0.0], n)) for n in (100, 400))
    assert large < small < 1e-2


def test_gauss_hardy_measures_below_distance():
    e = corpus.get("log-gauss-hardy")
    rep = remainder_measure(e.polar(C), 1.0, C, [1, 1.5, 2, 2.5])
    for row in rep.rows:
        assert row["measure"] <= row["dist_bound"]
    assert rep.decay_slope < -(1.0 * math.pi)


def test_lorentz_decay_slope():
    e = corpus.get("lorentz-hardy")
    rep = remainder_measure(e.polar(C), e.spectral_rate, C, [1, 1.5, 2, 2.5], spectrum=e.spectrum(C))
    assert rep.reference_slope == pytest.approx(-math.pi)
    assert rep.slope_rel_error <= 0.1
    assert rep.min_slack >= 0


def test_slow_tail_decays_slower():
    e = corpus.get("slow-tail")
    rep = remainder_measure(e.signal(C), 1.0, C, [1, 1.5, 2, 2.5], spectrum=e.spectrum(C))
    assert abs(rep.decay_slope) <= math.pi
    assert rep.decay_slope < 0
    assert rep.min_slack >= 0


def test_remainder_measure_needs_increasing_list():
    g = corpus.get("log-gauss-hardy").polar(C)
    with pytest.raises(ValueError):
        remainder_measure(g, 1.0, C, [1, 2])
    with pytest.raises(ValueError):
        remainder_measure(g, 1.0, C, [1, 3, 2])


@settings(max_examples=25, deadline=None)
@given(st.integers(-30, 30), st.floats(0.5, 3.0))
def test_node_interpolation_property(j, T):
    # any sample values are reproduced: the sinc basis is cardinal
    rng = np.random.default_rng(abs(j))
    n = 30
    G = {k: complex(v) for k, v in zip(range(-n, n + 1), rng.standard_normal(2 * n + 1))}
    got = reconstruct_weighted(G, T, [j / T], n)[0]
    assert abs(got - G[j]) <= 1e-12 * max(abs(v) for v in G.values())


def test_log_signal_helper_matches_corpus():
    g = log_signal(lambda u: np.sinc(u / (2 * math.pi)) ** 2, C)
    ref = corpus.get("sinc2").signal(C)
    x = np.exp(np.linspace(-3, 3, 11))
    np.testing.assert_allclose(g(x), ref(x), rtol=1e-14)
