"""Limit-law algebra, closed-form moments, samplers, factorization checks."""

import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.stats

from polyaurn.laws import (
    UnsupportedLawError,
    bessel_params_from_urn,
    beta_law,
    decomposition_for,
    dirichlet_law,
    gen_gamma_law,
    local_time_law,
    mixed_moment_at,
    ml3_law,
    moment_at,
    powered_law,
    product_law,
    sample,
    scaled_law,
    tilted_law,
    verify_decomposition,
    verify_multicolor_decomposition,
)
from polyaurn.urns import multicolor_polya_young, polya_young, triangular

STD = polya_young(2, 1, 1, 1, 1)
TRI = triangular(2, 1, 1, 2, 1, 1)


def test_gen_gamma_moment_frozen():
    # E[X^s] = Gamma((a+s)/b)/Gamma(a/b); a=4, b=3, s=3 telescopes to 4/3
    assert moment_at(gen_gamma_law(4, 3), 3) == pytest.approx(4 / 3, rel=1e-14)


def test_leaf_moments_match_scipy():
    bl = beta_law(2.5, 1.5)
    frozen = scipy.stats.beta(2.5, 1.5)
    for s in (1, 2, 3, 4):
        assert moment_at(bl, s) == pytest.approx(frozen.moment(s), rel=1e-12)
    gg = gen_gamma_law(4.0, 3.0)
    frozen = scipy.stats.gengamma(4.0 / 3.0, 3.0)
    for s in (1, 2, 3, 4):
        assert moment_at(gg, s) == pytest.approx(frozen.moment(s), rel=1e-12)


def test_law_algebra_moment_relations():
    base = beta_law(2.0, 3.0)
    for s in (1, 2, 3):
        assert moment_at(scaled_law(base, 2.5), s) == pytest.approx(
            2.5**s * moment_at(base, s), rel=1e-13
        )
        assert moment_at(powered_law(base, 0.5), s) == pytest.approx(
            moment_at(base, 0.5 * s), rel=1e-13
        )
        assert moment_at(tilted_law(base, 2.0), s) == pytest.approx(
            moment_at(base, s + 2.0) / moment_at(base, 2.0), rel=1e-13
        )
        prod = product_law(base, gen_gamma_law(4, 3))
        assert moment_at(prod, s) == pytest.approx(
            moment_at(base, s) * moment_at(gen_gamma_law(4, 3), s), rel=1e-13
        )
    assert tilted_law(base, 0) is base


def test_positive_parameter_validation():
    with pytest.raises(ValueError):
        beta_law(0, 1)
    with pytest.raises(ValueError):
        gen_gamma_law(1, -2)


def test_local_time_moments():
    lt = local_time_law(0.8, 0.4)  # alpha/beta = 2, real orders allowed
    assert moment_at(lt, 1) == pytest.approx(
        0.8 / (0.4 * math.gamma(1.8)), rel=1e-13
    )
    # integer orders via the product formula
    m2 = moment_at(lt, 2)
    assert m2 > 0
    # real orders go through the Gauss-multiplication route
    assert moment_at(lt, 2.0) == pytest.approx(m2, rel=1e-13)
    assert moment_at(lt, 1.5) > 0
    bad = local_time_law(0.7, 0.3)  # alpha/beta not an integer
    assert moment_at(bad, 2) > 0  # integers still fine
    with pytest.raises(UnsupportedLawError):
        moment_at(bad, 2.5)


def test_samplers_match_scipy_distributions():
    rng = np.random.Generator(np.random.PCG64(1234))
    xs = sample(beta_law(2.0, 3.0), rng, 20_000)
    assert scipy.stats.kstest(xs, scipy.stats.beta(2.0, 3.0).cdf).pvalue > 1e-3
    xs = sample(gen_gamma_law(4.0, 3.0), rng, 20_000)
    assert scipy.stats.kstest(xs, scipy.stats.gengamma(4.0 / 3.0, 3.0).cdf).pvalue > 1e-3
    # scaled/powered/product transforms act on the samples
    xs = sample(scaled_law(beta_law(2.0, 3.0), 2.0), rng, 20_000)
    assert scipy.stats.kstest(xs, lambda t: scipy.stats.beta(2.0, 3.0).cdf(t / 2.0)).pvalue > 1e-3
    ds = sample(dirichlet_law((1.0, 2.0, 3.0)), rng, 500)
    assert ds.shape == (500, 3)
    assert np.allclose(ds.sum(axis=1), 1.0)
    with pytest.raises(UnsupportedLawError):
        sample(ml3_law(0.5, 1.0, 1.0), rng, 10)


def test_dirichlet_mixed_moments():
    dl = dirichlet_law((1.0, 2.0, 3.0))
    # E[X_0] = 1/6, E[X_0 X_1] = (1*2)/(6*7)
    assert mixed_moment_at(dl, (1, 0, 0)) == pytest.approx(1 / 6, rel=1e-13)
    assert mixed_moment_at(dl, (1, 1, 0)) == pytest.approx(2 / 42, rel=1e-13)
    with pytest.raises(UnsupportedLawError):
        moment_at(dl, 2)


def test_bessel_params_frozen():
    bp = bessel_params_from_urn(STD)
    assert (bp.dimension, bp.index) == pytest.approx((2 / 3, -0.5), rel=1e-13)
    assert bp.alpha == pytest.approx(1 - bp.dimension / 2, rel=1e-13)
    assert bp.beta == pytest.approx(bp.alpha / (1 - 2 * bp.index), rel=1e-13)
    bp = bessel_params_from_urn(TRI)
    assert (bp.dimension, bp.index, bp.alpha, bp.beta) == pytest.approx(
        (0.4, -0.5, 0.8, 0.4), rel=1e-13
    )


DECOMPOSITION_SPECS = [
    (polya_young(2, 1, 1, 1, 1), "beta_gengamma"),
    (polya_young(3, 1, 2, 1, 1), "beta_gengamma"),
    (polya_young(2, 1, Fraction(1, 2), 1, 1), "beta_local_time"),
    (polya_young(2, 2, 1, 1, 1), "beta_local_time"),
    (triangular(2, 1, 1, 3, 1, 1), "ml_gengamma"),
    (triangular(2, 1, 1, 2, 1, 1), "ml_local_time"),
]


@pytest.mark.parametrize("spec,label", DECOMPOSITION_SPECS)
def test_decompositions_match_limit_moments(spec, label):
    report = verify_decomposition(spec, smax=6)
    assert report.label == label
    assert report.max_rel_error < 1e-9
    if report.expected_scale is not None:
        assert report.scale_rel_error < 1e-9


def test_multicolor_decomposition_matches_mixed_moments():
    spec = multicolor_polya_young(2, 1, 2, (1, 1, 1))
    dec = decomposition_for(spec)
    assert dec.label == "dirichlet_gengamma"
    rows = verify_multicolor_decomposition(
        spec, [(1, 0, 0), (2, 0, 0), (1, 1, 0), (2, 1, 0), (3, 2, 0)]
    )
    for _, lhs, rhs, rel in rows:
        assert rel < 1e-9, (lhs, rhs)
    with pytest.raises(UnsupportedLawError):
        decomposition_for(multicolor_polya_young(2, 2, 1, (1, 1, 1)))
