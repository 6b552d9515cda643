import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soi.spectra import (Spectrum, SpectrumError, entropy_report, linear_entropy, negentropy,
                         normalize_entropy, normalized_von_neumann, von_neumann_entropy)


def test_construction_and_validation():
    s = Spectrum([0.25, 0.75])
    assert s.dim == 2 and s.values == (0.25, 0.75)
    with pytest.raises(SpectrumError):
        Spectrum([1.0])
    with pytest.raises(SpectrumError):
        Spectrum([0.6, 0.6])
    with pytest.raises(SpectrumError):
        Spectrum([1.2, -0.2])


def test_near_normalized_input_is_renormalized():
    s = Spectrum([0.5 + 4e-10, 0.5])
    assert abs(math.fsum(s.values) - 1.0) < 1e-12
    with pytest.raises(SpectrumError):
        Spectrum([0.5 + 1e-8, 0.5])


@pytest.mark.parametrize("lam, expected", [
    ((1, 0), 0.0),
    ((0.5, 0.5), 1.0),
    ((0.5, 0.25, 0.25), 1.5),
])
def test_von_neumann_bits(lam, expected):
    assert von_neumann_entropy(lam, base=2) == pytest.approx(expected, abs=1e-15)


def test_von_neumann_nats_matches_bits():
    lam = (0.2, 0.3, 0.5)
    assert von_neumann_entropy(lam) == pytest.approx(von_neumann_entropy(lam, 2) * math.log(2), rel=1e-15)


@pytest.mark.parametrize("lam, expected", [
    ((1, 0), 0.0),
    ((0.5, 0.5), 0.5),
    ((1 / 3, 1 / 3, 1 / 3), 2 / 3),
])
def test_linear_entropy(lam, expected):
    assert linear_entropy(lam) == pytest.approx(expected, abs=1e-15)


def test_negentropy():
    assert negentropy((0.5, 0.5)) == pytest.approx(0.0, abs=1e-15)
    assert negentropy((1, 0), base=2) == pytest.approx(1.0)
    # log2(3) - 1.5
    assert negentropy((0.5, 0.25, 0.25), base=2) == pytest.approx(0.08496250072115608, rel=1e-12)


def test_normalize_entropy():
    third = (1 / 3, 1 / 3, 1 / 3)
    assert normalize_entropy(von_neumann_entropy(third), third) == pytest.approx(1.0)
    assert normalize_entropy(linear_entropy((1, 0, 0)), (1, 0, 0), "linear") == 0.0
    lam = (0.5, 0.25, 0.25)
    # 1.5 / log2(3)
    assert normalize_entropy(von_neumann_entropy(lam, 2), lam, base=2) == pytest.approx(
        0.9463946303571862, rel=1e-12)
    with pytest.raises(ValueError):
        normalize_entropy(2.0, (0.5, 0.5), "linear")


def test_entropy_report_identities():
    r = entropy_report((0.6, 0.3, 0.1))
    assert r.purity + r.linear == 1.0
    assert r.negentropy_nats == pytest.approx(math.log(3) - r.von_neumann_nats)
    assert r.von_neumann_bits == pytest.approx(r.von_neumann_nats / math.log(2))


spectra = st.integers(2, 6).flatmap(
    lambda n: st.lists(st.floats(0.0, 1.0), min_size=n, max_size=n).filter(lambda v: sum(v) > 1e-3)
).map(lambda v: Spectrum(np.array(v) / math.fsum(v)))


@settings(max_examples=200, deadline=None)
@given(spectra)
def test_normalized_entropies_in_unit_interval(s):
    r = entropy_report(s)
    assert 0.0 <= r.normalized_von_neumann <= 1.0
    assert 0.0 <= r.normalized_linear <= 1.0


@settings(max_examples=100, deadline=None)
@given(spectra, st.randoms(use_true_random=False))
def test_permutation_invariance(s, rnd):
    vals = list(s.values)
    rnd.shuffle(vals)
    assert von_neumann_entropy(vals) == pytest.approx(von_neumann_entropy(s), abs=1e-14)
    assert linear_entropy(vals) == pytest.approx(linear_entropy(s), abs=1e-14)


def test_extremes_of_normalized_entropy():
    for n in range(2, 7):
        assert normalized_von_neumann(Spectrum.pure(n, n - 1)) == 0.0
        assert normalized_von_neumann(Spectrum.maximally_mixed(n)) == pytest.approx(1.0, abs=1e-15)
    assert normalized_von_neumann((0.5, 0.5, 0.0)) < 1.0
    assert normalized_von_neumann((0.999, 0.001)) > 0.0


def test_concavity(rng):
    for _ in range(100):
        n = int(rng.integers(2, 6))
        a, b = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
        for t in (0.25, 0.5, 0.75):
            mix = von_neumann_entropy(t * a + (1 - t) * b)
            assert mix >= t * von_neumann_entropy(a) + (1 - t) * von_neumann_entropy(b) - 1e-12
