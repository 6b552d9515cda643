import math

import numpy as np
import pytest

from soi.volume import (closed_form_volume, monte_carlo_volume, monte_carlo_volumes,
                        normalized_volume, quadrature_volume, uniform_draws)
from soi.spectra import normalized_linear, normalized_von_neumann
from soi.unitary import special_orthogonal, special_unitary_2

SU2 = special_unitary_2()
SO3 = special_orthogonal(3)


def so3_grid(step):
    m = int(round(1 / step))
    return [(i / m, j / m, (m - i - j) / m) for i in range(m + 1) for j in range(m + 1 - i)]


def test_closed_form_examples():
    assert closed_form_volume("SU_2", (0.5, 0.5)).value == pytest.approx(2 * math.pi**2, rel=1e-15)
    # (pi^2 / 4) (2/3)^(3/2)
    assert closed_form_volume("SO_3", (1 / 3,) * 3).value == pytest.approx(1.3430830414331163, rel=1e-12)
    for lam in [(0.9, 0.1), (0.3, 0.7)]:
        assert closed_form_volume("SO_2", lam).value == pytest.approx(math.pi / 2)
    assert closed_form_volume("SU_2", (1, 0)).value == 0.0
    assert closed_form_volume("SO_N_product", (0.25,) * 4).value == pytest.approx(0.5**3)
    with pytest.raises(ValueError):
        closed_form_volume("SO_3", (0.5, 0.5))
    with pytest.raises(ValueError):
        closed_form_volume("SU_3", (0.5, 0.5))


def test_normalized_volume_examples():
    assert normalized_volume("SU_2", (0.5, 0.5)) == pytest.approx(1.0)
    assert normalized_volume("SO_N_product", (1, 0, 0, 0)) == 0.0
    assert normalized_volume("SO_N_product", (0, 1, 0)) == 0.0
    assert normalized_volume("SO_2", (0.9, 0.1)) == 1.0
    # sqrt(0.75 * 0.75 * 0.5) / sqrt((2/3)^3)
    assert normalized_volume("SO_3", (0.5, 0.25, 0.25)) == pytest.approx(0.9742785792574936, rel=1e-12)
    assert normalized_volume("SO_3", (0.5, 0.3, 0.2)) == pytest.approx(
        normalized_volume("SO_N_product", (0.5, 0.3, 0.2)))


def test_quadrature_examples():
    assert quadrature_volume((0.7, 0.3), SU2, 32).value == pytest.approx(4 * math.pi**2 * math.sqrt(0.21),
                                                                          rel=1e-8)
    lam = (0.5, 0.3, 0.2)
    assert quadrature_volume(lam, SO3, 32).value == pytest.approx(closed_form_volume("SO_3", lam).value,
                                                                  rel=1e-8)
    assert quadrature_volume((1, 0), SU2, 32).value < 1e-10
    assert quadrature_volume((0.6, 0.4), special_orthogonal(2), 8).value == pytest.approx(math.pi / 2)
    with pytest.raises(ValueError):
        quadrature_volume((0.25,) * 4, special_orthogonal(4))


def test_quadrature_oracle_grid():
    for l1 in np.linspace(0.0, 1.0, 20):
        lam = (l1, 1 - l1)
        q = quadrature_volume(lam, SU2, 16).value
        assert q == pytest.approx(closed_form_volume("SU_2", lam).value, rel=1e-6, abs=1e-12)
    for lam in so3_grid(1 / 5)[:20]:
        q = quadrature_volume(lam, SO3, 16).value
        assert q == pytest.approx(closed_form_volume("SO_3", lam).value, rel=1e-6, abs=1e-12)


def test_monte_carlo_against_closed_form():
    r = monte_carlo_volume((0.5, 0.5), SU2, 1_000_000, seed=11)
    assert abs(r.value - 2 * math.pi**2) < 3 * r.std_error
    assert r.method == "monte_carlo" and r.seed == 11 and r.samples_or_nodes == 1_000_000
    r = monte_carlo_volume((1 / 3,) * 3, SO3, 1_000_000, seed=12)
    assert abs(r.value - closed_form_volume("SO_3", (1 / 3,) * 3).value) < 3 * r.std_error


def test_monte_carlo_determinism_and_seed_spread():
    a = monte_carlo_volume((0.6, 0.3, 0.1), SO3, 20_000, seed=5)
    b = monte_carlo_volume((0.6, 0.3, 0.1), SO3, 20_000, seed=5)
    assert a == b
    c = monte_carlo_volume((0.6, 0.3, 0.1), SO3, 20_000, seed=6)
    assert a.value != c.value
    assert abs(a.value - c.value) < 6 * math.hypot(a.std_error, c.std_error)


def test_monte_carlo_independent_of_threads_and_batching():
    spectra = [(0.6, 0.3, 0.1), (0.2, 0.2, 0.6)]
    serial = monte_carlo_volumes(spectra, SO3, 30_000, seed=9, threads=1)
    parallel = monte_carlo_volumes(spectra, SO3, 30_000, seed=9, threads=4)
    single = [monte_carlo_volume(s, SO3, 30_000, seed=9) for s in spectra]
    assert serial == parallel == single


def test_draw_stream_is_keyed_by_sample_index():
    whole = uniform_draws(SO3, 3, 0, 100)
    assert np.array_equal(whole[37:90], uniform_draws(SO3, 3, 37, 53))
    lo = np.array([b[0] for b in SO3.bounds])
    hi = np.array([b[1] for b in SO3.bounds])
    assert np.all((whole >= lo) & (whole <= hi))


def test_vanishing_on_pure_states():
    for n in range(3, 8):
        for i in range(n):
            pure = [0.0] * n
            pure[i] = 1.0
            assert closed_form_volume("SO_N_product", pure).value == 0.0
    assert closed_form_volume("SO_3", (0, 0, 1)).value == 0.0


def test_maximal_only_at_maximally_mixed():
    for l1 in np.linspace(0, 1, 201):
        v = normalized_volume("SU_2", (l1, 1 - l1))
        assert v <= 1.0
        if abs(l1 - 0.5) > 1e-9:
            assert v < 1.0
    for lam in so3_grid(1 / 30):
        v = normalized_volume("SO_3", lam)
        assert v <= 1.0
        if max(abs(x - 1 / 3) for x in lam) > 1e-9:
            assert v < 1.0
    assert normalized_volume("SO_3", (1 / 3,) * 3) == pytest.approx(1.0, abs=1e-15)


def test_volume_upper_bounds_entropies():
    for l1 in np.linspace(0, 1, 200):
        lam = (l1, 1 - l1)
        v = normalized_volume("SU_2", lam)
        assert v >= normalized_von_neumann(lam) - 1e-12
        assert v >= normalized_linear(lam) - 1e-12
    for lam in so3_grid(1 / 19):  # 210 points
        v = normalized_volume("SO_3", lam)
        assert v >= normalized_von_neumann(lam) - 1e-12
        assert v >= normalized_linear(lam) - 1e-12


def test_concave_in_purity():
    l1 = np.round(np.arange(0, 101) * 0.01, 12)
    v = np.array([closed_form_volume("SU_2", (x, 1 - x)).value for x in l1])
    assert np.diff(v, 2).max() <= 1e-9
    v = np.array([closed_form_volume("SO_3", (x, (1 - x) / 2, (1 - x) / 2)).value for x in l1])
    assert np.diff(v, 2).max() <= 1e-9
