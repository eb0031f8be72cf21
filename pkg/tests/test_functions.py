import numpy as np
import pytest

from conftest import MODELS, make_model, rpoint
from openbethe.functions import PoleError, check_identities, m_matrix, rational, spectral_transform, trigonometric


@pytest.mark.parametrize("family", ["rational", "trigonometric"])
@pytest.mark.parametrize("mn", MODELS)
def test_identities(family, mn):
    model = make_model(family, *mn)
    res = check_identities(model, trials=100, seed=1)
    assert max(res.values()) <= 1e-12, res


@pytest.mark.parametrize("family", ["rational", "trigonometric"])
def test_shift_inverses(family, rng):
    model = make_model(family, 2, 1)
    for _ in range(10):
        u = rpoint(model, rng)
        for k in (1, 2, 3):
            assert abs(model.down(model.up(u, k), k) - u) < 1e-12 * max(1, abs(u))
        assert abs(model.iota(model.iota(u)) - u) < 1e-12 * max(1, abs(u))
        assert abs(model.up_range(u, 3, 2) - u) == 0


def test_spectral_transform_front_end():
    model = rational(2, 1, 1.0)
    assert spectral_transform(model, "iota", 0.3) == -0.3
    assert spectral_transform(model, "up", 0.3, k=3) == pytest.approx(0.3 - 0.5)
    assert spectral_transform(model, "tilde", 0.3) == pytest.approx(0.3 - 0.5)


def test_rational_values():
    model = rational(2, 0, 1.0)
    assert model.b(0.7, 0.2) == pytest.approx(0.5)
    assert model.a(1, 0.7, 0.2) == pytest.approx(-0.5)
    assert rational(1, 1).a(2, 0.7, 0.2) == pytest.approx(1.5)


def test_pole_reporting():
    model = trigonometric(2, 0, 0.7)
    with pytest.raises(PoleError):
        model.b(0.0, 1.0)
    rat = rational(2, 1, 1.0)
    with pytest.raises(PoleError):
        rat.f(1, 0.4, 0.4)


def test_m_matrix_rational_identity():
    assert np.allclose(m_matrix(rational(2, 2)).mat, np.eye(4))
    M = m_matrix(trigonometric(3, 0, 0.5)).mat
    assert np.allclose(M, np.diag(np.diag(M)))
