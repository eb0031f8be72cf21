import numpy as np
import pytest

from conftest import MODELS, make_chain, rpoint
from openbethe.chain import (
    ChainSpec,
    DimensionCapError,
    build_double_row,
    build_T,
    build_T_inverse_at_iota,
    ideal_vectors,
    lambda_prime,
    nested_operator,
    nested_operator_closed,
    pseudo_vacuum,
    verify_nested_reflection,
)
from openbethe.checks import chain_checks
from openbethe.functions import BoundaryParams, rational


@pytest.mark.parametrize("family", ["rational", "trigonometric"])
@pytest.mark.parametrize("mn", MODELS)
def test_chain_checks(family, mn):
    a_minus = 1 if sum(mn) < 3 else 2
    chain = make_chain(family, *mn, L=2, a_minus=a_minus)
    bad = [(c.name, c.residual) for c in chain_checks(chain, samples=4, seed=3) if not c.passed]
    assert not bad


@pytest.mark.parametrize("family", ["rational", "trigonometric"])
def test_inverse_monodromy(family, rng):
    chain = make_chain(family, 2, 1, L=2)
    u = rpoint(chain.model, rng)
    T = build_T(chain, chain.model.iota(u))
    Ti = build_T_inverse_at_iota(chain, u)
    assert np.allclose((T @ Ti).mat, np.eye(T.dim), atol=1e-10)


@pytest.mark.parametrize("family", ["rational", "trigonometric"])
@pytest.mark.parametrize("mn", [(3, 0), (2, 1), (1, 2), (2, 2)])
def test_nested_operator_forms_agree(family, mn, rng):
    chain = make_chain(family, *mn, L=1, a_minus=2)
    u = rpoint(chain.model, rng)
    for k in range(1, chain.model.N + 1):
        A, B = nested_operator(chain, k, u), nested_operator_closed(chain, k, u)
        assert np.linalg.norm((A - B).mat) <= 1e-10 * A.norm()


@pytest.mark.parametrize("family", ["rational", "trigonometric"])
def test_lambda_prime_closed_form_for_even_indices(family, rng):
    chain = make_chain(family, 2, 2, L=2)
    u = rpoint(chain.model, rng)
    for j in (1, 2):
        num, closed = lambda_prime(chain, j, u), lambda_prime(chain, j, u, "closed_form")
        assert abs(num - closed) <= 1e-10 * abs(num)


def test_nested_reflection_detects_wrong_R():
    # replacing the barred R by the plain one must break the level-2 equation
    import openbethe.chain as C

    chain = make_chain("rational", 3, 0, L=2)
    rng = np.random.default_rng(0)
    vecs = ideal_vectors(chain, 2, rng, count=3)
    good = verify_nested_reflection(chain, 2, 0.3 + 0.1j, -0.5 + 0.7j, vecs)
    orig = C._reduced_pair

    def bad(model, u1, u2, k, fs):
        out = orig(model, u1, u2, k, fs)
        out[(True, "21")] = out[(False, "21")]
        return out

    C._reduced_pair = bad
    try:
        broken = verify_nested_reflection(chain, 2, 0.3 + 0.1j, -0.5 + 0.7j, vecs)
    finally:
        C._reduced_pair = orig
    assert good < 1e-12 and broken > 1e-3


def test_vacuum_and_cap():
    chain = ChainSpec(rational(2, 1), 2, [0.1, 0.2])
    om = pseudo_vacuum(chain)
    assert om[0] == 1 and np.linalg.norm(om) == 1
    with pytest.raises(DimensionCapError):
        ChainSpec(rational(2, 2), 7, [0.0] * 7)
    with pytest.raises(ValueError):
        ChainSpec(rational(2, 0), 2, [0.1])
    with pytest.raises(ValueError):
        ChainSpec(rational(2, 0), 1, [0.1], BoundaryParams(a_minus=3))


def test_double_row_is_even():
    chain = make_chain("rational", 1, 2, L=2)
    assert build_double_row(chain, 0.3 + 0.2j).odd_part_norm() < 1e-12
