import numpy as np
import pytest

from conftest import make_chain, rpoint
from openbethe.bethe import BetheState, BetheSystem, solve
from openbethe.chain import pseudo_vacuum
from openbethe.transfer import default_samples
from openbethe.vectors import (
    ZeroVectorError,
    compare_vectors,
    phi3_11,
    vector_aba,
    vector_recursion,
    vector_supertrace,
    verify_eigenvector,
)

FAMILIES = ["rational", "trigonometric"]


def _parallel(v1, v2):
    _, ratio = compare_vectors(v1, v2)
    return compare_vectors(ratio * v1, v2)[0]


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("mn", [(2, 0), (1, 1)])
def test_rank_one_constructions_agree(family, mn):
    chain = make_chain(family, *mn, L=2)
    for st in solve(chain, [1], seed=0):
        va, vr, vs = (f(chain, st) for f in (vector_aba, vector_recursion, vector_supertrace))
        assert compare_vectors(va.vector, vr.vector)[0] <= 1e-10
        assert compare_vectors(va.vector, vs.vector)[0] <= 1e-10
        assert verify_eigenvector(chain, va, default_samples(chain)) <= 1e-8


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("mn", [(2, 0), (3, 0), (2, 1), (1, 2)])
def test_zero_magnons_give_vacuum(family, mn):
    chain = make_chain(family, *mn, L=2)
    st = BetheState.empty(chain.model)
    om = pseudo_vacuum(chain)
    for f in (vector_aba, vector_recursion, vector_supertrace):
        assert np.allclose(f(chain, st).vector, om)
    assert verify_eigenvector(chain, vector_recursion(chain, st), default_samples(chain)) <= 1e-10


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("mn", [(3, 0), (2, 1)])
def test_nested_vectors_are_parallel_eigenvectors(family, mn):
    chain = make_chain(family, *mn, L=2, a_minus=2)
    states = solve(chain, [1, 1], seed=0)
    assert states
    samples = default_samples(chain)
    for st in states:
        vr, vs = vector_recursion(chain, st), vector_supertrace(chain, st)
        assert verify_eigenvector(chain, vr, samples) <= 1e-8
        assert verify_eigenvector(chain, vs, samples) <= 1e-8
        assert _parallel(vr.vector, vs.vector) <= 1e-8


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("mn", [(3, 0), (2, 1)])
def test_three_term_vector_matches_supertrace(family, mn, rng):
    chain = make_chain(family, *mn, L=2, a_minus=2)
    model = chain.model
    st = BetheState([1, 1], [[rpoint(model, rng, 0.5)], [rpoint(model, rng, 0.5)]])
    assert compare_vectors(vector_supertrace(chain, st).vector, phi3_11(chain, st).vector)[0] <= 1e-10
    with pytest.raises(ValueError):
        phi3_11(chain, BetheState([1, 0], [[0.1], []]))


def test_perturbed_root_is_not_eigenvector():
    chain = make_chain("rational", 2, 0, L=2)
    st = solve(chain, [1], seed=0)[0]
    bad = BetheState([1], [[st.fam(1)[0] + 1e-3]])
    samples = default_samples(chain)
    assert verify_eigenvector(chain, vector_recursion(chain, st), samples) <= 1e-8
    assert verify_eigenvector(chain, vector_recursion(chain, bad), samples) > 1e-4
    assert abs(BetheSystem(chain).be_residual(bad, 1, 1)) > 1e-4


def test_too_many_nested_roots_give_zero_vector():
    chain = make_chain("rational", 3, 0, L=1, a_minus=2)
    st = BetheState([1, 2], [[0.2 + 0.1j], [0.3 - 0.2j, -0.4 + 0.5j]])
    with pytest.raises(ZeroVectorError):
        vector_recursion(chain, st)
