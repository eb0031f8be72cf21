import numpy as np
import pytest

from conftest import make_chain
from openbethe.boundary import k_naba_printed
from openbethe.chain import build_double_row
from openbethe.functions import m_matrix
from openbethe.graded import GradedOperator, Tolerance, embed, supertrace
from openbethe.transfer import (
    NoMatchError,
    brute_spectrum,
    commutator_residual,
    default_samples,
    match_eigenvalue,
    reduced_transfer,
    transfer,
)


@pytest.mark.parametrize("family", ["rational", "trigonometric"])
@pytest.mark.parametrize("mn", [(2, 0), (3, 0), (1, 1), (2, 1), (2, 2)])
@pytest.mark.parametrize("a_plus", [0, 1])
def test_commuting_transfer(family, mn, a_plus):
    chain = make_chain(family, *mn, L=2, a_plus=a_plus, seed=5)
    rng = np.random.default_rng(7)
    for _ in range(3):
        u, v = complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal())
        if chain.model.trig:
            u, v = np.exp(0.4 * u), np.exp(0.4 * v)
        assert commutator_residual(chain, u, v) <= 1e-10


def _printed_transfer(chain, u):
    model = chain.model
    d = np.ones(model.N, dtype=complex)
    d[0] = k_naba_printed(model, chain.boundary.c_plus, u)
    K = m_matrix(model) @ GradedOperator((model.grading,), np.diag(d))
    return supertrace(embed(K, (0,), chain.factors) @ build_double_row(chain, u), 0)


def test_printed_k_breaks_commutativity():
    chain = make_chain("rational", 2, 0, L=2, a_plus=1, seed=5)
    A, B = _printed_transfer(chain, 0.3 + 0.2j).mat, _printed_transfer(chain, -0.4 + 0.5j).mat
    rel = np.linalg.norm(A @ B - B @ A) / (np.linalg.norm(A) * np.linalg.norm(B))
    assert rel > 1e-3


def test_reduced_transfer_k1_is_transfer_without_k():
    chain = make_chain("rational", 2, 1, L=2, a_plus=0)
    u = 0.2 + 0.3j
    assert np.allclose(reduced_transfer(chain, 1, u).mat, transfer(chain, u).mat)


def test_brute_spectrum_and_matching():
    chain = make_chain("rational", 2, 0, L=2, a_plus=1)
    rep = brute_spectrum(chain)
    assert rep.joint_eigenbasis_flag
    assert rep.branches.shape == (4, len(default_samples(chain)))
    target = rep.branches[2]
    lookup = dict(zip(rep.u_samples, target))
    b, err = match_eigenvalue(rep, lambda u: lookup[u])
    assert b == 2 and err == 0
    with pytest.raises(NoMatchError):
        match_eigenvalue(rep, lambda u: 1e6, Tolerance(rel=1e-8))
    assert len(rep.to_json()) == len(rep.u_samples)
