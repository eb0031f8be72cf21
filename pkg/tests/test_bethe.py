import numpy as np
import pytest

from conftest import MODELS, make_chain, rpoint
from openbethe.bethe import BetheState, BetheSystem, solve
from openbethe.transfer import brute_spectrum, match_eigenvalue

FAMILIES = ["rational", "trigonometric"]


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("mn", MODELS)
def test_hat_lambda_forms_agree(family, mn):
    chain = make_chain(family, *mn, L=2)
    S = BetheSystem(chain)
    rng = np.random.default_rng(11)
    for _ in range(50):
        u = rpoint(chain.model, rng)
        for k in range(1, chain.model.N + 1):
            a, b = S.hat_lambda(k, u), S.hat_lambda(k, u, "subtract")
            assert abs(a - b) <= 1e-11 * max(abs(a), 1.0)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("mn", MODELS)
@pytest.mark.parametrize("a_plus", [0, 1])
def test_vacuum_eigenvalue_matches_brute_force(family, mn, a_plus):
    chain = make_chain(family, *mn, L=2, a_plus=a_plus)
    S = BetheSystem(chain)
    st = BetheState.empty(chain.model)
    rep = brute_spectrum(chain)
    _, err = match_eigenvalue(rep, lambda u: S.eigenvalue(st, u))
    assert err <= 1e-8


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("mn", [(3, 0), (2, 1), (2, 2)])
def test_closed_sum_equals_recursion(family, mn, rng):
    chain = make_chain(family, *mn, L=2)
    model = chain.model
    S = BetheSystem(chain)
    roots = [[rpoint(model, rng, 0.5)] for _ in range(model.N - 1)]
    st = BetheState([1] * (model.N - 1), roots)
    u = rpoint(model, rng)
    rec, closed = S.eigenvalue(st, u), S.eigenvalue(st, u, "closed")
    assert abs(rec - closed) <= 1e-10 * abs(rec)
    assert abs(rec - S.eigenvalue(st, u, "printed")) > 1e-6 * abs(rec)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("L", [1, 2])
def test_gl2_solutions_are_eigenvalues(family, L):
    chain = make_chain(family, 2, 0, L=L)
    S = BetheSystem(chain)
    rep = brute_spectrum(chain)
    states = solve(chain, [1], seed=0)
    assert states
    for st in states:
        assert st.residual <= 1e-10
        _, err = match_eigenvalue(rep, lambda u: S.eigenvalue(st, u))
        assert err <= 1e-8


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("mn", [(1, 1), (3, 0), (2, 1)])
def test_small_solutions_are_eigenvalues(family, mn):
    chain = make_chain(family, *mn, L=2)
    S = BetheSystem(chain)
    rep = brute_spectrum(chain)
    counts = [1] + [0] * (chain.model.N - 2)
    states = solve(chain, counts, seed=1)
    assert states
    for st in states:
        _, err = match_eigenvalue(rep, lambda u: S.eigenvalue(st, u))
        assert err <= 1e-8


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("mn", [(3, 0), (2, 1), (1, 2)])
def test_gamma_zero_and_value_conditions(family, mn, rng):
    # approached as limits since the dressing functions have poles there
    chain = make_chain(family, *mn, L=2)
    model = chain.model
    S = BetheSystem(chain)
    st = BetheState([1, 1], [[rpoint(model, rng, 0.5)], [rpoint(model, rng, 0.5)]])
    h = 1e-8
    # zero condition: Ghat_3 vanishes at u_11 carried down to level 3
    y = model.down_range(st.fam(1)[0], 2, 3)
    scale = abs(S.gamma_hat(st, 3, y + 0.1))
    assert abs(S.gamma_hat(st, 3, y + h)) <= 1e-5 * scale
    # value condition: Ghat_3 reduces to its own level term at u_21 carried down
    y = model.down(st.fam(2)[0], 3)
    g, t = S.gamma_hat(st, 3, y + h), S.level_term(st, 3, y + h)
    assert abs(g - t) <= 1e-5 * abs(t)


def test_state_validation():
    with pytest.raises(ValueError):
        BetheState([2], [[0.1, 0.1 + 1e-10]])
    with pytest.raises(ValueError):
        BetheState([1], [[]])
    st = BetheState.from_flat([1, 2], np.array([0.1, 0.2, 0.3]))
    assert st.fam(2) == (0.2 + 0j, 0.3 + 0j) and st.fam(5) == ()
    assert st.to_json()["counts"] == [1, 2]


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("mn", [(2, 0), (3, 0), (2, 1)])
def test_printed_prefactor_differs_by_sign(family, mn, rng):
    # without the right boundary the printed prefactor is minus the pole-cancellation one
    chain = make_chain(family, *mn, L=2, a_plus=0)
    S = BetheSystem(chain)
    N = chain.model.N
    st = BetheState([1] * (N - 1), [[rpoint(chain.model, rng, 0.5)] for _ in range(N - 1)])
    for k in range(1, N):
        r1, r2 = S.be_ratio(st, k, 1), S.be_ratio(st, k, 1, "printed")
        assert abs(r1 + r2) <= 1e-10 * abs(r1)


def test_wrong_counts_rejected():
    with pytest.raises(ValueError):
        solve(make_chain("rational", 3, 0, L=1), [1])
