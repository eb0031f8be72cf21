"""Bethe vectors: rank-1 ABA product, nested recursion and supertrace formula."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bethe import BetheState, BetheSystem
from .chain import ChainSpec, DimensionCapError, build_double_row, nested_operator, pseudo_vacuum
from .graded import GradedOperator, block, elementary, embed, identity, supertrace
from .nesting import nested_levels
from .rmatrix import r_matrix
from .transfer import transfer

__all__ = [
    "BetheVector",
    "ZeroVectorError",
    "creation_block",
    "vector_aba",
    "vector_recursion",
    "vector_supertrace",
    "phi3_11",
    "verify_eigenvector",
    "compare_vectors",
]


class ZeroVectorError(ArithmeticError):
    pass


@dataclass
class BetheVector:
    state: BetheState
    vector: np.ndarray
    construction: str

    def __post_init__(self):
        if not np.linalg.norm(self.vector) > 0:
            raise ZeroVectorError(f"{self.construction} construction produced the zero vector")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


def _row_projector(N, grading, k, rows: bool):
    """Diagonal projector on index k (rows) or on indices > k (cols)."""
    d = np.zeros(N, dtype=complex)
    if rows:
        d[k - 1] = 1.0
    else:
        d[k:] = 1.0
    return GradedOperator((grading,), np.diag(d))


def _row(op: GradedOperator, k: int) -> GradedOperator:
    """P_k op P_{>k} on the auxiliary factor: the entries d_kj, j > k."""
    g = op.factors[0]
    N = g.dim
    Pl = embed(_row_projector(N, g, k, True), (0,), op.factors)
    Pr = embed(_row_projector(N, g, k, False), (0,), op.factors)
    return Pl @ op @ Pr


def creation_block(chain: ChainSpec, k: int, u, level=None) -> GradedOperator:
    """Bhat^{(k)}(u): row k (columns > k) of the level-k operator at u^{(k)}.

    Without ``level`` the undressed nested operator of the chain is used.
    """
    N = chain.model.N
    if not 1 <= k < N:
        raise IndexError(f"k={k} outside 1..{N - 1}")
    x = chain.model.up(u, k)
    op = level(x) if level is not None else nested_operator(chain, k, x)
    return _row(op, k)


def _check_cap(chain: ChainSpec, state: BetheState, extra: int = 0):
    total = chain.L + sum(state.counts) + extra
    if chain.model.N ** total > chain.cap:
        raise DimensionCapError(f"(m+n)^{total} exceeds cap {chain.cap}")


def vector_aba(chain: ChainSpec, state: BetheState) -> BetheVector:
    """(-1)^{M[2]} dhat_12(u_1) ... dhat_12(u_M) Omega, with dhat_12(u) = d_12(u^{(1)})."""
    model = chain.model
    roots = state.fam(1)
    if any(state.counts[1:]):
        raise ValueError("the ABA product needs M_k = 0 for k > 1")
    v = pseudo_vacuum(chain)
    for x in reversed(roots):
        v = block(build_double_row(chain, model.up(x, 1)), 1, 2).mat @ v
    v = v * (-1) ** (len(roots) * model.gr(2))
    return BetheVector(state, v, "aba")


def _apply_family(level, k: int, roots: Sequence[complex], phi: np.ndarray, site_factors) -> np.ndarray:
    """B_{a_1}(u_1) ... B_{a_M}(u_M) phi, phi on (a_1..a_M) (x) sites, projected to a_j = e_k."""
    model = level.chain.model
    M = len(roots)
    if M == 0:
        return phi
    g = model.grading
    N = model.N
    factors = (g,) * M + tuple(site_factors)
    v = phi
    for j in reversed(range(M)):
        X = _row(level(model.up(roots[j], k)), k)
        v = embed(X, (j,) + tuple(range(M, len(factors))), factors).mat @ v
    rest = int(np.prod([f.dim for f in site_factors]))
    v = v.reshape((N,) * M + (rest,))[(k - 1,) * M]
    # Koszul sign of the functional (e_k^t)^{(x) M}
    return v * (-1) ** (model.gr(k) * (M * (M - 1) // 2))


def vector_recursion(chain: ChainSpec, state: BetheState) -> BetheVector:
    """Nested recursion: Phi^{(k-1)} = Bhat^{(k)}_{a_1}(u_k1) ... Bhat^{(k)}_{a_M}(u_kM) Phi^{(k)}."""
    _check_cap(chain, state)
    model = chain.model
    N = model.N
    levels = nested_levels(chain, state.roots)
    # Phi^{(N-1)}: e_{p+1} on family-p sites, e_1 on the chain
    phi = np.ones(1, dtype=complex)
    for p in range(N - 1, 0, -1):
        e = np.zeros(N, dtype=complex)
        e[p] = 1.0
        for _ in state.fam(p):
            phi = np.kron(phi, e)
    phi = np.kron(phi, pseudo_vacuum(chain))
    for k in range(N - 1, 0, -1):
        lev = levels[k - 1]
        phi = _apply_family(lev, k, state.fam(k), phi, lev.factors[1:])
    return BetheVector(state, phi, "recursion")


def _G(model, counts) -> int:
    """Sign exponent G_1 = sum_{i=1}^{m+n-2} M_i (M_i + 1) / 2 [i]."""
    return sum(counts[i - 1] * (counts[i - 1] + 1) // 2 * model.gr(i) for i in range(1, model.N - 1))


def vector_supertrace(chain: ChainSpec, state: BetheState) -> BetheVector:
    """(-1)^{G_1} str_A( prod_i Dbb^{(i)}_{A_i} E_{N,N-1}^{M_{N-1}} ... E_21^{M_1} ) Omega."""
    _check_cap(chain, state)
    model = chain.model
    N = model.N
    g = model.grading
    spaces = [(i, j) for i in range(1, N) for j in range(len(state.fam(i)))]
    nA = len(spaces)
    if nA == 0:
        return BetheVector(state, pseudo_vacuum(chain), "supertrace")
    pos = {s: t for t, s in enumerate(spaces)}
    factors = (g,) * nA + chain.site_factors
    site_pos = tuple(range(nA, nA + chain.L))
    prod = identity(factors)
    for i in range(1, N):
        for j, uij in enumerate(state.fam(i)):
            a = pos[(i, j)]
            left = identity(factors)
            right = identity(factors)
            for b in range(1, i):
                for c, ubc in enumerate(state.fam(b)):
                    y = model.up_range(ubc, b + 1, i - 1)
                    Rb = r_matrix(model, uij, y, bar=True, k=i, p=b, normalized=True)
                    left = left @ embed(Rb, (a, pos[(b, c)]), factors)
                    R = r_matrix(model, y, uij, k=b, p=i, normalized=True)
                    right = embed(R, (pos[(b, c)], a), factors) @ right
            D = nested_operator(chain, i, model.up(uij, i))
            prod = prod @ left @ embed(D, (a,) + site_pos, factors) @ right
    # injectors, tensor order as printed: E_{N,N-1} block first, E_21 block last
    order = [(i, j) for i in range(N - 1, 0, -1) for j in range(len(state.fam(i)))]
    inj = identity(factors)
    for (i, j) in order:
        inj = inj @ embed(elementary(g, i + 1, i), (pos[(i, j)],), factors)
    Y = prod @ inj
    for _ in range(nA):
        Y = supertrace(Y, 0)
    v = Y.mat @ pseudo_vacuum(chain) * (-1) ** _G(model, state.counts)
    return BetheVector(state, v, "supertrace")


def phi3_11(chain: ChainSpec, state: BetheState) -> BetheVector:
    """The explicit three-term vector for m+n = 3 (or more, with M_k = 0 for k > 2), M_1 = M_2 = 1."""
    model = chain.model
    if state.counts[:2] != (1, 1) or any(state.counts[2:]):
        raise ValueError("phi3_11 needs M_1 = M_2 = 1 and no further roots")
    u, v = state.fam(1)[0], state.fam(2)[0]
    s = (-1) ** (model.gr(1) + model.gr(2) + model.gr(3))
    om = pseudo_vacuum(chain)
    D1 = nested_operator(chain, 1, model.up(u, 1))
    D2 = nested_operator(chain, 2, model.up(v, 2))
    d = lambda D, i, j: block(D, i, j).mat
    t1 = s * model.b(u, v) / model.a(2, u, v) * (d(D1, 1, 2) @ d(D2, 2, 3) @ om)
    t2 = (s * model.bb(v, u) / model.ba(2, v, u) * model.w(3, 2, u, v) / model.a(2, u, v)
          * (d(D1, 1, 3) @ d(D2, 2, 2) @ om))
    t3 = ((-1) ** model.gr(1) * model.bw(2, 3, v, u) / model.ba(2, v, u) * model.b(u, v)
          / model.a(2, u, v) * (d(D1, 1, 3) @ d(D2, 3, 3) @ om))
    return BetheVector(state, t1 + t2 + t3, "phi3_11")


def verify_eigenvector(chain: ChainSpec, vec: BetheVector, u_samples: Sequence, system: BetheSystem | None = None) -> float:
    """max_u ||d(u) Phi - Lambda(u) Phi|| / ||Phi||."""
    system = system or BetheSystem(chain)
    out = 0.0
    for u in u_samples:
        lam = system.eigenvalue(vec.state, u)
        r = transfer(chain, u).mat @ vec.vector - lam * vec.vector
        out = max(out, float(np.linalg.norm(r) / vec.norm))
    return out


def compare_vectors(v1: np.ndarray, v2: np.ndarray) -> tuple:
    """(relative max-norm difference, ratio at the largest entry of v1)."""
    i = int(np.argmax(np.abs(v1)))
    ratio = v2[i] / v1[i] if v1[i] != 0 else np.nan
    rel = float(np.max(np.abs(v1 - v2)) / max(np.max(np.abs(v1)), 1e-300))
    return rel, complex(ratio)
