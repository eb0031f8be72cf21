"""Dressed monodromies of the nested chains.

Level 1 is the original chain with ``G_1(u) = D(u)`` on ``aux (x) H``.  Level
``k+1`` prepends ``M_k`` fundamental sites carrying the roots ``u_{kj}`` and
uses

    G_{k+1}(u) = prod_j Rbb^{(k+1)}_{a,a_j}(u, u_kj) Ghat_{k+1}(u) prod_j^{rev} RR^{(k+1)}_{a_j,a}(u, u_kj)

where ``Ghat_{k+1}`` is the nesting transform of ``G_k`` and ``RR``/``Rbb`` are
the normalized reduced R-matrices (plain / barred).  All sites stay
``m+n``-dimensional; the reduced R-matrices act trivially outside the
relevant index range.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chain import ChainSpec, DimensionCapError, build_double_row, hat_transform
from .graded import GradedOperator, block, embed
from .rmatrix import r_matrix

__all__ = ["NestedLevel", "nested_levels", "level_vacuum"]


@dataclass
class NestedLevel:
    """Level ``k`` of the nesting: dressed monodromy on ``aux (x) sites``.

    ``site_levels`` records, for each site (in tensor order), the nesting step
    that introduced it (0 for the original chain).
    """

    chain: ChainSpec
    k: int
    roots: tuple  # roots[p] = roots of family p+1
    fun: object  # u -> GradedOperator
    factors: tuple
    site_levels: tuple

    def __call__(self, u) -> GradedOperator:
        return self.fun(u)

    @property
    def n_sites(self) -> int:
        return len(self.factors) - 1

    @property
    def dim(self) -> int:
        return self.chain.model.N ** self.n_sites


def _dress(model, base_fun, k, roots_k, old_factors):
    """Wrap ``base_fun`` (level-k hatted operator on old_factors) with M new sites."""
    g = model.grading
    M = len(roots_k)
    factors = (g,) + (g,) * M + tuple(old_factors[1:])
    old_pos = (0,) + tuple(range(M + 1, len(factors)))

    def fun(u):
        core = embed(base_fun(u), old_pos, factors)
        left = None
        right = None
        for j, v in enumerate(roots_k):
            Rb = embed(r_matrix(model, u, v, bar=True, k=k, p=k, normalized=True), (0, j + 1), factors)
            Rp = embed(r_matrix(model, u, v, k=k, p=k, normalized=True), (j + 1, 0), factors)
            left = Rb if left is None else left @ Rb
            right = Rp if right is None else Rp @ right
        if left is None:
            return core
        return left @ core @ right

    return fun, factors


def nested_levels(chain: ChainSpec, roots: Sequence[Sequence[complex]], cap: int | None = None) -> list:
    """Levels 1..m+n for the root families ``roots[0..m+n-2]``.

    Level ``k`` carries the sites added by families ``1..k-1``.
    """
    model = chain.model
    N = model.N
    roots = tuple(tuple(complex(x) for x in fam) for fam in roots)
    if len(roots) != N - 1:
        raise ValueError(f"expected {N - 1} root families, got {len(roots)}")
    cap = chain.cap if cap is None else cap
    total = chain.L + sum(len(f) for f in roots)
    if N ** total > cap:
        raise DimensionCapError(f"(m+n)^(L+sum M) = {N ** total} exceeds cap {cap}")
    fun = lambda u: build_double_row(chain, u)
    factors = chain.factors
    site_levels = (0,) * chain.L
    levels = [NestedLevel(chain, 1, roots, fun, factors, site_levels)]
    for k in range(2, N + 1):
        hat = hat_transform(model, fun, k)
        fun, factors = _dress(model, hat, k, roots[k - 2], factors)
        site_levels = (k - 1,) * len(roots[k - 2]) + site_levels
        levels.append(NestedLevel(chain, k, roots, fun, factors, site_levels))
    return levels


def level_vacuum(level: NestedLevel) -> np.ndarray:
    """Omega^{(k)}: e_{p+1} on every site of family p, e_1 on the original sites."""
    N = level.chain.model.N
    v = np.ones(1, dtype=complex)
    for p in level.site_levels:
        e = np.zeros(N, dtype=complex)
        e[p] = 1.0
        v = np.kron(v, e)
    return v
