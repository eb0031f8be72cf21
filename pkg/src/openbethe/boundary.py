"""Diagonal boundary matrices K-(u), K+(u) and the (dual) reflection equations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .functions import BoundaryParams, ModelSpec, PoleError, m_matrix
from .graded import GradedOperator, embed, graded_transpose
from .rmatrix import r_matrix, relres

__all__ = [
    "BoundaryPair",
    "k_minus",
    "k_naba",
    "k_plus",
    "reflection_residual",
    "verify_reflection",
]


@dataclass(frozen=True)
class BoundaryPair:
    model: ModelSpec
    params: BoundaryParams

    def __post_init__(self):
        self.params.validate(self.model)


def _diag(model, entries):
    return GradedOperator((model.grading,), np.diag(np.asarray(entries, dtype=complex)))


def kminus_entries(model: ModelSpec, a: int, c, u) -> np.ndarray:
    """Diagonal of K-(u): ``a`` entries of the first kind, the rest of the second."""
    if model.trig:
        if u == 0:
            raise PoleError("K-", u)
        first, second = u * u - c * c, u ** -2 - c * c
    else:
        first, second = u - c, -u - c
    return np.array([first] * a + [second] * (model.N - a), dtype=complex)


def k_minus(pair: BoundaryPair, u) -> GradedOperator:
    p = pair.params
    return _diag(pair.model, kminus_entries(pair.model, p.a_minus, p.c_minus, u))


def k_naba(model: ModelSpec, c_plus, u) -> complex:
    """First diagonal entry k(u) of the NABA matrix K(u) = diag(k(u), 1, ..., 1).

    Obtained as the entry ratio of M^{-1} K+ with (K+)^t = M K-(iota(u~)) for
    a single entry of the first kind.
    """
    x = model.iota(model.tilde(u))
    e = kminus_entries(model, 1, c_plus, x)
    if e[1] == 0:
        raise PoleError("k", u)
    return complex(e[0] / e[1])


def k_naba_printed(model: ModelSpec, c_plus, u) -> complex:
    """k(u) exactly as printed next to the NABA K+ (kept for comparison)."""
    mn = model.m - model.n
    if model.trig:
        q = model.q
        num = u ** -2 * q ** (-mn / 2) - c_plus ** 2
        den = u ** 2 * q ** (mn / 2) - c_plus ** 2
    else:
        h = model.hbar
        num = -u - mn / 2 * h - c_plus
        den = u + mn / 2 * h - c_plus
    if den == 0:
        raise PoleError("k", u)
    return num / den


def k_plus(pair: BoundaryPair, u, mode: str = "naba", a: int | None = None, c=None) -> GradedOperator:
    """K+(u).

    ``naba``: M diag(k(u), 1, ..., 1) for a_plus = 1, M for a_plus = 0.
    ``dual``: the transpose of M K-(iota(u~)) for a diagonal K- with
    parameters (a, c); defaults to (a_plus, c_plus).
    """
    model, p = pair.model, pair.params
    M = m_matrix(model)
    if mode == "naba":
        if p.a_plus == 0:
            return M
        d = np.ones(model.N, dtype=complex)
        d[0] = k_naba(model, p.c_plus, u)
        return M @ _diag(model, d)
    if mode == "dual":
        a = p.a_plus if a is None else a
        c = p.c_plus if c is None else c
        x = model.iota(model.tilde(u))
        Kt = M @ _diag(model, kminus_entries(model, a, c, x))
        return graded_transpose(Kt, 0, inverse=True)
    raise ValueError(f"unknown mode {mode!r}")


def reflection_residual(model: ModelSpec, D1: GradedOperator, D2: GradedOperator, u1, u2) -> float:
    """Residual of R12 D1 Rbar21 D2 = D2 Rbar12 D1 R21 for operators on aux1 (x) aux2 (x) rest."""
    fs = D1.factors
    R12 = embed(r_matrix(model, u1, u2), (0, 1), fs)
    R21 = embed(r_matrix(model, u1, u2), (1, 0), fs)
    B12 = embed(r_matrix(model, u1, u2, bar=True), (0, 1), fs)
    B21 = embed(r_matrix(model, u1, u2, bar=True), (1, 0), fs)
    return relres(R12 @ D1 @ B21 @ D2, D2 @ B12 @ D1 @ R21)


def verify_reflection(model: ModelSpec, K: Callable, u1, u2, dual: bool = False) -> float:
    """Residual of the reflection equation for K (dual=True: the dual equation for K+)."""
    g = model.grading
    fs = (g, g)
    if not dual:
        K1 = embed(K(u1), (0,), fs)
        K2 = embed(K(u2), (1,), fs)
        return reflection_residual(model, K1, K2, u1, u2)
    M = m_matrix(model)
    M1 = embed(M, (0,), fs)
    M1i = embed(M.inv(), (0,), fs)
    K1t = embed(graded_transpose(K(u1), 0), (0,), fs)
    K2t = embed(graded_transpose(K(u2), 0), (1,), fs)
    x1, x2 = model.iota(model.tilde(u1)), model.iota(model.tilde(u2))
    R12 = embed(r_matrix(model, u2, u1), (0, 1), fs)
    R21 = embed(r_matrix(model, u2, u1), (1, 0), fs)
    B21 = embed(r_matrix(model, x1, x2, bar=True), (1, 0), fs)
    B12 = embed(r_matrix(model, x1, x2, bar=True), (0, 1), fs)
    lhs = R12 @ K1t @ M1i @ B21 @ M1 @ K2t
    rhs = K2t @ M1 @ B12 @ M1i @ K1t @ R21
    return relres(lhs, rhs)
