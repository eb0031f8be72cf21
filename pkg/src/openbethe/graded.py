"""Z2-graded dense linear algebra.

Operators on a tensor product of graded spaces are stored as ordinary dense
matrices in the Koszul representation: an elementary tensor
``E_{i1 j1} (x) ... (x) E_{ik jk}`` is represented by the Kronecker product of
the elementary matrices times the sign

    (-1)^{sum_r ([i_r] + [j_r]) * sum_{t<r} [j_t]}.

With this choice the operator product is the plain matrix product, so all sign
bookkeeping happens once, when operators are assembled.  Factor-local
operations (partial supertrace, partial transpose, embedding, permutation of
factors) are done on the sign-stripped *coefficient* tensor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

__all__ = [
    "GradingSpec",
    "GradedOperator",
    "Tolerance",
    "graded_tensor",
    "supertrace",
    "graded_transpose",
    "truncation_projector",
    "embed",
    "block",
    "elementary",
    "identity",
    "encode",
    "decode",
]


@dataclass(frozen=True)
class GradingSpec:
    """Distinguished grading of C^{m|n}: indices 1..m even, m+1..m+n odd."""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 0 or self.n < 0 or self.m + self.n < 1:
            raise ValueError(f"invalid grading m={self.m}, n={self.n}")

    @property
    def dim(self) -> int:
        return self.m + self.n

    def grade(self, i: int) -> int:
        """Grade [i] of the 1-based index ``i``."""
        if not 1 <= i <= self.dim:
            raise IndexError(f"index {i} outside 1..{self.dim}")
        return 0 if i <= self.m else 1

    @property
    def parity(self) -> np.ndarray:
        """0-based parity vector."""
        return np.array([0] * self.m + [1] * self.n, dtype=np.int64)


@dataclass(frozen=True)
class Tolerance:
    rel: float = 1e-10
    abs: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.rel) and np.isfinite(self.abs)):
            raise ValueError("tolerances must be finite")
        if self.rel < 0 or self.abs < 0:
            raise ValueError("tolerances must be nonnegative")

    def ok(self, residual: float, scale: float = 1.0) -> bool:
        return residual <= self.rel * scale + self.abs


def _dims(factors) -> tuple[int, ...]:
    return tuple(f.dim for f in factors)


def encode(factors: Sequence[GradingSpec], multi: Sequence[int]) -> int:
    """Row-major flat index of a 0-based multi-index."""
    return int(np.ravel_multi_index(tuple(multi), _dims(factors)))


def decode(factors: Sequence[GradingSpec], flat: int) -> tuple[int, ...]:
    return tuple(int(x) for x in np.unravel_index(flat, _dims(factors)))


@lru_cache(maxsize=64)
def _factor_parities(factors: tuple[GradingSpec, ...]) -> np.ndarray:
    """Array of shape (nfactors, D): parity of each factor's index for every flat index."""
    dims = _dims(factors)
    D = int(np.prod(dims))
    idx = np.indices(dims).reshape(len(dims), D)
    return np.stack([f.parity[idx[r]] for r, f in enumerate(factors)])


@lru_cache(maxsize=64)
def _koszul_sign(factors: tuple[GradingSpec, ...]) -> np.ndarray:
    par = _factor_parities(factors)
    D = par.shape[1]
    expo = np.zeros((D, D), dtype=np.int64)
    prefix = np.zeros(D, dtype=np.int64)
    for r in range(par.shape[0]):
        if r:
            expo += (par[r][:, None] + par[r][None, :]) * prefix[None, :]
        prefix = prefix + par[r]
    return np.where(expo % 2, -1.0, 1.0)


@lru_cache(maxsize=64)
def _total_parity(factors: tuple[GradingSpec, ...]) -> np.ndarray:
    return _factor_parities(factors).sum(axis=0) % 2


@dataclass(frozen=True, eq=False)
class GradedOperator:
    """Dense operator on a tensor product of graded spaces (Koszul representation)."""

    factors: tuple[GradingSpec, ...]
    mat: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        mat = np.asarray(self.mat, dtype=complex)
        D = int(np.prod(_dims(self.factors)))
        if mat.shape != (D, D):
            raise ValueError(f"matrix shape {mat.shape} does not match factor dims {D}")
        object.__setattr__(self, "mat", mat)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def dims(self) -> tuple[int, ...]:
        return _dims(self.factors)

    def coefficients(self) -> np.ndarray:
        """Coefficients in the elementary-tensor basis, shape dims + dims."""
        c = self.mat * _koszul_sign(self.factors)
        return c.reshape(self.dims + self.dims)

    @classmethod
    def from_coefficients(cls, factors, coeff) -> "GradedOperator":
        factors = tuple(factors)
        D = int(np.prod(_dims(factors)))
        return cls(factors, np.asarray(coeff).reshape(D, D) * _koszul_sign(factors))

    def _check(self, other: "GradedOperator"):
        if self.factors != other.factors:
            raise ValueError("mismatched grading metadata")

    def __matmul__(self, other):
        if isinstance(other, GradedOperator):
            self._check(other)
            return GradedOperator(self.factors, self.mat @ other.mat)
        return self.mat @ np.asarray(other)

    def __add__(self, other):
        self._check(other)
        return GradedOperator(self.factors, self.mat + other.mat)

    def __sub__(self, other):
        self._check(other)
        return GradedOperator(self.factors, self.mat - other.mat)

    def __mul__(self, scalar):
        return GradedOperator(self.factors, self.mat * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return GradedOperator(self.factors, self.mat / scalar)

    def __neg__(self):
        return GradedOperator(self.factors, -self.mat)

    def inv(self) -> "GradedOperator":
        return GradedOperator(self.factors, np.linalg.inv(self.mat))

    def norm(self) -> float:
        return float(np.linalg.norm(self.mat))

    def odd_part_norm(self) -> float:
        """Norm of the entries that change the total grade (zero for even operators)."""
        p = _total_parity(self.factors)
        return float(np.linalg.norm(self.mat[p[:, None] != p[None, :]]))


def identity(factors: Sequence[GradingSpec]) -> GradedOperator:
    factors = tuple(factors)
    return GradedOperator(factors, np.eye(int(np.prod(_dims(factors)))))


def elementary(spec: GradingSpec, i: int, j: int) -> GradedOperator:
    """E_ij on C^{m|n}, 1-based."""
    e = np.zeros((spec.dim, spec.dim), dtype=complex)
    e[i - 1, j - 1] = 1.0
    return GradedOperator((spec,), e)


def graded_tensor(A: GradedOperator, B: GradedOperator) -> GradedOperator:
    """Graded tensor product; the factor list is the concatenation."""
    factors = A.factors + B.factors
    ca = A.coefficients().reshape(A.dim, A.dim)
    cb = B.coefficients().reshape(B.dim, B.dim)
    c = np.einsum("ij,kl->ikjl", ca, cb).reshape(A.dim * B.dim, A.dim * B.dim)
    return GradedOperator.from_coefficients(factors, c)


def _resolve_factor(A: GradedOperator, factor: int) -> int:
    if not isinstance(factor, (int, np.integer)) or not 0 <= factor < len(A.factors):
        raise IndexError(f"invalid factor index {factor} for {len(A.factors)} factors")
    return int(factor)


def supertrace(A: GradedOperator, factor="all"):
    """Supertrace over one factor (0-based), or over all factors (returns a scalar)."""
    if isinstance(factor, str):
        if factor.lower() != "all":
            raise ValueError(f"unknown factor selector {factor!r}")
        sign = np.where(_total_parity(A.factors), -1.0, 1.0)
        return complex(np.sum(sign * np.diag(A.mat)))
    p = _resolve_factor(A, factor)
    if len(A.factors) == 1:
        return supertrace(A, "all")
    nf = len(A.factors)
    c = A.coefficients()
    sign = np.where(A.factors[p].parity, -1.0, 1.0)
    c = np.moveaxis(c, (p, nf + p), (0, 1))
    red = np.einsum("ii...,i->...", c, sign)
    rest = A.factors[:p] + A.factors[p + 1:]
    return GradedOperator.from_coefficients(rest, red)


def graded_transpose(A: GradedOperator, factor: int, inverse: bool = False) -> GradedOperator:
    """Partial graded transpose: E_ij -> (-1)^{[j] + [j][i]} E_ji on one factor.

    ``inverse=True`` applies the inverse map E_ij -> (-1)^{[i] + [i][j]} E_ji.
    The transpose squares to the grade automorphism, not to the identity.
    """
    p = _resolve_factor(A, factor)
    nf = len(A.factors)
    par = A.factors[p].parity
    pi, pj = par[:, None], par[None, :]
    expo = pi + pi * pj if inverse else pj + pi * pj
    sign = np.where(expo % 2, -1.0, 1.0)  # indexed [i, j]
    c = A.coefficients()
    shape = [1] * (2 * nf)
    shape[p] = shape[nf + p] = par.size
    c = c * sign.reshape(shape)
    c = np.swapaxes(c, p, nf + p)
    return GradedOperator.from_coefficients(A.factors, c)


def truncation_projector(spec: GradingSpec, k: int) -> GradedOperator:
    """I^{(k)} = sum_{i >= k} E_ii."""
    if not 1 <= k <= spec.dim:
        raise IndexError(f"k={k} outside 1..{spec.dim}")
    d = np.zeros(spec.dim)
    d[k - 1:] = 1.0
    return GradedOperator((spec,), np.diag(d))


def embed(A: GradedOperator, positions: Sequence[int], factors: Sequence[GradingSpec]) -> GradedOperator:
    """Place the factors of ``A`` at ``positions`` (0-based) of a larger tensor product.

    An elementary term ``X_1 (x) ... (x) X_k`` becomes the ordered product
    ``(X_1)_{p_1} ... (X_k)_{p_k}``; for non-increasing positions this produces
    the usual super-permutation signs (so ``R_21`` is ``embed(R, (1, 0), ...)``).
    """
    factors = tuple(factors)
    positions = tuple(int(p) for p in positions)
    k, nf = len(A.factors), len(factors)
    if len(positions) != k or len(set(positions)) != k or not all(0 <= p < nf for p in positions):
        raise ValueError(f"bad positions {positions}")
    for a, p in enumerate(positions):
        if A.factors[a] != factors[p]:
            raise ValueError("mismatched grading metadata")
    c = A.coefficients()
    # sign from reordering the product into increasing factor order
    deg = []
    for a in range(k):
        r = [1] * (2 * k)
        r[a] = -1
        s = [1] * (2 * k)
        s[k + a] = -1
        deg.append(A.factors[a].parity.reshape(r) + A.factors[a].parity.reshape(s))
    expo = np.zeros([1] * (2 * k), dtype=np.int64)
    for a in range(k):
        for b in range(a + 1, k):
            if positions[a] > positions[b]:
                expo = expo + deg[a] * deg[b]
    c = c * np.where(expo % 2, -1.0, 1.0)
    # tensor with identities on the remaining factors
    rest = [p for p in range(nf) if p not in positions]
    for p in rest:
        c = np.multiply.outer(c, np.eye(factors[p].dim))
    # current axis order: rows(positions), cols(positions), then (row,col) pairs of rest
    order_rows = list(positions)
    axes_src_rows = list(range(k))
    axes_src_cols = list(range(k, 2 * k))
    for t, p in enumerate(rest):
        axes_src_rows.append(2 * k + 2 * t)
        axes_src_cols.append(2 * k + 2 * t + 1)
        order_rows.append(p)
    inv = np.argsort(order_rows)
    perm = [axes_src_rows[i] for i in inv] + [axes_src_cols[i] for i in inv]
    c = np.transpose(c, perm)
    return GradedOperator.from_coefficients(factors, c)


def block(A: GradedOperator, i: int, j: int) -> GradedOperator:
    """Component a_ij of A = sum E_ij (x) a_ij, first factor auxiliary (1-based i, j)."""
    aux = A.factors[0]
    rest = A.factors[1:]
    d = aux.dim
    D = A.dim // d
    sub = A.mat.reshape(d, D, d, D)[i - 1, :, j - 1, :]
    sign = -1.0 if (aux.grade(i) + aux.grade(j)) * aux.grade(j) % 2 else 1.0
    return GradedOperator(rest, sign * sub)
