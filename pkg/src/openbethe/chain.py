"""Open-chain representation layer: monodromies, double-row monodromy, weights.

A chain of ``L`` fundamental sites with inhomogeneities ``a_s`` carries the
monodromy ``T(u) = Rbar_{a,1}(u, a_1) ... Rbar_{a,L}(u, a_L)`` (unnormalized
``Rbar``, site 1 leftmost), acting on ``aux (x) site_1 (x) ... (x) site_L``.
The double-row monodromy is ``D(u) = T(u) K-(u) T^{-1}(iota(u))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .boundary import BoundaryPair, k_minus, kminus_entries, reflection_residual
from .functions import BoundaryParams, ModelSpec, PoleError
from .graded import GradedOperator, block, embed, identity
from .rmatrix import r_matrix, relres

__all__ = [
    "ChainSpec",
    "DimensionCapError",
    "IllConditionedError",
    "WeightTable",
    "DoubleRow",
    "pseudo_vacuum",
    "build_T",
    "build_T_inverse_at_iota",
    "build_double_row",
    "lambda_prime",
    "boundary_weight",
    "kappa_eff",
    "nested_operator",
    "nested_operator_closed",
    "verify_rtt",
    "verify_double_row_reflection",
    "verify_nested_reflection",
    "highest_weight_residuals",
]

DEFAULT_CAP = 4096
COND_LIMIT = 1e12


class DimensionCapError(ValueError):
    """Requested Hilbert space exceeds the configured dimension cap."""


class IllConditionedError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class ChainSpec:
    model: ModelSpec
    L: int
    site_params: tuple = ()
    boundary: BoundaryParams = field(default_factory=BoundaryParams)
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("L must be at least 1")
        sites = tuple(complex(a) for a in self.site_params) or (0j,) * self.L
        if len(sites) != self.L:
            raise ValueError(f"expected {self.L} site parameters, got {len(sites)}")
        object.__setattr__(self, "site_params", sites)
        self.boundary.validate(self.model)
        if self.hilbert_dim > self.cap:
            raise DimensionCapError(f"(m+n)^L = {self.hilbert_dim} exceeds cap {self.cap}")

    @property
    def hilbert_dim(self) -> int:
        return self.model.N ** self.L

    @property
    def site_factors(self) -> tuple:
        return (self.model.grading,) * self.L

    @property
    def factors(self) -> tuple:
        """Aux factor first, then the sites."""
        return (self.model.grading,) + self.site_factors

    @property
    def pair(self) -> BoundaryPair:
        return BoundaryPair(self.model, self.boundary)


def pseudo_vacuum(chain: ChainSpec) -> np.ndarray:
    """Omega = e_1^{(x) L}."""
    v = np.zeros(chain.hilbert_dim, dtype=complex)
    v[0] = 1.0
    return v


# ---- monodromies -----------------------------------------------------------

def _lax(chain, u, s):
    return embed(r_matrix(chain.model, u, chain.site_params[s], bar=True), (0, s + 1), chain.factors)


def build_T(chain: ChainSpec, u) -> GradedOperator:
    T = _lax(chain, u, 0)
    for s in range(1, chain.L):
        T = T @ _lax(chain, u, s)
    return T


def _checked_inverse(mat: np.ndarray, what) -> np.ndarray:
    c = np.linalg.cond(mat)
    if not np.isfinite(c) or c > COND_LIMIT:
        raise IllConditionedError(f"{what}: condition number {c:.3g} above {COND_LIMIT:g}")
    return np.linalg.inv(mat)


def build_T_inverse_at_iota(chain: ChainSpec, u) -> GradedOperator:
    """Operator inverse of T(iota(u)), assembled from inverted Lax factors."""
    x = chain.model.iota(u)
    g = chain.model.grading
    out = None
    for s in reversed(range(chain.L)):
        R = r_matrix(chain.model, x, chain.site_params[s], bar=True)
        Ri = GradedOperator((g, g), _checked_inverse(R.mat, f"Lax factor at site {s + 1}, u={u}"))
        op = embed(Ri, (0, s + 1), chain.factors)
        out = op if out is None else out @ op
    return out


def build_double_row(chain: ChainSpec, u) -> GradedOperator:
    K = embed(k_minus(chain.pair, u), (0,), chain.factors)
    return build_T(chain, u) @ K @ build_T_inverse_at_iota(chain, u)


@dataclass(frozen=True)
class DoubleRow:
    """D(u) evaluator with block access ``d(i, j, u)`` (operators on H)."""

    chain: ChainSpec

    def __call__(self, u) -> GradedOperator:
        return build_double_row(self.chain, u)

    def d(self, i, j, u) -> GradedOperator:
        return block(self(u), i, j)

    def T(self, u) -> GradedOperator:
        return build_T(self.chain, u)

    def T_inv_iota(self, u) -> GradedOperator:
        return build_T_inverse_at_iota(self.chain, u)


# ---- weights ------------------------------------------------------------------

@dataclass
class WeightTable:
    """Highest weights lambda_j(u) and lambda'_j(u) of a chain representation.

    ``lam(j, u)`` is a product over sites of evaluation weights.  In
    fundamental mode each site contributes ``a_1(u, iota(a_s))`` for j=1 and
    ``b(u, iota(a_s))`` otherwise.  With generic ``mu`` (one weight vector per
    site) the evaluation formula is used, with ``eta_j = (-1)^{[j]}`` for the
    trigonometric family; such tables are for eigenvalue formulas only.
    """

    model: ModelSpec
    points: tuple
    mu: tuple | None = None
    lam_prime_fn: Callable | None = None

    @classmethod
    def fundamental(cls, chain: ChainSpec) -> "WeightTable":
        return cls(chain.model, tuple(chain.model.iota(a) for a in chain.site_params))

    def _site(self, j, u, a, mu):
        model = self.model
        g = model.gr(j)
        if model.trig:
            eta = (-1) ** g
            return (-1) ** g * (u / a * eta * model.q ** mu - a / u * eta * model.q ** (-mu))
        return u - a - (-1) ** g * model.hbar * mu

    def _mu(self, s, j):
        if self.mu is not None:
            return self.mu[s][j - 1]
        if j != 1:
            return 0
        # fundamental weight; an odd first index flips the q-exponent
        return -1 if (self.model.trig and self.model.gr(1)) else 1

    def lam(self, j, u):
        out = 1.0 + 0j
        for s, a in enumerate(self.points):
            out *= self._site(j, u, a, self._mu(s, j))
        return out

    def lam_prime(self, j, u):
        if self.lam_prime_fn is not None:
            return self.lam_prime_fn(j, u)
        return lambda_prime_closed(self.model, self.lam, j, u)


def lambda_prime_closed(model: ModelSpec, lam: Callable, j: int, u):
    """lambda'_j from the quantum-determinant formula (valid for j <= m)."""
    if j > model.m:
        raise ValueError("closed-form lambda' is only available for even indices (j <= m)")
    out = 1.0 / lam(j, model.brace(u, j - 1))
    for k in range(1, j):
        out *= lam(k, model.brace(u, k)) / lam(k, model.brace(u, k - 1))
    return out


def _vacuum_coefficient(op: GradedOperator, omega: np.ndarray):
    w = op.mat @ omega
    c = np.vdot(omega, w) / np.vdot(omega, omega)
    rest = np.linalg.norm(w - c * omega)
    return complex(c), float(rest)


def lambda_prime(chain: ChainSpec, j: int, u, mode: str = "numeric"):
    """lambda'_j(u): coefficient of Omega in t'_jj(u) Omega.

    ``numeric`` inverts T(u); ``closed_form`` uses the determinant formula and
    is limited to even indices.
    """
    if mode == "closed_form":
        wt = WeightTable.fundamental(chain)
        return lambda_prime_closed(chain.model, wt.lam, j, u)
    if mode != "numeric":
        raise ValueError(f"unknown mode {mode!r}")
    Tinv = build_T_inverse_at_iota(chain, chain.model.iota(u))
    c, _ = _vacuum_coefficient(block(Tinv, j, j), pseudo_vacuum(chain))
    return c


def _lambda_prime_fn(chain: ChainSpec):
    """lambda' callable for fundamental chains: closed form where available."""
    model = chain.model
    wt = WeightTable.fundamental(chain)

    singles = [ChainSpec(model, 1, (a,), chain.boundary) for a in chain.site_params]

    def fn(j, u):
        if j <= model.m:
            return lambda_prime_closed(model, wt.lam, j, u)
        # t'_jj is group-like on the vacuum, so the weight factorizes over sites
        out = 1.0 + 0j
        for c in singles:
            out *= lambda_prime(c, j, u, mode="numeric")
        return out

    return fn


def kappa_eff(model: ModelSpec, kappa: Sequence, i: int, u):
    """The dressed boundary weight K_i(u) built from the K- diagonal ``kappa``."""
    out = kappa[i - 1]
    if i == 1:
        return out
    y = model.down_range(u, 1, i - 2)
    den = model.a(i - 1, y, model.iota(y))
    if den == 0:
        raise PoleError(f"K_{i}", u)
    for k in range(1, i):
        x = model.down_range(u, 1, k - 1)
        expo = i - k - 1 - 2 * sum(model.gr(l) for l in range(k + 1, i))
        out -= kappa[k - 1] * model.w(i, k, x, model.iota(x)) / den * model._qp(expo)
    return out


def boundary_weight(chain: ChainSpec, i: int, u, weights: WeightTable | None = None):
    """Lambda_i(u), the eigenvalue of d_ii(u) on Omega, from the closed formula."""
    model = chain.model
    wt = weights or WeightTable.fundamental(chain)
    if wt.lam_prime_fn is None and weights is None:
        wt.lam_prime_fn = _lambda_prime_fn(chain)
    p = chain.boundary
    kappa = kminus_entries(model, p.a_minus, p.c_minus, u)
    x = model.iota(u)

    def term(k):
        return kappa_eff(model, kappa, k, u) * wt.lam(k, u) * wt.lam_prime(k, x)

    out = term(i)
    for k in range(1, i):
        out += model.psi(k, model.down_range(u, 1, k - 1)) * term(k)
    return out


def highest_weight_residuals(chain: ChainSpec, u, D: GradedOperator | None = None) -> dict:
    """Numeric check of d_ij(u) Omega = 0 (i > j) and of the diagonal eigenvalues.

    Returns ``{"lower": max ||d_ij Omega|| / ||D||, "diag": [(numeric, off-vacuum norm)]}``.
    """
    D = build_double_row(chain, u) if D is None else D
    om = pseudo_vacuum(chain)
    N = chain.model.N
    scale = max(D.norm(), 1e-300)
    lower = 0.0
    diag = []
    for i in range(1, N + 1):
        for j in range(1, i):
            lower = max(lower, np.linalg.norm(block(D, i, j).mat @ om) / scale)
        diag.append(_vacuum_coefficient(block(D, i, i), om))
    return {"lower": float(lower), "diag": diag}


# ---- nested operators ------------------------------------------------------

def _project_aux(op: GradedOperator, k: int) -> GradedOperator:
    N = op.factors[0].dim
    P = np.zeros(N)
    P[k - 1:] = 1
    D = op.dim // N
    m = op.mat.reshape(N, D, N, D) * P[:, None, None, None] * P[None, None, :, None]
    return GradedOperator(op.factors, m.reshape(op.dim, op.dim))


def _aux_diag(op_rest: GradedOperator, k: int, N: int, factors) -> GradedOperator:
    """I^{(k)} (x) X for an even operator X on the non-aux factors."""
    P = np.zeros(N)
    P[k - 1:] = 1
    return GradedOperator(tuple(factors), np.kron(np.diag(P), op_rest.mat))


def hat_transform(model: ModelSpec, Dfun: Callable, k: int) -> Callable:
    """From u -> D^{(k-1)}(u) build u -> D^{(k)}(u) by one nesting step (k >= 2)."""

    def Dk(u):
        x = model.up(u, k - 1)
        Dp = Dfun(x)
        dkk = block(Dp, k - 1, k - 1)
        out = Dp - _aux_diag(dkk, k, model.N, Dp.factors) * model.psi(k - 1, x)
        return _project_aux(out, k)

    return Dk


def nested_operator(chain: ChainSpec, k: int, u, Dfun: Callable | None = None) -> GradedOperator:
    """D-hat^{(k)}(u) from the recursive nesting transformation; k=1 gives D(u)."""
    N = chain.model.N
    if not 1 <= k <= N:
        raise IndexError(f"k={k} outside 1..{N}")
    f = Dfun or (lambda x: build_double_row(chain, x))
    for level in range(2, k + 1):
        f = hat_transform(chain.model, f, level)
    return f(u)


def nested_operator_closed(chain: ChainSpec, k: int, u) -> GradedOperator:
    """D-hat^{(k)}(u) from the explicit subtraction formula (cross-check)."""
    model = chain.model
    x = model.up_range(u, 1, k - 1)
    D = build_double_row(chain, x)
    out = D
    for a in range(1, k):
        expo = 2 * (k - 1 - a) - 4 * sum(model.gr(l) for l in range(a + 1, k))
        coef = model._qp(expo) * model.psi(a, model.up(u, a))
        out = out - _aux_diag(block(D, a, a), k, model.N, D.factors) * coef
    return _project_aux(out, k)


# ---- algebra checks ---------------------------------------------------------

def verify_rtt(chain: ChainSpec, u, v) -> dict:
    """Residuals of R12 T1 T2 = T2 T1 R12 and of the inverse exchange relation.

    The inverse relation is T^{-1}_2(v) R12(u, v) T_1(u) = T_1(u) R12(u, v) T^{-1}_2(v),
    with R evaluated at the (unbarred) spectral parameters of the Lax factors.
    """
    g = chain.model.grading
    fs = (g,) + chain.factors
    pos1 = (0,) + tuple(range(2, chain.L + 2))
    pos2 = (1,) + tuple(range(2, chain.L + 2))
    T1, T2 = embed(build_T(chain, u), pos1, fs), embed(build_T(chain, v), pos2, fs)
    R = embed(r_matrix(chain.model, u, v), (0, 1), fs)
    rtt = relres(R @ T1 @ T2, T2 @ T1 @ R)
    T2i = embed(build_T_inverse_at_iota(chain, chain.model.iota(v)), pos2, fs)
    trt = relres(T2i @ R @ T1, T1 @ R @ T2i)
    return {"rtt": rtt, "trt": trt}


def verify_double_row_reflection(chain: ChainSpec, u1, u2) -> float:
    g = chain.model.grading
    fs = (g,) + chain.factors
    rest = tuple(range(2, chain.L + 2))
    D1 = embed(build_double_row(chain, u1), (0,) + rest, fs)
    D2 = embed(build_double_row(chain, u2), (1,) + rest, fs)
    return reflection_residual(chain.model, D1, D2, u1, u2)


def _reduced_pair(model, u1, u2, k, fs):
    out = {}
    for bar in (False, True):
        R = r_matrix(model, u1, u2, bar=bar, k=k, p=k)
        out[(bar, "12")] = embed(R, (0, 1), fs)
        out[(bar, "21")] = embed(R, (1, 0), fs)
    return out


def ideal_vectors(chain: ChainSpec, k: int, rng, count: int = 3, max_degree: int = 2) -> list:
    """Vectors F Omega with F a random product of d_ij(u_r), i, j >= k."""
    N = chain.model.N
    om = pseudo_vacuum(chain)
    vecs = [om]
    while len(vecs) < count:
        v = om.copy()
        for _ in range(int(rng.integers(1, max_degree + 1))):
            i, j = (int(x) for x in rng.integers(k, N + 1, size=2))
            u = complex(rng.normal(), rng.normal())
            v = block(build_double_row(chain, u), i, j).mat @ v
        nv = np.linalg.norm(v)
        if nv > 1e-12:
            vecs.append(v / nv)
    return vecs


def verify_nested_reflection(chain: ChainSpec, k: int, u1, u2, vectors: list) -> float:
    """Residual of the level-k reflection equation applied to aux (x) aux (x) v."""
    model = chain.model
    g = model.grading
    fs = (g,) + chain.factors
    rest = tuple(range(2, chain.L + 2))
    Dh1 = embed(nested_operator(chain, k, u1), (0,) + rest, fs)
    Dh2 = embed(nested_operator(chain, k, u2), (1,) + rest, fs)
    R = _reduced_pair(model, u1, u2, k, fs)
    lhs = R[(False, "12")] @ Dh1 @ R[(True, "21")] @ Dh2
    rhs = Dh2 @ R[(True, "12")] @ Dh1 @ R[(False, "21")]
    N = model.N
    worst = 0.0
    for v in vectors:
        V = np.kron(np.eye(N * N), v[:, None])
        a, b = lhs.mat @ V, rhs.mat @ V
        scale = max(np.linalg.norm(a), np.linalg.norm(b), 1e-300)
        worst = max(worst, float(np.linalg.norm(a - b) / scale))
    return worst
