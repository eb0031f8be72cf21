"""R-matrices R, R-bar, reduced and normalized variants, and their checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .functions import ModelSpec, PoleError, m_matrix
from .graded import GradedOperator, embed, graded_transpose

__all__ = [
    "RMatrixHandle",
    "r_matrix",
    "verify_ybe",
    "unitarity_scalar",
    "verify_parity",
    "verify_m_invariance",
    "relres",
]


def relres(lhs: GradedOperator, rhs: GradedOperator) -> float:
    """Relative Frobenius residual ||lhs - rhs|| / max(||lhs||, ||rhs||)."""
    scale = max(lhs.norm(), rhs.norm(), 1e-300)
    return float(np.linalg.norm(lhs.mat - rhs.mat) / scale)


def r_matrix(model: ModelSpec, u, v, *, bar=False, k=1, p=1, normalized=False) -> GradedOperator:
    """R(u,v) = b I + sum_ij w_ij E_ij (x) E_ji, optionally reduced/normalized.

    ``bar`` substitutes v -> iota(v).  The reduced variant keeps indices >= k in
    the first space and >= p in the second; ``normalized`` divides by a_p.
    """
    N = model.N
    g = model.grading
    if bar:
        v = model.iota(v)
    bval = model.b(u, v)
    c = np.zeros((N, N, N, N), dtype=complex)  # rows (i, k), cols (j, l)
    for i in range(max(k, 1), N + 1):
        for kk in range(max(p, 1), N + 1):
            c[i - 1, kk - 1, i - 1, kk - 1] += bval
    lo = max(k, p)
    for i in range(lo, N + 1):
        for j in range(lo, N + 1):
            c[i - 1, j - 1, j - 1, i - 1] += model.w(i, j, u, v)
    R = GradedOperator.from_coefficients((g, g), c)
    if normalized:
        ap = model.a(p, u, v)
        if ap == 0:
            raise PoleError(f"a_{p}", (u, v))
        R = R / ap
    return R


@dataclass(frozen=True)
class RMatrixHandle:
    """Which R-matrix to build: ``plain``, ``bar``, ``reduced`` or ``normalized`` (optionally barred)."""

    model: ModelSpec
    variant: str = "plain"
    k: int = 1
    p: int = 1
    barred: bool = False

    def __post_init__(self):
        if self.variant not in ("plain", "bar", "reduced", "normalized"):
            raise ValueError(f"unknown variant {self.variant!r}")
        N = self.model.N
        if not (1 <= self.k <= N and 1 <= self.p <= N):
            raise IndexError("reduction indices out of range")

    def build(self, u, v) -> GradedOperator:
        bar = self.barred or self.variant == "bar"
        if self.variant in ("plain", "bar"):
            return r_matrix(self.model, u, v, bar=bar)
        return r_matrix(self.model, u, v, bar=bar, k=self.k, p=self.p,
                        normalized=self.variant == "normalized")


def _pair(model, R, i, j, nf=3):
    g = model.grading
    return embed(R, (i, j), (g,) * nf)


def verify_ybe(model: ModelSpec, u1, u2, u3, mixed=False) -> float:
    """Residual of R12 R13 R23 = R23 R13 R12 (mixed: R13, R23 barred)."""
    R12 = _pair(model, r_matrix(model, u1, u2), 0, 1)
    R13 = _pair(model, r_matrix(model, u1, u3, bar=mixed), 0, 2)
    R23 = _pair(model, r_matrix(model, u2, u3, bar=mixed), 1, 2)
    return relres(R12 @ R13 @ R23, R23 @ R13 @ R12)


def _scalar_part(P: GradedOperator):
    zeta = np.trace(P.mat) / P.dim
    off = np.linalg.norm(P.mat - zeta * np.eye(P.dim)) / max(abs(zeta), 1e-300) / np.sqrt(P.dim)
    return complex(zeta), float(off)


def unitarity_scalar(model: ModelSpec, u, v, crossing=False):
    """Return (zeta, deviation from proportionality to the identity).

    Without ``crossing``: R12(u,v) R21(v,u).  With ``crossing``:
    Rbar12^{t1}(u,v) M1 Rbar12^{t2'}(iota(v~), iota(u~)) M1^{-1}, where t2' is
    the inverse graded transpose.  Both factors must be barred, and in the
    graded case the two transposes must be mutually inverse, for the product
    to be scalar.
    """
    g = model.grading
    if not crossing:
        R = r_matrix(model, u, v)
        R21 = embed(r_matrix(model, v, u), (1, 0), (g, g))
        return _scalar_part(R @ R21)
    M = m_matrix(model)
    M1 = embed(M, (0,), (g, g))
    M1i = embed(M.inv(), (0,), (g, g))
    A = graded_transpose(r_matrix(model, u, v, bar=True), 0)
    args = model.iota(model.tilde(v)), model.iota(model.tilde(u))
    B = graded_transpose(r_matrix(model, *args, bar=True), 1, inverse=True)
    return _scalar_part(A @ M1 @ B @ M1i)


def verify_parity(model: ModelSpec, u, v) -> float:
    """Residual of R12(u,v)^{t1 t2} = R21(u,v)."""
    g = model.grading
    R = r_matrix(model, u, v)
    lhs = graded_transpose(graded_transpose(R, 0), 1)
    return relres(lhs, embed(R, (1, 0), (g, g)))


def verify_m_invariance(model: ModelSpec, u, v) -> float:
    """Residual of [R12(u,v), M1 M2] = 0, relative to ||R||."""
    g = model.grading
    M = m_matrix(model)
    MM = embed(M, (0,), (g, g)) @ embed(M, (1,), (g, g))
    R = r_matrix(model, u, v)
    return float(np.linalg.norm((R @ MM - MM @ R).mat) / max(R.norm() * MM.norm(), 1e-300))


def check_normalized_unitarity(model: ModelSpec, k, u, v) -> float:
    """Residual of RR^{(k,k)}_12(u,v) RR^{(k,k)}_21(v,u) = I^{(k)} (x) I^{(k)}."""
    g = model.grading
    A = r_matrix(model, u, v, k=k, p=k, normalized=True)
    B = embed(r_matrix(model, v, u, k=k, p=k, normalized=True), (1, 0), (g, g))
    proj = np.zeros(model.N)
    proj[k - 1:] = 1
    target = GradedOperator((g, g), np.diag(np.kron(proj, proj)).astype(complex))
    return relres(A @ B, target)


__all__.append("check_normalized_unitarity")

