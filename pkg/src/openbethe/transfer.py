"""Transfer matrices d(u) = str_a(K+(u) D(u)), brute-force spectra and branch matching."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .boundary import k_plus
from .chain import ChainSpec, DimensionCapError, build_double_row
from .functions import m_matrix
from .graded import GradedOperator, Tolerance, embed, supertrace

__all__ = [
    "SpectrumReport",
    "NoMatchError",
    "transfer",
    "reduced_transfer",
    "commutator_residual",
    "brute_spectrum",
    "match_eigenvalue",
    "default_samples",
]


class NoMatchError(LookupError):
    pass


def transfer(chain: ChainSpec, u, mode: str = "naba") -> GradedOperator:
    """Partial supertrace over the auxiliary factor of (K+(u) (x) I) D(u)."""
    K = embed(k_plus(chain.pair, u, mode=mode), (0,), chain.factors)
    return supertrace(K @ build_double_row(chain, u), 0)


def reduced_transfer(chain: ChainSpec, k: int, u, D: GradedOperator | None = None) -> GradedOperator:
    """d^{(k)}(u) = str_a(M^{(k)} D^{(k)}(u)), D^{(k)} the lower-right block of D."""
    N = chain.model.N
    if not 1 <= k <= N:
        raise IndexError(f"k={k} outside 1..{N}")
    M = m_matrix(chain.model).mat.copy()
    M[: k - 1, : k - 1] = 0
    Mk = embed(GradedOperator((chain.model.grading,), M), (0,), chain.factors)
    D = build_double_row(chain, u) if D is None else D
    return supertrace(Mk @ D, 0)


def commutator_residual(chain: ChainSpec, u, v) -> float:
    """||[d(u), d(v)]|| / (||d(u)|| ||d(v)||)."""
    A, B = transfer(chain, u).mat, transfer(chain, v).mat
    return float(np.linalg.norm(A @ B - B @ A) / max(np.linalg.norm(A) * np.linalg.norm(B), 1e-300))


def default_samples(chain: ChainSpec, count: int = 5, radius: float = 0.35) -> list:
    """Points on a small circle, centred away from the symmetric points of iota."""
    ang = 2 * np.pi * (np.arange(count) + 0.13) / count
    if chain.model.trig:
        return [complex(np.exp(0.3 + 0.2j + radius * np.exp(1j * t))) for t in ang]
    return [complex(0.4 + 0.3j + radius * np.exp(1j * t)) for t in ang]


@dataclass
class SpectrumReport:
    u_samples: list
    eigenvalues: list  # eigenvalues[s][b]: branch b at sample s
    joint_eigenbasis_flag: bool
    eigenvectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def branches(self) -> np.ndarray:
        """Array of shape (n_branches, n_samples)."""
        return np.asarray(self.eigenvalues).T

    def to_json(self) -> list:
        out = []
        for s, u in enumerate(self.u_samples):
            out.append({"u": [u.real, u.imag],
                        "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues[s]]})
        return out


def _simple(vals, tol=1e-8):
    v = np.asarray(vals)
    if v.size < 2:
        return True
    gaps = np.abs(v[:, None] - v[None, :])
    np.fill_diagonal(gaps, np.inf)
    return bool(np.min(gaps) > tol * max(1.0, np.max(np.abs(v))))


def brute_spectrum(chain: ChainSpec, u_samples: Sequence | None = None, cap: int | None = None) -> SpectrumReport:
    """Dense spectra of d(u) on the samples, paired through a common eigenbasis."""
    cap = chain.cap if cap is None else cap
    if chain.hilbert_dim > cap:
        raise DimensionCapError(f"dimension {chain.hilbert_dim} exceeds cap {cap}")
    us = list(u_samples) if u_samples is not None else default_samples(chain)
    mats = [transfer(chain, u).mat for u in us]
    w0, V = np.linalg.eig(mats[0])
    joint = _simple(w0)
    rows = [list(w0)]
    if joint:
        Vinv = np.linalg.inv(V)
        for A in mats[1:]:
            P = Vinv @ A @ V
            off = np.linalg.norm(P - np.diag(np.diag(P))) / max(np.linalg.norm(P), 1e-300)
            if off > 1e-6:
                joint = False
                break
            rows.append(list(np.diag(P)))
    if not joint:
        warnings.warn("spectrum degenerate at the first sample; pairing by nearest eigenvalues")
        rows = [list(w0)]
        for A in mats[1:]:
            w = list(np.linalg.eigvals(A))
            rows.append(w)
        V = None
    return SpectrumReport(us, rows, joint, V)


def match_eigenvalue(report: SpectrumReport, candidate: Callable, tol: Tolerance | None = None):
    """Branch index minimizing max_s |candidate(u_s) - eig_b(u_s)|, and that error.

    The error is absolute; ``tol`` is applied relative to the spectrum scale.
    Raises ``NoMatchError`` when the best branch is outside ``tol``.
    """
    tol = tol or Tolerance(rel=1e-8)
    cand = np.array([complex(candidate(u)) for u in report.u_samples])
    if report.joint_eigenbasis_flag:
        err = np.max(np.abs(report.branches - cand[None, :]), axis=1)
    else:
        # no common basis: branch = index at the first sample, error = worst nearest distance
        err = np.array([np.max([np.min(np.abs(np.asarray(row) - c)) for row, c in
                                zip(report.eigenvalues, cand)])])
        b0 = int(np.argmin(np.abs(np.asarray(report.eigenvalues[0]) - cand[0])))
        scale = max(np.max(np.abs(np.asarray(report.eigenvalues))), 1e-300)
        if not tol.ok(float(err[0]), scale):
            raise NoMatchError(f"no eigenvalue within tolerance (error {err[0]:.3g}, scale {scale:.3g})")
        return b0, float(err[0])
    b = int(np.argmin(err))
    scale = max(np.max(np.abs(np.asarray(report.eigenvalues))), 1e-300)
    if not tol.ok(float(err[b]), scale):
        raise NoMatchError(f"closest branch {b} has error {err[b]:.3g} (scale {scale:.3g})")
    return b, float(err[b])
