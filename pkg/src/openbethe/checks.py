"""Named residual checks shared by the CLI and the test-suite.

Every check returns a non-negative relative residual; a check passes when the
residual is below the caller's tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary import k_minus, k_plus, verify_reflection
from .chain import (
    ChainSpec,
    boundary_weight,
    highest_weight_residuals,
    ideal_vectors,
    verify_double_row_reflection,
    verify_nested_reflection,
    verify_rtt,
)
from .functions import ModelSpec, PoleError, check_identities
from .rmatrix import unitarity_scalar, verify_m_invariance, verify_parity, verify_ybe
from .transfer import commutator_residual

__all__ = ["Check", "random_point", "model_checks", "chain_checks", "identity_checks"]


@dataclass
class Check:
    name: str
    residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tol)

    def to_json(self) -> dict:
        return {"name": self.name, "residual": self.residual, "pass": self.passed}


def random_point(model: ModelSpec, rng) -> complex:
    """Generic spectral parameter: Gaussian (rational) or exp of a Gaussian (trigonometric)."""
    z = complex(rng.normal(), rng.normal())
    return complex(np.exp(0.4 * z)) if model.trig else 1.5 * z


def _worst(fn, model, rng, samples, nargs):
    worst = 0.0
    done = tries = 0
    while done < samples and tries < 10 * samples:
        tries += 1
        try:
            worst = max(worst, float(fn(*(random_point(model, rng) for _ in range(nargs)))))
        except PoleError:
            continue
        done += 1
    return worst


def model_checks(model: ModelSpec, boundary, samples: int = 20, seed: int = 0, tol: float = 1e-12) -> list:
    """R-matrix and K-matrix identities at random points."""
    from .boundary import BoundaryPair

    rng = np.random.default_rng(seed)
    pair = BoundaryPair(model, boundary)
    out = [
        Check("ybe", _worst(lambda a, b, c: verify_ybe(model, a, b, c), model, rng, samples, 3), tol),
        Check("ybe_mixed", _worst(lambda a, b, c: verify_ybe(model, a, b, c, mixed=True), model, rng, samples, 3), tol),
        Check("parity", _worst(lambda a, b: verify_parity(model, a, b), model, rng, samples, 2), tol),
        Check("unitarity", _worst(lambda a, b: unitarity_scalar(model, a, b)[1], model, rng, samples, 2), tol),
        Check("crossing", _worst(lambda a, b: unitarity_scalar(model, a, b, crossing=True)[1], model, rng, samples, 2), tol),
        Check("m_invariance", _worst(lambda a, b: verify_m_invariance(model, a, b), model, rng, samples, 2), tol),
        Check("reflection", _worst(lambda a, b: verify_reflection(model, lambda x: k_minus(pair, x), a, b),
                                   model, rng, samples, 2), tol),
        Check("dual_reflection", _worst(lambda a, b: verify_reflection(model, lambda x: k_plus(pair, x), a, b, dual=True),
                                        model, rng, samples, 2), tol),
    ]
    return out


def identity_checks(model: ModelSpec, trials: int = 100, seed: int = 0, tol: float = 1e-12) -> list:
    return [Check(f"identity_{k}", v, tol) for k, v in check_identities(model, trials, seed).items()]


def chain_checks(chain: ChainSpec, samples: int = 10, seed: int = 0, tol: float = 1e-10) -> list:
    """RTT, reflection of D, highest weight, nested embedding and commutativity."""
    model = chain.model
    rng = np.random.default_rng(seed)
    rtt = _worst(lambda a, b: verify_rtt(chain, a, b)["rtt"], model, rng, samples, 2)
    trt = _worst(lambda a, b: verify_rtt(chain, a, b)["trt"], model, rng, samples, 2)
    refl = _worst(lambda a, b: verify_double_row_reflection(chain, a, b), model, rng, samples, 2)

    def hw(u):
        r = highest_weight_residuals(chain, u)
        lam = 0.0
        for i, (num, off) in enumerate(r["diag"], start=1):
            lam = max(lam, abs(num - boundary_weight(chain, i, u)) / max(abs(num), 1e-300), off)
        return max(r["lower"], lam)

    out = [
        Check("rtt", rtt, tol),
        Check("rtt_inverse", trt, tol),
        Check("double_row_reflection", refl, tol),
        Check("highest_weight", _worst(hw, model, rng, samples, 1), tol),
    ]
    for k in range(2, model.N + 1):
        vecs = ideal_vectors(chain, k, rng, count=3)
        res = _worst(lambda a, b: verify_nested_reflection(chain, k, a, b, vecs), model, rng, max(2, samples // 3), 2)
        out.append(Check(f"nested_reflection_k{k}", res, tol))
    out.append(Check("commutativity", _worst(lambda a, b: commutator_residual(chain, a, b), model, rng, samples, 2), tol))
    return out
