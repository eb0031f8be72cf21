"""Nested Bethe ansatz: eigenvalues, Bethe equations and a multi-start solver.

Conventions.  ``Lhat_k(u)`` is the vacuum eigenvalue of the nested diagonal
entry at its shifted point, i.e. of ``d^{(k)}_kk(u^{(k)})``.  The level-k
eigenvalue ``Ghat_k(u)`` obeys

    Ghat_k(u) = mt_k(u) F_k(u) Lhat_k(u; dressed) + Ft_{k+1}(u) Ghat_{k+1}(u^{bar(k+1)})

with ``F_k(u) = prod_j f_k(u, u_kj)``, ``Ft_{k+1}(u) = prod_j f~_{k+1}(u, u_kj)``
and ``Ghat_{m+n}(u) = (-1)^{[m+n]} m_{m+n} Lhat_{m+n}(u; dressed)``.  The
transfer eigenvalue is ``Lambda(u) = Ghat_1(u^{bar(1)})``.  Bethe equations are
the cancellation of the residues of this expression at ``u = u_kj``.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .boundary import k_naba, kminus_entries
from .chain import ChainSpec, WeightTable, _lambda_prime_fn, boundary_weight, kappa_eff
from .functions import ModelSpec, PoleError

__all__ = [
    "BetheState",
    "BetheSystem",
    "hat_lambda",
    "eigenvalue",
    "be_residual",
    "gamma",
    "solve",
    "uq22_reference_ratio",
    "COLLISION_EPS",
]

COLLISION_EPS = 1e-8


@dataclass
class BetheState:
    """Root families ``roots[k-1] = (u_k1, ..., u_kM_k)``, k = 1..m+n-1."""

    counts: tuple
    roots: tuple
    residual: float = float("nan")

    def __post_init__(self):
        roots = tuple(tuple(complex(x) for x in fam) for fam in self.roots)
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise ValueError("magnon counts must be nonnegative")
        if tuple(len(f) for f in roots) != counts:
            raise ValueError(f"root families {tuple(len(f) for f in roots)} do not match counts {counts}")
        self.counts, self.roots = counts, roots
        for k, fam in enumerate(roots, start=1):
            for x, y in itertools.combinations(fam, 2):
                if abs(x - y) < COLLISION_EPS:
                    raise ValueError(f"colliding roots in family {k}: {x} ~ {y}")

    @classmethod
    def empty(cls, model: ModelSpec) -> "BetheState":
        return cls((0,) * (model.N - 1), ((),) * (model.N - 1), 0.0)

    @classmethod
    def from_flat(cls, counts, z, residual=float("nan")) -> "BetheState":
        roots, pos = [], 0
        for c in counts:
            roots.append(tuple(z[pos:pos + c]))
            pos += c
        return cls(tuple(counts), tuple(roots), residual)

    @property
    def flat(self) -> np.ndarray:
        return np.array([x for fam in self.roots for x in fam], dtype=complex)

    def fam(self, k: int) -> tuple:
        """Family k (1-based); empty outside 1..m+n-1."""
        if 1 <= k <= len(self.roots):
            return self.roots[k - 1]
        return ()

    def to_json(self) -> dict:
        return {"counts": list(self.counts),
                "roots": [[[x.real, x.imag] for x in fam] for fam in self.roots],
                "residual": self.residual}


class BetheSystem:
    """Eigenvalue and Bethe-equation evaluator bound to one chain."""

    def __init__(self, chain: ChainSpec):
        self.chain = chain
        self.model = chain.model
        self.weights = WeightTable.fundamental(chain)
        self.weights.lam_prime_fn = _lambda_prime_fn(chain)

    # ---- vacuum data -----------------------------------------------------
    def _kappa(self, x):
        p = self.chain.boundary
        return kminus_entries(self.model, p.a_minus, p.c_minus, x)

    def hat_lambda(self, k: int, u, form: str = "weights"):
        """Lhat_k(u).

        ``weights``: K_k(x) lambda_k(x) lambda'_k(iota(x)) with x = u^{(1..k)}.
        ``subtract``: Lambda_k(x) minus the psi-weighted lower Lambda_i(x).
        ``printed_argument``: the weight form with lambda'_k evaluated at x itself
        (kept only as a diagnostic; it does not reproduce the vacuum eigenvalue).
        """
        model = self.model
        x = model.up_range(u, 1, k)
        if form in ("weights", "printed_argument"):
            y = model.iota(x) if form == "weights" else x
            return (kappa_eff(model, self._kappa(x), k, x) * self.weights.lam(k, x)
                    * self.weights.lam_prime(k, y))
        if form == "subtract":
            out = boundary_weight(self.chain, k, x, self.weights)
            uk = model.up(u, k)
            for i in range(1, k):
                expo = 2 * (k - 1 - i) - 4 * sum(model.gr(l) for l in range(i + 1, k))
                out -= model._qp(expo) * model.psi(i, model.up(uk, i)) * boundary_weight(
                    self.chain, i, x, self.weights)
            return out
        raise ValueError(f"unknown form {form!r}")

    def dressing(self, state: BetheState, k: int, u):
        """prod_{p<=k-2} prod_j 1 / f~_{p+1}(u^{(p+1..k)}, u_pj)."""
        model = self.model
        out = 1.0 + 0j
        for p in range(1, k - 1):
            x = model.up_range(u, p + 1, k)
            for v in state.fam(p):
                out /= model.f_tilde(p + 1, x, v)
        return out

    def hat_lambda_dressed(self, state: BetheState, k: int, u):
        return self.hat_lambda(k, u) * self.dressing(state, k, u)

    def k_factor(self, u):
        p = self.chain.boundary
        return 1.0 if p.a_plus == 0 else k_naba(self.model, p.c_plus, u)

    def m_tilde(self, k: int, u):
        """Coefficient of the hatted d_kk in the level-k transfer matrix."""
        model = self.model
        N = model.N
        lead = (-1) ** model.gr(k) * model.m_entry(k)
        if k == N:
            return lead
        uk = model.up(u, k)
        if k == 1:
            lead *= self.k_factor(uk)
        return lead + model.str_m(k + 1) * model.psi(k, uk)

    def m_tilde_appendix(self, k: int, u):
        """The closed form q^{1-2[k]} abar_{k+1}(u,u) e_{k+1}(u) / bbar(u,u), k != 1."""
        model = self.model
        return (model._qp(1 - 2 * model.gr(k)) * model.ba(k + 1, u, u) * model.e(k + 1, u)
                / model.bb(u, u))

    # ---- eigenvalue ------------------------------------------------------
    def _F(self, state, k, u, skip=None):
        out = 1.0 + 0j
        for i, v in enumerate(state.fam(k)):
            if i != skip:
                out *= self.model.f(k, u, v)
        return out

    def _Ft(self, state, k, u, skip=None):
        """prod over family k-1 of f~_k(u, u_{k-1,i})."""
        out = 1.0 + 0j
        for i, v in enumerate(state.fam(k - 1)):
            if i != skip:
                out *= self.model.f_tilde(k, u, v)
        return out

    def level_term(self, state: BetheState, k: int, u):
        """mt_k(u) F_k(u) Lhat_k(u; dressed)."""
        return self.m_tilde(k, u) * self._F(state, k, u) * self.hat_lambda_dressed(state, k, u)

    def gamma_hat(self, state: BetheState, k: int, u):
        """Ghat_k(u), the eigenvalue of the level-k transfer matrix at u^{(k)}."""
        N = self.model.N
        out = self.level_term(state, k, u)
        if k < N:
            w = self.model.down(u, k + 1)
            out += self._Ft(state, k + 1, u) * self.gamma_hat(state, k + 1, w)
        return out

    def eigenvalue(self, state: BetheState, u, form: str = "recursion"):
        """Lambda(u).  ``printed`` evaluates the closed sum with the f~ argument as printed."""
        model = self.model
        if form == "recursion":
            return self.gamma_hat(state, 1, model.down(u, 1))
        if form not in ("printed", "closed"):
            raise ValueError(f"unknown form {form!r}")
        # closed sum over levels; "printed" evaluates f~_k at u^{(k+1..)}, "closed" at u^{(k..)}
        N = model.N
        ref = model.down_range(u, 1, N - 1)
        out = 0j
        for k in range(1, N + 1):
            x = model.up_range(ref, k + 1, N - 1)
            y = x if form == "printed" else model.up_range(ref, k, N - 1)
            if k == N and form == "closed":
                # the last level carries no shift of its own
                x = model.down(x, N)
            term = self.m_tilde(k, x) * self.hat_lambda(k, x) * self._F(state, k, x)
            for v in state.fam(k - 1):
                term *= model.f_tilde(k, y, v)
            out += term
        return out

    # ---- Bethe equations -------------------------------------------------
    def _res_f(self, k, v):
        """lim_{u->v} b(u,v) f_k(u,v)."""
        m = self.model
        return -m.a(k, v, v) * m.bb(m.up(v, k), m.up(v, k)) / m.bb(v, v)

    def _res_ft(self, k, v):
        """lim_{u->v} b(u,v) f~_k(u,v)."""
        m = self.model
        return m.a(k, v, v) * m.ba(k, v, v) / m.bb(v, v)

    def be_ratio(self, state: BetheState, k: int, j: int, form: str = "residue"):
        """Ratio that equals 1 on shell, for root u_kj (k, j 1-based).

        ``residue``: cancellation of the poles of the level-k and level-(k+1)
        terms of Ghat_k.  ``printed``: LHS/RHS of the final printed form.
        """
        model = self.model
        v = state.fam(k)[j - 1]
        vb = model.down(v, k + 1)
        num_side = self.hat_lambda(k, v) * self._F(state, k, v, skip=j - 1)
        rhs = self.m_tilde(k + 1, vb) * self._F(state, k + 1, vb) * self.hat_lambda(k + 1, vb)
        for i in range(len(state.fam(k))):
            if i != j - 1:
                rhs *= model.f_tilde(k + 1, v, state.fam(k)[i])
        for w in state.fam(k - 1):
            rhs /= model.f_tilde(k, model.up(v, k), w)
        if form == "residue":
            pref = -self._res_ft(k + 1, v) / (self._res_f(k, v) * self.m_tilde(k, v))
        elif form == "printed":
            pref = model.chi(k, v, self.chain.boundary) / model.e(k + 1, v)
        else:
            raise ValueError(f"unknown form {form!r}")
        return num_side / (pref * rhs)

    def be_residual(self, state: BetheState, k: int, j: int, form: str = "residue"):
        return self.be_ratio(state, k, j, form) - 1.0

    def max_residual(self, state: BetheState, form: str = "residue") -> float:
        out = 0.0
        for k, fam in enumerate(state.roots, start=1):
            for j in range(1, len(fam) + 1):
                out = max(out, abs(self.be_residual(state, k, j, form)))
        return out

    def log_system(self, counts, z) -> np.ndarray:
        st = BetheState.from_flat(counts, z)
        out = []
        for k, c in enumerate(counts, start=1):
            for j in range(1, c + 1):
                out.append(np.log(self.be_ratio(st, k, j)))
        return np.array(out, dtype=complex)


# ---- functional wrappers ------------------------------------------------------

def hat_lambda(chain: ChainSpec, k: int, u, form: str = "weights"):
    return BetheSystem(chain).hat_lambda(k, u, form)


def eigenvalue(chain: ChainSpec, state: BetheState, u, form: str = "recursion"):
    return BetheSystem(chain).eigenvalue(state, u, form)


def be_residual(chain: ChainSpec, state: BetheState, k: int, j: int, form: str = "residue"):
    return BetheSystem(chain).be_residual(state, k, j, form)


def gamma(chain: ChainSpec, state: BetheState, k: int, u):
    """Ghat_{k+1}(u) in the conventions of this module."""
    return BetheSystem(chain).gamma_hat(state, k + 1, u)


# ---- solver ------------------------------------------------------------------

def _newton(system: BetheSystem, counts, z0, max_iter=200, tol=1e-12, floor=2.0 ** -20):
    z = np.array(z0, dtype=complex)
    try:
        g = system.log_system(counts, z)
    except (PoleError, ValueError, ZeroDivisionError, FloatingPointError):
        return None
    for _ in range(max_iter):
        ng = np.linalg.norm(g)
        if not np.isfinite(ng):
            return None
        if ng < tol:
            break
        J = np.empty((g.size, z.size), dtype=complex)
        for i in range(z.size):
            h = 1e-7 * max(1.0, abs(z[i]))
            zp = z.copy()
            zp[i] += h
            try:
                J[:, i] = (system.log_system(counts, zp) - g) / h
            except (PoleError, ValueError, ZeroDivisionError, FloatingPointError):
                return None
        try:
            step = np.linalg.lstsq(J, -g, rcond=None)[0]
        except np.linalg.LinAlgError:
            return None
        t = 1.0
        while t >= floor:
            zn = z + t * step
            try:
                gn = system.log_system(counts, zn)
                if np.all(np.isfinite(gn)) and np.linalg.norm(gn) < ng:
                    break
            except (PoleError, ValueError, ZeroDivisionError, FloatingPointError):
                pass
            t /= 2
        else:
            return None
        z, g = zn, gn
    return z


def _guess(model: ModelSpec, chain: ChainSpec, counts, rng, free: bool):
    out = []
    for c in counts:
        for _ in range(c):
            if free:
                a = chain.site_params[rng.integers(chain.L)]
                s = rng.choice([-1, 1])
                if model.trig:
                    a = model.iota(a)
                    out.append(a * model.q ** (s / 2) * np.exp(complex(rng.normal(0, 0.1), rng.normal(0, 0.1))))
                else:
                    a = model.iota(a)
                    out.append(a + s * model.hbar / 2 + complex(rng.normal(0, 0.3), rng.normal(0, 0.3)))
            else:
                if model.trig:
                    out.append(np.exp(complex(rng.normal(0, 0.7), rng.normal(0, 1.5))))
                else:
                    out.append(complex(rng.normal(0, 1.0), rng.normal(0, 1.0)))
    return np.array(out, dtype=complex)


def _orbit(model: ModelSpec, x: complex, maps: tuple) -> list:
    out = [x]
    for g in maps:
        out += [g(y) for y in out]
    return out


def _symmetry_maps(model: ModelSpec) -> tuple:
    """Candidate root symmetries: u -> iota(u), and u -> -u for the trigonometric family."""
    maps = (model.iota,)
    if model.trig:
        maps += (lambda x: -x,)
    return maps


def _canon(model: ModelSpec, x: complex, maps: tuple, digits: int) -> tuple:
    return min((round(y.real, digits), round(y.imag, digits)) for y in _orbit(model, x, maps))


def _key(model, state: BetheState, maps: tuple, digits=6):
    return tuple(tuple(sorted(_canon(model, x, maps, digits) for x in fam)) for fam in state.roots)


def _degenerate(model, state: BetheState, eps=1e-6, far=1e6) -> bool:
    """Roots at infinity, at fixed points of a root symmetry, or mapped onto each other."""
    maps = [model.iota]
    if model.trig:
        maps += [lambda x: -x, lambda x: -model.iota(x)]
    for fam in state.roots:
        for x in fam:
            size = max(abs(x), 1 / abs(x)) if model.trig else abs(x)
            if not size < far:
                return True
            if any(abs(x - g(x)) < eps * max(1.0, abs(x)) for g in maps):
                return True
        for x, y in itertools.combinations(fam, 2):
            if any(abs(x - g(y)) < eps * max(1.0, abs(x)) for g in maps):
                return True
    return False


def verified_symmetries(system: BetheSystem, counts, rng, trials: int = 3) -> tuple:
    """Root maps under which the Bethe ratios are empirically invariant.

    A map is kept if sending one root through it leaves every ratio unchanged
    or inverted, at ``trials`` random configurations.
    """
    model = system.model
    if sum(counts) == 0:
        return ()
    kept = []
    for g in _symmetry_maps(model):
        ok = True
        for _ in range(trials):
            z = _guess(model, system.chain, counts, rng, free=False)
            try:
                st = BetheState.from_flat(counts, z)
                zr = z.copy()
                zr[0] = g(zr[0])
                sr = BetheState.from_flat(counts, zr)
                for k, c in enumerate(counts, start=1):
                    for j in range(1, c + 1):
                        a, b = system.be_ratio(st, k, j), system.be_ratio(sr, k, j)
                        if abs(a - b) > 1e-8 * max(1.0, abs(a)) and abs(a * b - 1) > 1e-8:
                            ok = False
            except (PoleError, ValueError, ZeroDivisionError):
                continue
        if ok:
            kept.append(g)
    return tuple(kept)


def solve(chain: ChainSpec, counts: Sequence[int], seed: int = 0, max_starts: int = 40,
          tol: float = 1e-10, max_iter: int = 200) -> list:
    """Multi-start damped Newton on the log Bethe equations.

    Returns deduplicated states with residual <= tol; an empty list means no
    start converged (a warning carries the diagnostics).
    """
    model = chain.model
    counts = tuple(int(c) for c in counts)
    if len(counts) != model.N - 1:
        raise ValueError(f"expected {model.N - 1} magnon counts, got {len(counts)}")
    system = BetheSystem(chain)
    if sum(counts) == 0:
        return [BetheState.empty(model)]
    rng = np.random.default_rng(seed)
    maps = verified_symmetries(system, counts, rng)
    found, keys = [], set()
    failures = 0
    for s in range(max_starts):
        z0 = _guess(model, chain, counts, rng, free=(s % 3 != 2))
        z = _newton(system, counts, z0, max_iter=max_iter)
        if z is None:
            failures += 1
            continue
        try:
            st = BetheState.from_flat(counts, z)
            res = system.max_residual(st)
        except (PoleError, ValueError, ZeroDivisionError):
            failures += 1
            continue
        if not res <= tol or _degenerate(model, st):
            failures += 1
            continue
        st.residual = res
        k = _key(model, st, maps)
        if k not in keys:
            keys.add(k)
            found.append(st)
    if not found:
        warnings.warn(f"no converged Bethe state for counts {counts} ({failures} failed starts)")
    return found


# ---- reference three-family equations for U_q(2|2) ---------------------------

def uq22_reference_ratio(chain: ChainSpec, state: BetheState, k: int, j: int, corrected: bool = False):
    """LHS/RHS of the closed three-family U_q(2|2) equations (a+ = 1, a- = 2).

    Transcribed literally, site parameters b_s = chain.site_params.  Two
    denominators read (w/x q^{-1/2} - w/x q^{1/2}); ``corrected=True`` replaces
    them by (w/x q^{-1/2} - x/w q^{1/2})-type differences.
    """
    model = chain.model
    if not model.trig or (model.m, model.n) != (2, 2):
        raise ValueError("reference equations exist for trigonometric gl(2|2) only")
    q = model.deformation
    h = np.sqrt(q)
    cp, cm = chain.boundary.c_plus, chain.boundary.c_minus
    x = state.fam(k)[j - 1]

    def d(a, b, e):
        # a/b q^e - b/a q^-e
        return a / b * e - b / a / e

    def s(a, b, e):
        # a b q^e - q^-e / (a b)
        return a * b * e - 1 / (e * a * b)

    if k == 1:
        lhs = (cp * x * h - 1 / (h * cp * x)) / (x / cp * h - cp / x / h)
        for b in chain.site_params:
            lhs *= d(x, b, h) * s(x, b, h) / (d(x, b, 1 / h) * s(x, b, 1 / h))
        rhs = 1.0 + 0j
        for i, y in enumerate(state.fam(1)):
            if i != j - 1:
                rhs *= d(x, y, q) * s(x, y, q) / (d(y, x, q) * s(x, y, 1 / q))
        for w in state.fam(2):
            den = (d(w, x, 1 / h) if corrected else w / x / h - w / x * h) * s(w, x, h)
            rhs *= d(w, x, 1 / h) * s(w, x, 1 / h) / den
        return lhs / rhs
    if k == 2:
        lhs = (x * x / q - cm * cm * q) / (x ** -2 - cm * cm * q * q) * (-1) ** (len(state.fam(2)) + 1)
        rhs = 1.0 + 0j
        for y in state.fam(1):
            rhs *= d(x, y, 1 / h) * s(y, x, 1 / h) / (d(x, y, h) * s(y, x, h))
        for w in state.fam(3):
            den = (d(w, x, h) if corrected else w / x * h - w / x / h) * s(w, x, 1 / h)
            rhs *= d(w, x, 1 / h) * s(w, x, h) / den
        return lhs / rhs
    if k == 3:
        rhs = 1.0 + 0j
        for y in state.fam(2):
            rhs *= d(x, y, h) * s(y, x, h) / (d(x, y, 1 / h) * s(y, x, 1 / h))
        for i, z in enumerate(state.fam(3)):
            if i != j - 1:
                rhs *= d(x, z, 1 / q) * s(x, z, 1 / q) / (d(z, x, 1 / q) * s(x, z, q))
        return -1.0 / rhs
    raise IndexError(f"k={k} outside 1..3")
