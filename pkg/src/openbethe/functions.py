"""Scalar functions of the rational and trigonometric gl(m|n) models.

Spectral-parameter transforms, R-matrix structure functions ``b, a_i, w_ij``
(plus their barred versions ``f(u, iota(v))``), the coefficient functions used
by the nested Bethe ansatz, the diagonal twist matrix ``M`` and a randomized
identity checker.

Indices are 1-based throughout, matching the usual matrix-unit notation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graded import GradedOperator, GradingSpec

__all__ = [
    "ModelSpec",
    "BoundaryParams",
    "PoleError",
    "rational",
    "trigonometric",
    "spectral_transform",
    "structure_fn",
    "nba_fn",
    "m_matrix",
    "check_identities",
]

POLE_EPS = 1e-13


class PoleError(ZeroDivisionError):
    """Raised when a function is evaluated at (or numerically at) one of its poles."""

    def __init__(self, what: str, where):
        super().__init__(f"pole of {what} at {where}")
        self.what = what
        self.where = where


def _div(num, den, what, where):
    if den == 0 or abs(den) < POLE_EPS * max(1.0, abs(num)):
        raise PoleError(what, where)
    return num / den


@dataclass(frozen=True)
class ModelSpec:
    """A rational (Yangian) or trigonometric (quantum affine) gl(m|n) model.

    ``deformation`` is hbar for the rational family and q for the
    trigonometric one.  ``symmetric_shift`` selects the trigonometric shift
    ``u^{(k)} = u q^{-1/2 + [k]}`` (the inverse of ``u^{(k bar)}``) instead of
    ``u q^{-1/2 + 2[k]}``.
    """

    family: str
    grading: GradingSpec
    deformation: complex
    symmetric_shift: bool = True

    def __post_init__(self):
        if self.family not in ("rational", "trigonometric"):
            raise ValueError(f"unknown family {self.family!r}")
        d = complex(self.deformation)
        object.__setattr__(self, "deformation", d)
        if d == 0:
            raise ValueError("deformation parameter must be nonzero")
        if self.trig and abs(d * d - 1) < 1e-12:
            raise ValueError("q^2 = 1 is a degenerate deformation")

    # ---- basic data -------------------------------------------------
    @property
    def trig(self) -> bool:
        return self.family == "trigonometric"

    @property
    def m(self) -> int:
        return self.grading.m

    @property
    def n(self) -> int:
        return self.grading.n

    @property
    def N(self) -> int:
        return self.grading.dim

    @property
    def hbar(self) -> complex:
        return self.deformation

    @property
    def q(self) -> complex:
        """q for the trigonometric family, 1 for the rational one."""
        return self.deformation if self.trig else 1.0

    def gr(self, i: int) -> int:
        return self.grading.grade(i)

    def _qp(self, e):
        """q**e, identically 1 for the rational family."""
        return self.deformation ** e if self.trig else 1.0

    # ---- spectral transforms ------------------------------------------
    def iota(self, u):
        return 1.0 / u if self.trig else -u

    def tilde(self, u):
        mn = self.m - self.n
        return u * self.deformation ** (mn / 2) if self.trig else u - mn * self.hbar / 2

    def up(self, u, k: int):
        """u^{(k)}."""
        g = self.gr(k)
        if self.trig:
            e = -0.5 + (g if self.symmetric_shift else 2 * g)
            return u * self.deformation ** e
        return u + self.hbar / 2 * (-1) ** g

    def down(self, u, k: int):
        """u^{(k bar)}."""
        g = self.gr(k)
        if self.trig:
            return u * self.deformation ** (0.5 - g)
        return u - self.hbar / 2 * (-1) ** g

    def up_range(self, u, k: int, l: int):
        """u^{(k...l)}; identity when l < k."""
        for j in range(k, l + 1):
            u = self.up(u, j)
        return u

    def down_range(self, u, k: int, l: int):
        for j in range(k, l + 1):
            u = self.down(u, j)
        return u

    def brace(self, u, k):
        """u_{{k}}."""
        return u * self.deformation ** (-k) if self.trig else u + self.hbar * k

    # ---- structure functions ------------------------------------------
    def _idx(self, *ii):
        for i in ii:
            if not 1 <= i <= self.N:
                raise IndexError(f"index {i} outside 1..{self.N}")

    def b(self, u, v):
        if self.trig:
            if u == 0 or v == 0:
                raise PoleError("b", (u, v))
            return u / v - v / u
        return u - v

    def a(self, i, u, v):
        self._idx(i)
        g = self.gr(i)
        if self.trig:
            if u == 0 or v == 0:
                raise PoleError("a", (u, v))
            q = self.deformation
            return u / v * q ** (1 - 2 * g) - v / u * q ** (2 * g - 1)
        return u - v - (-1) ** g * self.hbar

    def w(self, i, j, u, v):
        self._idx(i, j)
        if i == j:
            return self.a(i, u, v) - self.b(u, v)
        if self.trig:
            if u == 0 or v == 0:
                raise PoleError("w", (u, v))
            q = self.deformation
            return (-1) ** self.gr(j) * (q - 1 / q) * (u / v) ** np.sign(j - i)
        return -(-1) ** self.gr(j) * self.hbar

    c = w

    def bb(self, u, v):
        return self.b(u, self.iota(v))

    def ba(self, i, u, v):
        return self.a(i, u, self.iota(v))

    def bw(self, i, j, u, v):
        return self.w(i, j, u, self.iota(v))

    bc = bw

    # ---- nested Bethe ansatz coefficient functions ---------------------
    def f(self, i, u, v):
        num = self.a(i, v, u) * self.bb(self.up(u, i), self.up(v, i))
        return _div(num, self.b(v, u) * self.bb(u, v), f"f_{i}", (u, v))

    def f_tilde(self, i, u, v):
        """The function printed as f~_{i} (index i = (i-1)+1)."""
        num = self.a(i, u, v) * self.ba(i, u, v)
        return _div(num, self.b(u, v) * self.bb(u, v), f"f~_{i}", (u, v))

    def g(self, i, u, v):
        num = self.c(i - 1, i, u, v) * self.bb(self.up(v, i), self.up(v, i))
        return _div(num, self.b(u, v) * self.bb(v, v), f"g_{i}", (u, v))

    def g_tilde(self, i, u, v):
        """g~_{i}; the printed c_{k+1,k} is read with k = i-1."""
        k = i - 1
        sgn = -(-1) ** (self.gr(k) + self.gr(i))
        num = sgn * self.c(i, k, u, v) * self.ba(i, u, u)
        return _div(num, self.b(u, v) * self.bb(u, u), f"g~_{i}", (u, v))

    def h(self, i, u, v):
        num = -self.bc(i - 1, i, self.up(u, i), self.up(v, i))
        return _div(num, self.bb(u, v), f"h_{i}", (u, v))

    def h_tilde(self, i, u, v):
        k = i - 1
        num = self.bc(i, k, self.up(u, k), self.up(v, k)) * self.ba(i, u, u) * self.bb(self.up(v, k), self.up(v, k))
        den = self.bb(u, u) * self.bb(v, v) * self.bb(u, v)
        return _div(num, den, f"h~_{i}", (u, v))

    def psi(self, i, u):
        return _div(self.bc(i + 1, i, u, u), self.ba(i, u, u), f"psi_{i}", u)

    def eta(self, k, u, c_plus):
        ct = self.tilde(c_plus)
        num = self.b(ct, self.up(u, k + 1))
        return _div(num, self.bb(ct, self.down(u, k + 1)), f"eta_{k}", u)

    def chi(self, k, u, boundary: "BoundaryParams | None" = None):
        val = -self._qp(2 * self.gr(k) - 1) * _div(
            self.bb(u, u), self.bb(self.up(u, k), self.up(u, k)), f"chi_{k}", u
        )
        if k == 1 and boundary is not None and boundary.a_plus == 1:
            val *= self.eta(k, u, boundary.c_plus)
        return val

    def e(self, k, u):
        """Closed form of e_k(u), defined through a partial trace of R-bar R."""
        N = self.N
        gs = [self.gr(i) for i in range(1, N + 1)]
        expo = -k + 1 - 2 * self.n - 2 * sum(gs[k - 1:]) + 4 * sum(gs)
        x = self.down_range(u, k, N)
        val = self._qp(expo) * (-1) ** self.gr(k) * self.bb(x, x)
        return _div(val, self.ba(k, u, u), f"e_{k}", u)

    def str_m(self, k):
        """str M^{(k)}: supertrace of M restricted to indices >= k."""
        return sum((-1) ** self.gr(i) * self.m_entry(i) for i in range(k, self.N + 1))

    def m_entry(self, k):
        self._idx(k)
        if not self.trig:
            return 1.0
        gs = [self.gr(i) for i in range(1, k + 1)]
        return self.deformation ** (self.m - self.n - 2 * k + 1 - 2 * self.gr(k) + 4 * sum(gs))


@dataclass(frozen=True)
class BoundaryParams:
    """Diagonal boundary data: K- with a_minus entries of the first type, K+ of NABA type."""

    a_minus: int = 1
    c_minus: complex = 0.0
    a_plus: int = 0
    c_plus: complex = 0.0

    def __post_init__(self):
        if self.a_plus not in (0, 1):
            raise ValueError("a_plus must be 0 or 1")
        if self.a_minus < 0:
            raise ValueError("a_minus must be nonnegative")
        object.__setattr__(self, "c_minus", complex(self.c_minus))
        object.__setattr__(self, "c_plus", complex(self.c_plus))

    def validate(self, model: ModelSpec):
        if self.a_minus > model.N:
            raise ValueError(f"a_minus={self.a_minus} exceeds m+n={model.N}")


def rational(m, n, hbar=1.0) -> ModelSpec:
    return ModelSpec("rational", GradingSpec(m, n), hbar)


def trigonometric(m, n, q, symmetric_shift=True) -> ModelSpec:
    return ModelSpec("trigonometric", GradingSpec(m, n), q, symmetric_shift)


# ---- string-keyed front ends ---------------------------------------------

def spectral_transform(model: ModelSpec, kind: str, u, k=None, l=None):
    """Apply one of ``iota, tilde, up, down, range, brace`` to ``u``."""
    if kind == "iota":
        return model.iota(u)
    if kind == "tilde":
        return model.tilde(u)
    if kind == "up":
        return model.up(u, k)
    if kind == "down":
        return model.down(u, k)
    if kind == "range":
        return model.up_range(u, k, l)
    if kind == "brace":
        return model.brace(u, k)
    raise ValueError(f"unknown transform {kind!r}")


def structure_fn(model: ModelSpec, name: str, u, v, *idx):
    table = {"b": model.b, "a": model.a, "w": model.w,
             "bar_b": model.bb, "bar_a": model.ba, "bar_w": model.bw}
    if name not in table:
        raise ValueError(f"unknown structure function {name!r}")
    return table[name](*idx, u, v)


def nba_fn(model: ModelSpec, name: str, index: int, *args, boundary=None):
    """Evaluate ``f, f_tilde, g, g_tilde, h, h_tilde, psi, chi, eta, e`` by name."""
    if name == "chi":
        return model.chi(index, *args, boundary=boundary)
    fn = getattr(model, name, None)
    if name not in ("f", "f_tilde", "g", "g_tilde", "h", "h_tilde", "psi", "eta", "e") or fn is None:
        raise ValueError(f"unknown function {name!r}")
    return fn(index, *args)


def m_matrix(model: ModelSpec) -> GradedOperator:
    d = [model.m_entry(k) for k in range(1, model.N + 1)]
    return GradedOperator((model.grading,), np.diag(np.asarray(d, dtype=complex)))


# ---- identity checker -----------------------------------------------------

def _rand_point(model, rng):
    z = complex(rng.normal(), rng.normal())
    if model.trig:
        return np.exp(0.4 * z)
    return 1.5 * z


def _rel(lhs, rhs):
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)


def check_identities(model: ModelSpec, trials: int = 100, seed: int = 0) -> dict:
    """Max relative residual of the structure-function identities at random points.

    Returns a dict mapping identity name to residual; identities whose index
    range is empty for the model map to 0.
    """
    rng = np.random.default_rng(seed)
    N = model.N
    out = {"a_shift": 0.0, "w_shift": 0.0, "b_shift": 0.0, "a_minus_w": 0.0, "psi": 0.0}
    done = 0
    while done < trials:
        u, v = _rand_point(model, rng), _rand_point(model, rng)
        try:
            if abs(model.b(u, v)) < 1e-6:
                continue
            i, j = rng.integers(1, N + 1, size=2)
            if N > 1:
                while j == i:
                    j = rng.integers(1, N + 1)
                lhs = model.b(u, v) * model.a(i, model.down(u, j), model.up(v, j))
                rhs = model.a(i, u, v) * model.a(j, u, v) - model.w(i, j, u, v) * model.w(j, i, u, v)
                out["a_shift"] = max(out["a_shift"], _rel(lhs, rhs))
            if N > 2:
                i, j, k = sorted(rng.choice(np.arange(1, N + 1), size=3, replace=False), reverse=True)
                lhs = model.b(u, v) * model.w(i, j, model.down(u, k), model.up(v, k))
                rhs = model.w(i, j, u, v) * model.a(k, u, v) - model.w(i, k, u, v) * model.w(k, j, u, v)
                out["w_shift"] = max(out["w_shift"], _rel(lhs, rhs))
            i = int(rng.integers(1, N + 1))
            lhs = model.b(model.down(u, i), model.up(v, i))
            out["b_shift"] = max(out["b_shift"], _rel(lhs, model.a(i, u, v)))
            i, j = rng.integers(1, N + 1, size=2)
            lhs = model.a(j, u, v) - model.w(i, j, u, v)
            rhs = model.b(u, v) * model._qp(np.sign(j - i) * (-1 + 2 * model.gr(j)))
            out["a_minus_w"] = max(out["a_minus_w"], _rel(lhs, rhs))
            if N > 2:
                i = int(rng.integers(2, N))
                x1 = model.up(u, i - 1)
                x12 = model.up(x1, i)
                lhs = model._qp(2 - 4 * model.gr(i)) * model.psi(i - 1, x1)
                rhs = model.psi(i - 1, x12) * (1 - model.psi(i, model.up(u, i)))
                out["psi"] = max(out["psi"], _rel(lhs, rhs))
        except PoleError:
            continue
        done += 1
    return out
