import numpy as np
import pytest

from openbethe import BoundaryParams, ChainSpec, rational, trigonometric

MODELS = [(2, 0), (3, 0), (1, 1), (2, 1), (1, 2), (2, 2)]
Q = 0.7 + 0.2j


def make_model(family, m, n):
    return rational(m, n, 1.0) if family == "rational" else trigonometric(m, n, Q)


def rpoint(model, rng, scale=1.0):
    z = complex(rng.normal(), rng.normal())
    return complex(np.exp(0.4 * scale * z)) if model.trig else scale * z


def make_chain(family, m, n, L=2, a_minus=1, a_plus=1, seed=0):
    model = make_model(family, m, n)
    rng = np.random.default_rng(seed)
    sites = [rpoint(model, rng, 0.3) for _ in range(L)]
    bp = BoundaryParams(a_minus=a_minus, c_minus=complex(rng.normal(), rng.normal()),
                        a_plus=a_plus, c_plus=complex(rng.normal(), rng.normal()))
    return ChainSpec(model, L, sites, bp)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
