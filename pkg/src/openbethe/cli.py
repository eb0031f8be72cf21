"""Command-line front end: ``openbethe <command> [--config FILE] [flags]``.

Exit codes: 0 all checks within tolerance, 1 some residual above tolerance,
2 malformed or invalid configuration, 3 dimension cap exceeded, 4 the Bethe
solver found no converged state (the report is still written).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bethe import BetheState, BetheSystem, solve
from .chain import DEFAULT_CAP, ChainSpec, DimensionCapError
from .checks import Check, chain_checks, identity_checks, model_checks
from .functions import BoundaryParams, PoleError, rational, trigonometric
from .transfer import NoMatchError, brute_spectrum, default_samples, match_eigenvalue
from .vectors import (
    ZeroVectorError,
    compare_vectors,
    phi3_11,
    vector_aba,
    vector_recursion,
    vector_supertrace,
    verify_eigenvector,
)

COMMANDS = ("verify", "identities", "spectrum", "solve-bethe", "check-vector")
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CAP, EXIT_NOCONV = 0, 1, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    chain: ChainSpec
    magnons: tuple | None = None
    tol: float = 1e-10
    seed: int = 0
    threads: int = 1
    max_starts: int = 40
    samples: int = 5
    out: str | None = None
    csv: str | None = None
    extra: dict = field(default_factory=dict)


# ---- parsing -----------------------------------------------------------------

def _complex(x, what) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2 or not all(isinstance(t, (int, float)) for t in x):
            raise ConfigError(f"{what}: expected [re, im]")
        return complex(x[0], x[1])
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, str):
        s = x.strip()
        try:
            if "," in s:
                return _complex([float(t) for t in s.split(",")], what)
            return complex(s.replace(" ", ""))
        except ValueError:
            pass
    raise ConfigError(f"{what}: cannot read {x!r} as a complex number")


def _int(x, what, lo=None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(f"{what}: expected an integer, got {x!r}")
    if lo is not None and x < lo:
        raise ConfigError(f"{what}: must be >= {lo}")
    return x


def load_json(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    return doc


_TOP_KEYS = {"model", "L", "sites", "boundary", "magnons", "tol", "seed", "symmetric_shift",
             "cap", "threads", "max_starts", "samples"}


def build_config(command: str, doc: dict, ns: argparse.Namespace | None = None) -> RunConfig:
    """Merge a JSON document with command-line overrides and validate."""
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    for key in ("model", "boundary"):
        if not isinstance(doc.get(key, {}), dict):
            raise ConfigError(f"{key} must be an object")
    model = dict(doc.get("model", {}))
    bnd = dict(doc.get("boundary", {}))
    top = {k: v for k, v in doc.items() if k not in ("model", "boundary")}
    if ns is not None:
        for key, dest, target in [("family", "model", model), ("m", "m", model), ("n", "n", model),
                                  ("hbar", "hbar", model), ("q", "q", model),
                                  ("a_minus", "a_minus", bnd), ("c_minus", "c_minus", bnd),
                                  ("a_plus", "a_plus", bnd), ("c_plus", "c_plus", bnd),
                                  ("L", "L", top), ("sites", "sites", top), ("magnons", "magnons", top),
                                  ("tol", "tol", top), ("seed", "seed", top), ("threads", "threads", top),
                                  ("cap", "cap", top), ("max_starts", "max_starts", top),
                                  ("samples", "samples", top)]:
            val = getattr(ns, dest, None)
            if val is not None:
                target[key] = val
        if getattr(ns, "printed_shift", False):
            top["symmetric_shift"] = False

    family = model.get("family", "rational")
    if family not in ("rational", "trigonometric"):
        raise ConfigError(f"model.family must be 'rational' or 'trigonometric', got {family!r}")
    m = _int(model.get("m", 2), "model.m", 0)
    n = _int(model.get("n", 0), "model.n", 0)
    if m + n < 2:
        raise ConfigError("m + n must be at least 2")
    if family == "rational":
        if "q" in model:
            raise ConfigError("model.q given for a rational model")
        mod = rational(m, n, _complex(model.get("hbar", 1.0), "model.hbar"))
    else:
        if "hbar" in model:
            raise ConfigError("model.hbar given for a trigonometric model")
        if "q" not in model:
            raise ConfigError("trigonometric model needs model.q")
        shift = top.get("symmetric_shift", True)
        if not isinstance(shift, bool):
            raise ConfigError("symmetric_shift must be a boolean")
        mod = trigonometric(m, n, _complex(model["q"], "model.q"), symmetric_shift=shift)

    L = _int(top.get("L", 2), "L", 1)
    sites = top.get("sites")
    if sites is None:
        sites = [1.0 if mod.trig else 0.0] * L
    if isinstance(sites, str):
        sites = [s for s in sites.split(";") if s.strip()]
    if not isinstance(sites, list) or len(sites) != L:
        raise ConfigError(f"sites: expected a list of {L} complex numbers")
    sites = [_complex(s, f"sites[{i}]") for i, s in enumerate(sites)]

    try:
        bp = BoundaryParams(a_minus=_int(bnd.get("a_minus", 1), "boundary.a_minus", 0),
                            c_minus=_complex(bnd.get("c_minus", 0.0), "boundary.c_minus"),
                            a_plus=_int(bnd.get("a_plus", 0), "boundary.a_plus", 0),
                            c_plus=_complex(bnd.get("c_plus", 0.0), "boundary.c_plus"))
    except ValueError as e:
        raise ConfigError(f"boundary: {e}") from None

    magnons = top.get("magnons")
    if isinstance(magnons, str):
        try:
            magnons = [int(t) for t in magnons.split(",")]
        except ValueError:
            raise ConfigError(f"magnons: cannot read {magnons!r}") from None
    if magnons is not None:
        if not isinstance(magnons, list):
            raise ConfigError("magnons must be a list of integers")
        magnons = tuple(_int(x, "magnons[]", 0) for x in magnons)
        if len(magnons) != m + n - 1:
            raise ConfigError(f"magnons: expected {m + n - 1} counts, got {len(magnons)}")
    if command in ("solve-bethe", "check-vector") and magnons is None:
        raise ConfigError(f"{command} needs magnons")

    tol = top.get("tol", 1e-10)
    if not isinstance(tol, (int, float)) or isinstance(tol, bool) or tol <= 0:
        raise ConfigError("tol must be a positive number")
    cap = _int(top.get("cap", DEFAULT_CAP), "cap", 1)
    try:
        bp.validate(mod)
        chain = ChainSpec(mod, L, sites, bp, cap=cap)
    except DimensionCapError:
        raise
    except ValueError as e:
        raise ConfigError(str(e)) from None
    return RunConfig(command=command, chain=chain, magnons=magnons, tol=float(tol),
                     seed=_int(top.get("seed", 0), "seed", 0),
                     threads=_int(top.get("threads", 1), "threads", 1),
                     max_starts=_int(top.get("max_starts", 40), "max_starts", 1),
                     samples=_int(top.get("samples", 5), "samples", 2))


# ---- commands ------------------------------------------------------------------

def _cj(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _map(cfg: RunConfig, fn, items):
    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def _state_report(cfg: RunConfig, system: BetheSystem, spec, st: BetheState) -> tuple[dict, list]:
    chain = cfg.chain
    row = {"roots": st.to_json()["roots"], "be_residual": system.max_residual(st)}
    checks = [Check("be_residual", row["be_residual"], cfg.tol)]
    try:
        b, err = match_eigenvalue(spec, lambda u: system.eigenvalue(st, u))
        row["matched_branch"], row["match_error"] = b, err
    except NoMatchError as e:
        row["matched_branch"], row["match_error"] = None, str(e)
    scale = max(np.max(np.abs(np.asarray(spec.eigenvalues))), 1.0)
    ok = isinstance(row["match_error"], float) and row["match_error"] <= 1e-8 * scale
    checks.append(Check("eigenvalue_match", row["match_error"] if ok else float("inf"), 1e-8 * scale))
    try:
        vec = vector_supertrace(chain, st)
        row["eigen_residual"] = verify_eigenvector(chain, vec, spec.u_samples, system)
        checks.append(Check("eigen_residual", row["eigen_residual"], 1e-8))
    except (DimensionCapError, ZeroVectorError) as e:
        row["eigen_residual"] = None
        row["vector_error"] = str(e)
    return row, checks


def _vector_report(cfg: RunConfig, system: BetheSystem, st: BetheState, us) -> tuple[dict, list]:
    chain = cfg.chain
    row = {"roots": st.to_json()["roots"], "be_residual": system.max_residual(st), "vectors": {}}
    checks = []
    vecs = {}
    builders = {"recursion": vector_recursion, "supertrace": vector_supertrace}
    if not any(st.counts[1:]):
        builders = {"aba": vector_aba, **builders}
    if len(st.counts) >= 2 and st.counts[:2] == (1, 1) and not any(st.counts[2:]):
        builders["phi3_11"] = phi3_11
    for name, fn in builders.items():
        try:
            v = fn(chain, st)
        except ZeroVectorError as e:
            row["vectors"][name] = {"error": str(e)}
            checks.append(Check(f"{name}_nonzero", float("inf"), cfg.tol))
            continue
        vecs[name] = v.vector
        res = verify_eigenvector(chain, v, us, system)
        row["vectors"][name] = {"eigen_residual": res, "norm": v.norm}
        checks.append(Check(f"{name}_eigen_residual", res, 1e-8))
    names = list(vecs)
    row["agreement"] = []
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            rel, ratio = compare_vectors(vecs[names[i]], vecs[names[j]])
            row["agreement"].append({"pair": [names[i], names[j]], "relative_difference": rel,
                                     "ratio": _cj(ratio)})
            checks.append(Check(f"agree_{names[i]}_{names[j]}", rel, cfg.tol))
    return row, checks


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Execute one command; returns (exit code, report)."""
    chain = cfg.chain
    report: dict = {"command": cfg.command, "checks": []}
    checks: list = []
    code_extra = EXIT_OK
    if cfg.command == "verify":
        checks = model_checks(chain.model, chain.boundary, seed=cfg.seed, tol=cfg.tol) + \
            chain_checks(chain, seed=cfg.seed, tol=cfg.tol)
    elif cfg.command == "identities":
        checks = identity_checks(chain.model, seed=cfg.seed, tol=cfg.tol)
    elif cfg.command == "spectrum":
        spec = brute_spectrum(chain, default_samples(chain, cfg.samples))
        report["spectrum"] = spec.to_json()
        report["joint_eigenbasis"] = spec.joint_eigenbasis_flag
        report["_csv"] = spec
    elif cfg.command in ("solve-bethe", "check-vector"):
        if chain.model.N ** (chain.L + sum(cfg.magnons)) > chain.cap:
            raise DimensionCapError(
                f"(m+n)^(L+sum M) = {chain.model.N ** (chain.L + sum(cfg.magnons))} exceeds cap {chain.cap}")
        states = solve(chain, cfg.magnons, seed=cfg.seed, max_starts=cfg.max_starts, tol=cfg.tol)
        system = BetheSystem(chain)
        us = default_samples(chain, cfg.samples)
        if cfg.command == "solve-bethe":
            spec = brute_spectrum(chain, us)
            rows = _map(cfg, lambda st: _state_report(cfg, system, spec, st), states)
        else:
            rows = _map(cfg, lambda st: _vector_report(cfg, system, st, us), states)
        report["bethe"] = [r for r, _ in rows]
        checks = [c for _, cs in rows for c in cs]
        if not states:
            code_extra = EXIT_NOCONV
    else:
        raise ConfigError(f"unknown command {cfg.command!r}")
    report["checks"] = [c.to_json() for c in checks]
    if code_extra:
        return code_extra, report
    return (EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL), report


def _write_csv(path: str, spec):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["branch", "u_sample", "re", "im"])
        for s, (u, row) in enumerate(zip(spec.u_samples, spec.eigenvalues)):
            for b, z in enumerate(row):
                w.writerow([b, s, complex(z).real, complex(z).imag])


def _clean(x):
    """JSON-safe copy: non-finite floats become strings."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


# ---- argparse ----------------------------------------------------------------

def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="openbethe",
                                description="Nested Bethe ansatz workbench for open gl(m|n) chains.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON configuration file ('-' for stdin)")
    p.add_argument("--model", dest="model", choices=("rational", "trigonometric"))
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--hbar", help="complex, e.g. 1 or 0.5+0.1j or 0.5,0.1")
    p.add_argument("--q", help="complex deformation parameter")
    p.add_argument("-L", "--L", dest="L", type=int)
    p.add_argument("--sites", help="semicolon-separated complex site parameters")
    p.add_argument("--a-minus", dest="a_minus", type=int)
    p.add_argument("--c-minus", dest="c_minus")
    p.add_argument("--a-plus", dest="a_plus", type=int)
    p.add_argument("--c-plus", dest="c_plus")
    p.add_argument("--magnons", help="comma-separated counts M_1,...,M_{m+n-1}")
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--cap", type=int)
    p.add_argument("--max-starts", dest="max_starts", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--printed-shift", action="store_true",
                   help="trigonometric u^(k) with the unsymmetrized exponent")
    p.add_argument("--out", help="write the JSON report here (default stdout)")
    p.add_argument("--csv", help="write the eigenvalue table here (spectrum)")
    return p


def main(argv=None) -> int:
    ns = make_parser().parse_args(argv)
    try:
        doc = {}
        if ns.config:
            text = sys.stdin.read() if ns.config == "-" else open(ns.config).read()
            doc = load_json(text)
        cfg = build_config(ns.command, doc, ns)
        cfg.out, cfg.csv = ns.out, ns.csv
        code, report = run(cfg)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DimensionCapError as e:
        print(f"dimension cap: {e}", file=sys.stderr)
        return EXIT_CAP
    except PoleError as e:
        print(f"pole: {e}", file=sys.stderr)
        return EXIT_FAIL
    spec = report.pop("_csv", None)
    if cfg.csv and spec is not None:
        _write_csv(cfg.csv, spec)
    text = json.dumps(_clean(report), indent=2, sort_keys=True)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
