"""Named identity suites over built-in parameter grids.

Each suite returns a list of :class:`Check` records; a check passes when its
residual is at most its tolerance.  Exact checks use tolerance 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import bessel, derivation, dunkl_ops, kernels
from . import poly_oracle as po

SUITES = ("bessel", "kernels", "eigen", "lemma1", "opdam", "derivation")

DEFAULT_KS = (0.5, 1.0, 2.0)
DEFAULT_LAMBDAS = ((1.0, 0.0, -1.0), (1.5, 0.2, -1.7), (3.0, -1.0, -2.0))
DEFAULT_MUS = ((0.3, 0.1, -0.4), (0.2, 0.2, -0.1), (-0.5, 0.6, 0.1), (0.7, -0.3, 0.25), (0.0, 0.0, 0.0))
NORMALIZATION_KS = (0.3, 0.5, 1.0, 1.7, 3.0)
NORMALIZATION_LAMBDAS = ((1.0, 0.0, -1.0), (2.0, 0.0, -2.0), (1.5, 0.2, -1.7), (3.0, -1.0, -2.0))


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tol: float

    @property
    def ok(self) -> bool:
        return bool(self.residual <= self.tol)


@dataclass
class SuiteConfig:
    ks: Sequence[float] = DEFAULT_KS
    lambdas: Sequence[Sequence[float]] = DEFAULT_LAMBDAS
    mus: Sequence[Sequence[float]] = DEFAULT_MUS
    n_nodes: int = kernels.DEFAULT_NODES
    series_degree: int = 6
    exact_ks: Sequence[str] = ("1/2", "1")
    tol: float | None = None
    extra: dict = field(default_factory=dict)


def _worst(name: str, values, tol: float) -> Check:
    return Check(name, float(max(values)) if len(values) else 0.0, tol)


def bessel_suite(cfg: SuiteConfig) -> list[Check]:
    z = np.concatenate([-np.geomspace(1e-3, bessel.DESK_SCALE, 60), np.geomspace(1e-3, bessel.DESK_SCALE, 60)])
    alphas = sorted({k - 0.5 for k in cfg.ks} | {-0.2, 0.0, 1.5, 3.7})
    rows = [bessel.identity_residuals(a, z) for a in alphas]
    tol = cfg.tol if cfg.tol is not None else 1e-12
    out = [_worst(f"bessel.{name}", [r[name] for r in rows], tol) for name in rows[0]]
    integral = [abs(bessel.bessel_J_integral(k, x) - bessel.bessel_J(k - 0.5, x)) / bessel.bessel_J(k - 0.5, x)
                for k in cfg.ks for x in (0.0, 0.7, 5.0, 20.0)]
    out.append(_worst("bessel.laplace_integral", integral, max(tol, 1e-12)))
    return out


def kernels_suite(cfg: SuiteConfig) -> list[Check]:
    n = cfg.n_nodes
    out = []
    norm_E, norm_J = [], []
    for k in sorted(set(NORMALIZATION_KS) | set(cfg.ks)):
        for lam in NORMALIZATION_LAMBDAS:
            norm_E.append(abs(kernels.dunkl_E(k, (0, 0, 0), lam, n) - 1.0))
            norm_J.append(abs(kernels.gen_bessel_J(k, (0, 0, 0), lam, n) - 1.0))
    out += [_worst("kernels.normalization_E", norm_E, 1e-9), _worst("kernels.normalization_J", norm_J, 1e-9)]

    groups = {"symmetrization": [], "antisymmetrization": [], "three_term": []}
    homog, conv, positive = [], [], []
    for k in cfg.ks:
        for lam in cfg.lambdas:
            for mu in cfg.mus:
                for name, r in derivation.group_identities(k, mu, lam, n).items():
                    groups[name].append(r)
                e = kernels.dunkl_E(k, mu, lam, n)
                positive.append(0.0 if e > 0 else 1.0)
                for c in (0.5, 2.0):
                    a = kernels.dunkl_E(k, tuple(c * v for v in mu), lam, n)
                    b = kernels.dunkl_E(k, mu, tuple(c * v for v in lam), n)
                    homog.append(abs(a - b) / abs(a))
                half = kernels.dunkl_E(k, mu, lam, max(8, n // 2))
                conv.append(abs(half - e) / abs(e))
    out += [_worst("kernels.symmetrization", groups["symmetrization"], 1e-8),
            _worst("kernels.antisymmetrization", groups["antisymmetrization"], 1e-7),
            _worst("kernels.three_term", groups["three_term"], 1e-7),
            _worst("kernels.homogeneity", homog, 1e-10),
            _worst("kernels.quadrature_convergence", conv, 1e-10),
            _worst("kernels.positivity", positive, 0.0)]

    oracle = []
    for k in cfg.ks:
        for lam in cfg.lambdas:
            for mu in cfg.mus:
                if np.linalg.norm(mu) * np.linalg.norm(lam) > 2.0:
                    continue
                ref = float(po.oracle_E(po.to_rational(k), mu, lam, 14))
                oracle.append(abs(kernels.dunkl_E(k, mu, lam, n) - ref) / (1.0 + abs(ref)))
    out.append(_worst("kernels.oracle_agreement", oracle, 1e-6))
    return out


def eigen_suite(cfg: SuiteConfig) -> list[Check]:
    res = []
    for k in cfg.ks:
        for lam in cfg.lambdas:
            for mu in cfg.mus:
                r = dunkl_ops.verify_eigen(k, mu, lam, n_nodes=cfg.n_nodes)
                res.append(max(r))
    return [_worst("eigen.T_i_E", res, cfg.tol if cfg.tol is not None else 5e-7)]


def lemma1_suite(cfg: SuiteConfig) -> list[Check]:
    res = [dunkl_ops.lemma_residual(k, mu, lam, n_nodes=cfg.n_nodes)
           for k in cfg.ks for lam in cfg.lambdas for mu in cfg.mus]
    return [_worst("lemma1.T_g_equals_E", res, cfg.tol if cfg.tol is not None else 1e-6)]


def opdam_suite(cfg: SuiteConfig) -> list[Check]:
    out = []
    for k in cfg.exact_ks:
        rep = po.verify_opdam(po.to_rational(k), cfg.series_degree)
        out.append(Check(f"opdam.k={k}", 0.0 if rep.ok else 1.0, 0.0))
        report = po.gamma_report(k)
        ok = report["closed_form_equals_antisymmetrization_constant"]
        out.append(Check(f"gamma.closed_form_is_antisymmetrization_constant.k={k}", 0.0 if ok else 1.0, 0.0))
    return out


def derivation_suite(cfg: SuiteConfig) -> list[Check]:
    worst: dict[str, float] = {}
    for k in cfg.ks:
        for lam in cfg.lambdas[:2]:
            for mu in cfg.mus[:4]:
                rep = derivation.derivation_residuals(k, mu, lam, cfg.n_nodes, include_exact=False)
                for name, r in rep.items():
                    worst[name] = max(worst.get(name, 0.0), r)
    tol = cfg.tol if cfg.tol is not None else 1e-10
    out = [Check(f"derivation.{name}", r, tol) for name, r in worst.items()]
    out += [Check(f"derivation.exact.{name}", r, 0.0) for name, r in derivation.exact_identities().items()]
    return out


RUNNERS: dict[str, Callable[[SuiteConfig], list[Check]]] = {
    "bessel": bessel_suite,
    "kernels": kernels_suite,
    "eigen": eigen_suite,
    "lemma1": lemma1_suite,
    "opdam": opdam_suite,
    "derivation": derivation_suite,
}


def run_suite(name: str, cfg: SuiteConfig | None = None) -> list[Check]:
    cfg = cfg or SuiteConfig()
    if name == "all":
        return [c for s in SUITES for c in RUNNERS[s](cfg)]
    if name not in RUNNERS:
        raise ValueError(f"unknown suite {name!r}")
    return RUNNERS[name](cfg)
