"""Total mass of the density for the two candidate z^2 coefficients, and Laplace-transform agreement."""

import argparse
from dataclasses import dataclass

import numpy as np

from dunkl_a2 import kernels


@dataclass
class Config:
    ks: tuple[float, ...] = (0.5, 1.0, 2.0)
    lam: tuple[float, float, float] = (1.5, 0.2, -1.7)
    mu: tuple[float, float, float] = (0.3, 0.1, -0.4)
    n_outer: int = 32


def mass(k, lam, n_outer, coeff):
    xs, ys, ws, fs = kernels._density_grid(k, lam, n_outer, 21, coeff, kernels.OUTER_REACH)
    return float(np.sum(ws * fs))


def main(cfg: Config) -> None:
    print("k, mass(coeff 6), mass(coeff 3), E direct, E fubini, E kernel")
    for k in cfg.ks:
        m6 = mass(k, cfg.lam, cfg.n_outer, 6.0)
        m3 = mass(k, cfg.lam, cfg.n_outer, 3.0)
        direct = kernels.dunkl_E_via_density(k, cfg.mu, cfg.lam, n_outer=cfg.n_outer)
        fub = kernels.dunkl_E_via_density(k, cfg.mu, cfg.lam, method="fubini")
        ref = kernels.dunkl_E(k, cfg.mu, cfg.lam)
        print(f"{k:g}, {m6:.12f}, {m3:.12f}, {direct:.12f}, {fub:.15f}, {ref:.15f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k", type=float, nargs="*")
    p.add_argument("--n-outer", type=int, default=Config.n_outer)
    a = p.parse_args()
    cfg = Config(n_outer=a.n_outer)
    if a.k:
        cfg.ks = tuple(a.k)
    main(cfg)
