"""Residuals of the derivation displays as printed and as corrected."""

import argparse
from dataclasses import dataclass

from dunkl_a2 import derivation


@dataclass
class Config:
    ks: tuple[float, ...] = (0.5, 1.0, 2.0)
    mu: tuple[float, float, float] = (0.3, 0.1, -0.4)
    lam: tuple[float, float, float] = (1.5, 0.2, -1.7)
    n_nodes: int = 64


def main(cfg: Config) -> None:
    print("k, identity, printed residual, corrected residual, correction")
    for k in cfg.ks:
        printed = derivation.printed_form_residuals(k, cfg.mu, cfg.lam, cfg.n_nodes)
        fixed = derivation.derivation_residuals(k, cfg.mu, cfg.lam, cfg.n_nodes, include_exact=False)
        for name, r in printed.items():
            print(f"{k:g}, {name}, {r:.3e}, {fixed[name]:.3e}, {derivation.CORRECTIONS[name]}")
    worst = max(v for k in cfg.ks
                for v in derivation.derivation_residuals(k, cfg.mu, cfg.lam, cfg.n_nodes).values())
    print(f"worst corrected residual over all identities: {worst:.3e}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n-nodes", type=int, default=Config.n_nodes)
    main(Config(n_nodes=p.parse_args().n_nodes))
