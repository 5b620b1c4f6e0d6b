"""Relative error of the double-integral kernel against the series oracle as the node count grows."""

import argparse
from dataclasses import dataclass

from dunkl_a2 import kernels
from dunkl_a2 import poly_oracle as po


@dataclass
class Config:
    ks: tuple[str, ...] = ("3/10", "1/2", "1", "2")
    orders: tuple[int, ...] = (4, 8, 16, 32, 64, 96)
    mu: tuple[float, float, float] = (0.4, 0.1, -0.5)
    lam: tuple[float, float, float] = (1.5, 0.2, -1.7)
    series_degree: int = 16


def main(cfg: Config) -> None:
    print("k, " + ", ".join(f"n={n}" for n in cfg.orders))
    for k in cfg.ks:
        ref = po.oracle_E(k, cfg.mu, cfg.lam, cfg.series_degree).value
        kf = float(po.to_rational(k))
        errs = [abs(kernels.dunkl_E(kf, cfg.mu, cfg.lam, n) - ref) / abs(ref) for n in cfg.orders]
        print(f"{k}, " + ", ".join(f"{e:.1e}" for e in errs))


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--series-degree", type=int, default=Config.series_degree)
    main(Config(series_degree=p.parse_args().series_degree))
