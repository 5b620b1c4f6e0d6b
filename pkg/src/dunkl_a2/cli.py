"""Command-line front end: ``dunkl-a2 {eval,grid,verify,oracle}``.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import bessel, kernels, verification
from . import poly_oracle as po

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


class ConfigError(ValueError):
    pass


def fmt(x: float) -> str:
    """17 significant digits, fixed for byte-stable output."""
    return format(float(x), ".17g")


def parse_k(text: str) -> Fraction:
    try:
        k = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"malformed rational {text!r} for k") from None
    if k <= 0:
        raise ConfigError("k must be positive")
    return k


def parse_triple(text: str, what: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"{what} needs three comma-separated numbers, got {text!r}")
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"{what} has a non-numeric component: {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"{what} must be finite")
    return vals


def parse_range(text: str, what: str) -> np.ndarray:
    """``start:stop:count`` (inclusive) or a single number."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            n = int(parts[2])
            if n < 1:
                raise ValueError
            return np.linspace(float(parts[0]), float(parts[1]), n)
    except ValueError:
        pass
    raise ConfigError(f"{what} must be a number or start:stop:count, got {text!r}")


@dataclass
class RunConfig:
    k: Fraction
    lam: tuple[float, float, float] | None
    quad_order: int = kernels.DEFAULT_NODES
    series_degree: int = 12
    tol: float = 1e-8
    fmt: str = "csv"

    @property
    def kf(self) -> float:
        return float(self.k)


def threads() -> int:
    raw = os.environ.get("DUNKL_A2_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def _config(args) -> RunConfig:
    k = parse_k(args.k)
    lam = None
    if getattr(args, "lam", None) is not None:
        lam = parse_triple(args.lam, "lambda")
        try:
            lam = kernels.check_chamber(lam)
        except kernels.ChamberError as exc:
            raise ConfigError(str(exc)) from None
    if args.quad_order < 8:
        raise ConfigError("quad-order must be at least 8")
    if args.series_degree < 0:
        raise ConfigError("series-degree must be non-negative")
    return RunConfig(k, lam, args.quad_order, args.series_degree, args.tol, args.format)


def _emit(records: list[dict], header: list[str], style: str, out) -> None:
    if style == "json":
        out.write(json.dumps(records if len(records) != 1 else records[0], indent=2) + "\n")
        return
    out.write(",".join(header) + "\n")
    for rec in records:
        out.write(",".join(fmt(rec[h]) if isinstance(rec[h], float) else str(rec[h]) for h in header) + "\n")


def _warn_scale(cfg: RunConfig, mu) -> None:
    l1, _, l3 = cfg.lam
    z = abs(mu[0] - mu[1]) * (l1 - l3) / 2.0
    if z > bessel.DESK_SCALE:
        print(f"warning: Bessel argument reaches {z:.3g} > {bessel.DESK_SCALE:g}; "
              "accuracy is not validated there", file=sys.stderr)


def _require_lambda(cfg: RunConfig):
    if cfg.lam is None:
        raise ConfigError("--lambda is required")


def cmd_eval(args, out) -> int:
    cfg = _config(args)
    _require_lambda(cfg)
    rec: dict = {"k": str(cfg.k), "quad_order": cfg.quad_order}
    header = ["k", "quad_order"]
    if args.mu is not None:
        mu = parse_triple(args.mu, "mu")
        _warn_scale(cfg, mu)
        n = cfg.quad_order
        E = kernels.dunkl_E(cfg.kf, mu, cfg.lam, n)
        J = kernels.gen_bessel_J(cfg.kf, mu, cfg.lam, n)
        err = max(abs(E - kernels.dunkl_E(cfg.kf, mu, cfg.lam, max(8, n // 2))),
                  abs(J - kernels.gen_bessel_J(cfg.kf, mu, cfg.lam, max(8, n // 2))))
        rec.update(mu1=mu[0], mu2=mu[1], mu3=mu[2], E=E, J=J, error_estimate=err)
        header += ["mu1", "mu2", "mu3", "E", "J", "error_estimate"]
    if args.x is not None or args.y is not None:
        if args.x is None or args.y is None:
            raise ConfigError("--x and --y must be given together")
        x, y = float(args.x), float(args.y)
        rec.update(x=x, y=y, F=kernels.density_F(cfg.kf, x, y, cfg.lam))
        header += ["x", "y", "F"]
    if len(header) == 2:
        raise ConfigError("eval needs --mu or --x/--y")
    _emit([rec], header, cfg.fmt, out)
    return EXIT_OK


def cmd_grid(args, out) -> int:
    cfg = _config(args)
    _require_lambda(cfg)
    l1, l2, l3 = cfg.lam
    if args.kind == "F":
        xs = parse_range(args.x, "x") if args.x else np.linspace((l2 + l3) / 2, (l1 + l2) / 2, 21)
        half = max(l1 - l2, l2 - l3)
        ys = parse_range(args.y, "y") if args.y else np.linspace(-half, half, 21)
        rows = [(x, y) for x in xs for y in ys]

        def row(p):
            return {"x": float(p[0]), "y": float(p[1]), "F": kernels.density_F(cfg.kf, p[0], p[1], cfg.lam)}

        header = ["x", "y", "F"]
    else:
        axes = [parse_range(getattr(args, f"mu{i}") or "0", f"mu{i}") for i in (1, 2, 3)]
        rows = [(a, b, c) for a in axes[0] for b in axes[1] for c in axes[2]]
        for p in rows:
            _warn_scale(cfg, p)

        def row(p):
            return {"mu1": float(p[0]), "mu2": float(p[1]), "mu3": float(p[2]),
                    "E": kernels.dunkl_E(cfg.kf, p, cfg.lam, cfg.quad_order)}

        header = ["mu1", "mu2", "mu3", "E"]
    with ThreadPoolExecutor(max_workers=threads()) as pool:
        records = list(pool.map(row, rows))
    if cfg.fmt == "json":
        out.write(json.dumps(records, indent=2) + "\n")
    else:
        _emit(records, header, "csv", out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    cfg = _config(args)
    scfg = verification.SuiteConfig(n_nodes=cfg.quad_order, series_degree=args.series_degree_verify)
    if args.k_given:
        scfg.ks = (cfg.kf,)
        scfg.exact_ks = (str(cfg.k),)
    if cfg.lam is not None:
        scfg.lambdas = (cfg.lam,)
    if args.tol_given:
        scfg.tol = cfg.tol
    checks = verification.run_suite(args.suite, scfg)
    failing = [c for c in checks if not c.ok]
    if cfg.fmt == "json":
        out.write(json.dumps([{"name": c.name, "residual": c.residual, "tol": c.tol, "ok": c.ok}
                              for c in checks], indent=2) + "\n")
    else:
        out.write("name,residual,tol,status\n")
        for c in checks:
            out.write(f"{c.name},{fmt(c.residual)},{fmt(c.tol)},{'pass' if c.ok else 'FAIL'}\n")
    if failing:
        print("failed: " + ", ".join(c.name for c in failing), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_oracle(args, out) -> int:
    cfg = _config(args)
    if cfg.lam is None:
        raise ConfigError("--lambda is required")
    if args.mu is None:
        raise ConfigError("--mu is required")
    mu = parse_triple(args.mu, "mu")
    kq = po.to_rational(f"{cfg.k.numerator}/{cfg.k.denominator}")
    M = cfg.series_degree
    rec: dict = {"k": str(cfg.k), "series_degree": M}
    if args.component is not None:
        series = po.kernel_series(kq, max(M, args.component))
        comps = series.component_values(mu, cfg.lam)
        rec["E_component"] = float(comps[args.component])
        _emit([rec], ["k", "series_degree", "E_component"], cfg.fmt, out)
        return EXIT_OK
    E = po.oracle_E(kq, mu, cfg.lam, M, cfg.tol)
    J = po.oracle_J(kq, mu, cfg.lam, M, cfg.tol)
    rec.update(E=E.value, E_tail_estimate=E.tail_estimate, E_tail_bound=E.tail_bound,
               J=J.value, J_tail_estimate=J.tail_estimate, J_tail_bound=J.tail_bound)
    if E.flagged or J.flagged:
        print(f"warning: rigorous tail bound exceeds tol {cfg.tol:g}", file=sys.stderr)
    _emit([rec], list(rec), cfg.fmt, out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", default=None, help="multiplicity, decimal or p/q")
    common.add_argument("--lambda", dest="lam", default=None, help="l1,l2,l3 with l1>l2>l3, sum 0")
    common.add_argument("--quad-order", type=int, default=kernels.DEFAULT_NODES)
    common.add_argument("--series-degree", type=int, default=None)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    p = argparse.ArgumentParser(prog="dunkl-a2", description="A2 Dunkl kernel toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    e = sub.add_parser("eval", parents=[common], help="evaluate E_k, J_k and F_k")
    e.add_argument("--mu")
    e.add_argument("--x")
    e.add_argument("--y")
    g = sub.add_parser("grid", parents=[common], help="tabulate F_k(x, y) or E_k(mu) over a grid")
    g.add_argument("--kind", choices=("F", "E"), default="F")
    g.add_argument("--x")
    g.add_argument("--y")
    for i in (1, 2, 3):
        g.add_argument(f"--mu{i}")
    v = sub.add_parser("verify", parents=[common], help="run identity suites")
    v.add_argument("--suite", choices=verification.SUITES + ("all",), default="all")
    o = sub.add_parser("oracle", parents=[common], help="exact-series reference values")
    o.add_argument("--mu")
    o.add_argument("--component", type=int, default=None, help="print only the degree-m component")
    return p


_VALUE_FLAGS = {"--k", "--lambda", "--mu", "--x", "--y", "--mu1", "--mu2", "--mu3", "--tol"}


def _attach_negative_values(argv: list[str]) -> list[str]:
    """Rewrite ``--x -0.5:0.5:3`` as ``--x=-0.5:0.5:3`` so argparse does not read it as a flag."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok in _VALUE_FLAGS and len(nxt) > 1 and nxt[0] == "-" and (nxt[1].isdigit() or nxt[1] == "."):
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_attach_negative_values(argv))
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    args.k_given = args.k is not None
    args.tol_given = args.tol is not None
    if args.k is None:
        args.k = "1"
    if args.tol is None:
        args.tol = 1e-8
    args.series_degree_verify = args.series_degree if args.series_degree is not None else 6
    if args.series_degree is None:
        args.series_degree = 12
    handlers = {"eval": cmd_eval, "grid": cmd_grid, "verify": cmd_verify, "oracle": cmd_oracle}
    try:
        return handlers[args.command](args, out)
    except (ConfigError, kernels.ChamberError, kernels.DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
