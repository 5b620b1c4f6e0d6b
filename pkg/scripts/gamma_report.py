"""Compare exact T_V(V)(0) with the printed closed form and archive the report as JSON."""

import argparse
import json
from dataclasses import dataclass, field
from pathlib import Path

from dunkl_a2 import poly_oracle as po


@dataclass
class Config:
    ks: list[str] = field(default_factory=lambda: ["0", "1/4", "1/2", "1", "3/2", "2", "3"])
    out: Path = Path("artifacts/gamma_report.json")


def main(cfg: Config) -> None:
    reports = [po.gamma_report(k) for k in cfg.ks]
    for r in reports:
        print(f"k={r['k']:>4}  T_V(V)(0)={r['T_V(V)(0)']:>6}  closed form={r['closed_form']:>8}  "
              f"product={r['exact_times_closed_form']}  {r['verdict']}")
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    cfg.out.write_text(json.dumps(reports, indent=2) + "\n")
    print(f"written to {cfg.out}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k", nargs="*", default=None)
    p.add_argument("--out", type=Path, default=Config.out)
    a = p.parse_args()
    main(Config(a.k or Config().ks, a.out))
