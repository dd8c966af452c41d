"""Wiretap SDoF against m for every CSIT mode (nA=3, nB=2 by default).

    python scripts/sdof_sweep.py --out results/sweep.csv
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass
from pathlib import Path

from ana_sdof.cli import SweepConfig, cmd_sweep


@dataclass(frozen=True)
class SweepRunConfig:
    nA: int = 3
    nB: int = 2
    m_max: int = 8
    out: Path = Path("results/sweep.csv")


def run(cfg: SweepRunConfig) -> str:
    _, text = cmd_sweep(SweepConfig(cfg.nA, cfg.nB, 1, cfg.m_max))
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    cfg.out.write_text(text, encoding="utf-8", newline="\n")
    return text


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--na", type=int, default=3)
    p.add_argument("--nb", type=int, default=2)
    p.add_argument("--m-max", type=int, default=8)
    p.add_argument("--out", type=Path, default=SweepRunConfig.out)
    a = p.parse_args()
    print(run(SweepRunConfig(a.na, a.nb, a.m_max, a.out)), end="")
