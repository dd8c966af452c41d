"""Vertices of the delayed-CSIT SDoF region, the perfect-CSIT rectangle and the DoF region.

    python scripts/region_vertices.py --m 5 --na 3 --nb 2
"""

from __future__ import annotations

import argparse
import json
from dataclasses import dataclass
from pathlib import Path

from ana_sdof.cli import REGIONS, RegionConfig, region_record
from ana_sdof.sdof_theory import AntennaConfig


@dataclass(frozen=True)
class RegionRunConfig:
    m: int = 5
    nA: int = 3
    nB: int = 2
    out: Path = Path("results/regions.json")


def run(cfg: RegionRunConfig) -> dict:
    antennas = AntennaConfig(cfg.m, cfg.nA, cfg.nB)
    records = {which: region_record(RegionConfig(antennas, which)) for which in sorted(REGIONS)}
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    cfg.out.write_text(json.dumps(records, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
    return records


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--na", type=int, default=3)
    p.add_argument("--nb", type=int, default=2)
    p.add_argument("--out", type=Path, default=RegionRunConfig.out)
    a = p.parse_args()
    for which, rec in run(RegionRunConfig(a.m, a.na, a.nb, a.out)).items():
        print(f"{which:13s}", " ".join(f"({v['dA']}, {v['dB']})" for v in rec["vertices"]))
