"""MAC dirty tape region boundaries for P1=200, P2=100, Pz=1 at several interference powers.

Writes results/fig2_mac_dtc_ps<Ps>.csv per value of --ps-list.
"""

import argparse
import sys
from pathlib import Path

from dirtytape.cli import main

OUT = Path(__file__).resolve().parent.parent / "results"

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ps-list", default="50,100,200")
    args, rest = ap.parse_known_args()
    OUT.mkdir(exist_ok=True)
    for ps in args.ps_list.split(","):
        code = main(["mac-dtc", "--ps", ps, "--out", str(OUT / f"fig2_mac_dtc_ps{ps}.csv"), *rest])
        if code:
            sys.exit(code)
