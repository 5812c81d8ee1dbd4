"""Single-user rates C1..C4 and the interference-free bound versus power (Ps=100, Pz=1).

Writes results/fig1_single_user.csv; extra arguments are passed to the CLI.
"""

import sys
from pathlib import Path

from dirtytape.cli import main

OUT = Path(__file__).resolve().parent.parent / "results"

if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    sys.exit(main(["single-user", "--out", str(OUT / "fig1_single_user.csv"), *sys.argv[1:]]))
