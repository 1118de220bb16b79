"""Write every plot-ready dataset (CSV + JSON sidecar) to an output directory.

    python3 scripts/reproduce_figures.py [outdir] [--only fig2c fig4a ...]
"""

import argparse
import time
from pathlib import Path

from quasibic import figures


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", nargs="?", default="figure_data")
    ap.add_argument("--only", nargs="*", default=list(figures.FIGURES), choices=figures.FIGURES)
    args = ap.parse_args()
    out = Path(args.outdir)
    for name in args.only:
        t0 = time.time()
        csv_path, _ = figures.write(name, out)
        print(f"{name:6s} {time.time() - t0:6.1f}s  {csv_path}")


if __name__ == "__main__":
    main()
