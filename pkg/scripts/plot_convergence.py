"""Plot convergence traces written by `fpa run`.

Reads one or more *_trace.csv files and draws best fitness against
iteration on a log scale, one curve per file.

    python scripts/plot_convergence.py out/*_trace.csv --out curves.png
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("traces", nargs="+", help="trace CSV files")
    parser.add_argument("--out", default="convergence.png", help="output image")
    args = parser.parse_args()

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in args.traces:
        data = np.genfromtxt(path, delimiter=",", names=True)
        label = Path(path).stem.removesuffix("_trace")
        best = data["best_fitness"]
        # log axis cannot show exact zeros; clip to the smallest positive
        floor = best[best > 0].min() if np.any(best > 0) else 1e-300
        ax.plot(data["iteration"], np.maximum(best, floor), label=label)
    ax.set_yscale("log")
    ax.set_xlabel("iteration")
    ax.set_ylabel("best fitness")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
