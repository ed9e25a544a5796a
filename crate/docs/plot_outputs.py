"""Plot CSV series written by `brainstorm run`.

Usage: python3 docs/plot_outputs.py OUTPUT_DIR [--save]

Reads manifest.json in OUTPUT_DIR and draws every listed CSV table: the first
column is the x axis and each remaining numeric column is a line. A sweep's
leading parameter column splits a table into one line per value.
"""

import csv
import json
import math
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    header, body = rows[0], rows[1:]

    def num(s):
        try:
            return float(s)
        except ValueError:
            return math.nan

    return header, [[num(c) for c in r] for r in body]


def plot_table(path, sweep=None):
    header, rows = load(path)
    groups = defaultdict(list)
    if sweep and header[0] == sweep:
        for r in rows:
            groups[f"{sweep}={r[0]:g}"].append(r[1:])
        header = header[1:]
    else:
        groups[""] = rows
    series = header[1:]
    fig, axes = plt.subplots(len(series), 1, figsize=(7, 2.2 * len(series)), sharex=True, squeeze=False)
    for ax, (j, name) in zip(axes[:, 0], enumerate(series, start=1)):
        for label, rs in groups.items():
            ax.plot([r[0] for r in rs], [r[j] for r in rs], label=label or None)
        ax.set_ylabel(name)
        if len(groups) > 1:
            ax.legend(fontsize="small")
    axes[-1, 0].set_xlabel(header[0])
    fig.suptitle(path.stem)
    fig.tight_layout()
    return fig


def main():
    if len(sys.argv) < 2:
        raise SystemExit(__doc__)
    out = Path(sys.argv[1])
    manifest = json.loads((out / "manifest.json").read_text())
    sweep = (manifest["config"].get("sweep") or {}).get("parameter")
    for name in manifest["outputs"]:
        if not name.endswith(".csv"):
            continue
        fig = plot_table(out / name, sweep)
        if "--save" in sys.argv:
            fig.savefig(out / (Path(name).stem + ".png"), dpi=120)
    if "--save" not in sys.argv:
        plt.show()


if __name__ == "__main__":
    main()
