#!/usr/bin/env python3
"""Reads a survey CSV written by `oulab survey --out-csv` and plots residuals over the lambda grid.

With --check the file is only validated against the CSV schema and a one-line summary is
printed. Plotting needs matplotlib; validation needs only the standard library.
"""

import argparse
import csv
import math
import re
import sys

FIXED_HEAD = ["lambda_re", "lambda_im", "gen_residual"]
FIXED_TAIL = ["l1_norm", "l2_trunc_ratio", "pass"]
SEMI = re.compile(r"^semi_residual_t(.+)$")


def read_survey(path):
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if header[:3] != FIXED_HEAD or header[-3:] != FIXED_TAIL:
            raise ValueError(f"{path}: unexpected header {header}")
        times = []
        for name in header[3:-3]:
            m = SEMI.match(name)
            if not m:
                raise ValueError(f"{path}: unexpected column {name}")
            times.append(float(m.group(1)))
        rows = []
        for line in reader:
            if len(line) != len(header):
                raise ValueError(f"{path}: row has {len(line)} fields, expected {len(header)}")
            row = {k: float(v) for k, v in zip(header[:-1], line[:-1])}
            if line[-1] not in ("0", "1"):
                raise ValueError(f"{path}: pass column must be 0 or 1")
            row["pass"] = line[-1] == "1"
            rows.append(row)
    return times, rows


def plot(rows, out):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    re_ = [r["lambda_re"] for r in rows]
    im_ = [r["lambda_im"] for r in rows]
    res = [math.log10(max(r["gen_residual"], 1e-300)) if math.isfinite(r["gen_residual"]) else float("nan") for r in rows]
    fig, ax = plt.subplots(figsize=(6, 5))
    sc = ax.scatter(re_, im_, c=res, cmap="viridis", marker="s")
    ax.scatter([r["lambda_re"] for r in rows if not r["pass"]], [r["lambda_im"] for r in rows if not r["pass"]],
               facecolors="none", edgecolors="red", label="fail")
    fig.colorbar(sc, label="log10 generator residual")
    ax.set_xlabel("Re lambda")
    ax.set_ylabel("Im lambda")
    ax.legend(loc="upper left")
    fig.savefig(out, dpi=120, bbox_inches="tight")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv")
    ap.add_argument("-o", "--output", default="survey.png")
    ap.add_argument("--check", action="store_true", help="validate the schema only")
    args = ap.parse_args(argv)
    try:
        times, rows = read_survey(args.csv)
    except (OSError, ValueError, StopIteration) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    n_pass = sum(r["pass"] for r in rows)
    print(f"{len(rows)} rows, {n_pass} pass, times {times}")
    if not args.check:
        plot(rows, args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
