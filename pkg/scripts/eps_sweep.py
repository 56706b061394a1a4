"""Compression ratio against epsilon for each synthetic kind and both norms.

Writes one CSV row per (kind, seed, dims, norm, epsilon) run; epsilon is
given as a multiple of the stream's standard deviation.
"""

import argparse
import csv
import sys

import numpy as np

from ltcnd.experiments import signal_sigma, stats_row, sweep_corpus
from ltcnd.geometry import Norm
from ltcnd.streams import KINDS


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--length", type=int, default=1000)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--output", type=argparse.FileType("w"), default=sys.stdout)
    args = p.parse_args()
    factors = np.geomspace(0.05, 5.0, args.points)
    fields = ["kind", "seed", "dims", "factor", "epsilon", "norm", "n_received", "n_transmitted",
              "ratio_paper", "ratio_pct", "max_error", "peak_ball_set", "wall_time"]
    out = csv.DictWriter(args.output, fieldnames=fields, lineterminator="\n")
    out.writeheader()
    streams = sweep_corpus(args.seeds, args.length, n=3)
    for k, stream in enumerate(streams):
        kind, seed = KINDS[k // args.seeds], k % args.seeds
        sigma = signal_sigma(stream)
        for dims in (["x", "y"], ["x", "y", "z"]):
            sub = stream.select(dims)
            for f in factors:
                for norm in Norm:
                    row = stats_row(sub, f * sigma, norm)
                    out.writerow({"kind": kind, "seed": seed, "dims": "".join(dims), "factor": f, **row})


if __name__ == "__main__":
    main()
