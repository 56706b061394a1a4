"""How far two correct scalar runs drift apart from rounding alone.

Compares the scalar algorithm with the one-dimensional infinity backend,
and with itself on input perturbed by one ulp. Re-anchoring each epoch
(the lockstep gap) isolates the rounding of a single epoch.
"""

import argparse

import numpy as np

from ltcnd import compress
from ltcnd.experiments import lockstep_1d_gap, one_d_corpus


def value_gap(a, b) -> float:
    if [p.tau for p in a] != [p.tau for p in b]:
        return float("inf")
    return max(float(np.max(np.abs(p.xi - q.xi))) for p, q in zip(a, b))


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=9)
    p.add_argument("--tol", type=float, default=1e-12)
    args = p.parse_args()
    print("stream,epochs,backend_gap,ulp_self_gap,lockstep_gap")
    over = {"backend": 0, "self": 0}
    for i, (s, eps) in enumerate(one_d_corpus(args.count, args.seed)):
        a = compress(s.t, s.values, eps, backend="ltc1d")
        b = compress(s.t, s.values, eps, backend="infinity")
        nudged = np.nextafter(s.values, np.inf)
        c = compress(s.t, nudged, eps, backend="ltc1d")
        gaps = value_gap(a, b), value_gap(a, c), lockstep_1d_gap(s.t, s.values, eps)
        over["backend"] += gaps[0] > args.tol
        over["self"] += gaps[1] > args.tol
        print(f"{i},{len(a) - 1},{gaps[0]:.3e},{gaps[1]:.3e},{gaps[2]:.3e}")
    print(f"# over {args.tol:g}: ltc1d vs infinity {over['backend']}/{args.count}, "
          f"ltc1d vs itself on 1-ulp input {over['self']}/{args.count}")


if __name__ == "__main__":
    main()
