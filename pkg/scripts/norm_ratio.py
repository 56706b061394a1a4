"""Infinity/Euclidean compression-ratio quotient on i.i.d. uniform streams.

The volumetric ideal is 4/pi in two dimensions and 6/pi in three; this
prints the measured mean quotient for a few epsilons.
"""

import argparse
import math

from ltcnd.experiments import uniform_norm_ratio


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, default=50)
    p.add_argument("--length", type=int, default=1000)
    p.add_argument("--epsilons", type=float, nargs="+", default=[0.1, 0.25, 0.5, 1.0])
    args = p.parse_args()
    ideal = {2: 4 / math.pi, 3: 6 / math.pi}
    print("n,epsilon,mean_quotient,ideal")
    for n in (2, 3):
        for eps in args.epsilons:
            q = uniform_norm_ratio(n, eps, args.seeds, args.length)
            print(f"{n},{eps},{q:.4f},{ideal[n]:.4f}")


if __name__ == "__main__":
    main()
