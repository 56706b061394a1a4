"""Why the infinity backend can transmit more points than the Euclidean one.

For each emission policy, lists the corpus runs where the infinity count
exceeds the Euclidean count, then replays every Euclidean epoch with the
infinity backend from the same anchor. An epoch that ends earlier there
would be a genuine dominance failure; a count excess without such epochs
comes from the two runs choosing different anchors.
"""

import argparse

from ltcnd.experiments import EPS_FACTORS, anchored_dominance, dominance_exceptions, error_corpus, signal_sigma


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--replay-all", action="store_true", help="replay every corpus run, not only exceptions")
    args = p.parse_args()
    corpus = error_corpus(args.count, args.seed)
    for emit in ("witness", "deepest"):
        rows = dominance_exceptions(emit, args.count, args.seed)
        print(f"emit={emit}: {len(rows)} runs where infinity sends more")
        for row in rows:
            print(f"  stream {row['stream']:3d} n={row['n']} eps={row['factor']}*sigma: "
                  f"infinity {row['infinity']}, euclidean {row['euclidean']}")
        if args.replay_all:
            targets = [(i, f) for i in range(len(corpus)) for f in EPS_FACTORS]
        else:
            targets = [(row["stream"], row["factor"]) for row in rows]
        epochs = early = 0
        for idx, factor in targets:
            stream = corpus[idx]
            e, x = anchored_dominance(stream, factor * signal_sigma(stream), emit)
            epochs, early = epochs + e, early + x
        print(f"  anchored replay: {early} of {epochs} epochs end earlier under infinity")


if __name__ == "__main__":
    main()
