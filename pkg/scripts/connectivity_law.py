"""Lehman Maker on the unbiased connectivity game against every baseline Breaker.

Prints, per n, the smallest and largest number of surviving stages next to
floor(log2 n) - 1 and the edge-count ceiling.
"""

import argparse
import math
import random

from multistage.baselines import GreedyBreaker, RandomBreaker
from multistage.beck import BeckBreaker
from multistage.core import complete_graph_board
from multistage.engine import play_multistage, stage_upper_bound
from multistage.families import connectivity_family
from multistage.lehman import LehmanMaker


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[4, 5, 6, 8, 12, 16, 24, 32])
    ap.add_argument("--seeds", type=int, default=100)
    a = ap.parse_args()
    print(f"{'n':>4} {'target':>6} {'ceiling':>7} {'min':>4} {'max':>4}")
    for n in a.n:
        board = complete_graph_board(n)
        fam = connectivity_family(n)
        breakers = [RandomBreaker(s) for s in range(a.seeds)] + [GreedyBreaker(), BeckBreaker(rng=random.Random(n))]
        taus = [play_multistage(board, fam, 1, LehmanMaker(), br).tau_observed for br in breakers]
        ceiling = stage_upper_bound(board.size, n - 1, 1)
        print(f"{n:>4} {math.floor(math.log2(n)) - 1:>6} {ceiling:>7} {min(taus):>4} {max(taus):>4}")


if __name__ == "__main__":
    main()
