"""Standard versus stop rules in the triangle game on deterministic matchups."""

import argparse
import random

from multistage.baselines import GreedyBreaker, GreedyMaker
from multistage.beck import BeckBreaker
from multistage.core import Variant, complete_graph_board
from multistage.engine import play_multistage
from multistage.experiments import load_graph
from multistage.families import copies_family

MATCHUPS = {
    "greedy/greedy": lambda: (GreedyMaker(), GreedyBreaker()),
    "greedy/beck": lambda: (GreedyMaker(), BeckBreaker(rng=random.Random(0))),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[5, 6, 7, 8, 9])
    ap.add_argument("--graph-h", default="K3")
    a = ap.parse_args()
    h = load_graph(a.graph_h)
    print(f"{'n':>3} {'matchup':<14} {'standard':>8} {'stop':>5}")
    for n in a.n:
        board, fam = complete_graph_board(n), copies_family(h, n)
        for name, make in MATCHUPS.items():
            taus = []
            for variant in Variant:
                mk, br = make()
                taus.append(play_multistage(board, fam, 1, mk, br, variant).tau_observed)
            print(f"{n:>3} {name:<14} {taus[0]:>8} {taus[1]:>5}")


if __name__ == "__main__":
    main()
