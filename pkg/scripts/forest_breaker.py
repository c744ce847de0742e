"""Forest Breaker on the non-2-colourability game.

For every (n, b) reports how many stages it takes until Maker's board is a
forest, against seeded random Makers, and the forest counts k_i per stage.
"""

import argparse
import math

import networkx as nx

from multistage.baselines import RandomMaker
from multistage.core import complete_graph_board
from multistage.engine import play_multistage
from multistage.families import non_colorability_family
from multistage.forests import ForestBreaker


def stages_to_forest(trace, n) -> int:
    board = complete_graph_board(n)
    for i, stage in enumerate(trace.stages, 1):
        g = nx.empty_graph(n)
        g.add_edges_from(board.labels[e] for e in range(board.size) if (stage.maker_mask >> e) & 1)
        if nx.is_forest(g):
            return i
    return len(trace.stages) + 1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[8, 12, 16, 24])
    ap.add_argument("--b", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--games", type=int, default=20)
    a = ap.parse_args()
    print(f"{'n':>4} {'b':>2} {'bound':>5} {'worst':>5}  k_history (seed 0)")
    for n in a.n:
        fam = non_colorability_family(n, 2)
        board = complete_graph_board(n)
        for b in a.b:
            bound = math.ceil(math.log(n) / math.log(b + 1)) + 1
            worst, hist = 0, None
            for seed in range(a.games):
                br = ForestBreaker()
                tr = play_multistage(board, fam, b, RandomMaker(seed), br, max_stages=bound + 2,
                                     continue_when_empty=True)
                worst = max(worst, stages_to_forest(tr, n))
                hist = hist or br.k_history
            print(f"{n:>4} {b:>2} {bound:>5} {worst:>5}  {hist}")


if __name__ == "__main__":
    main()
