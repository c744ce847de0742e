"""Two-phase Breaker in the triangle game: bunch counts, phase lengths and
the largest K-collection left after phase one."""

import argparse
import copy
import time

from multistage.baselines import GreedyMaker, RandomMaker
from multistage.core import complete_graph_board
from multistage.engine import play_multistage
from multistage.families import copies_family
from multistage.graphs import k_collections
from multistage.hgame import HGameBreaker
from multistage.experiments import load_graph


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[6, 7, 8, 9, 10])
    ap.add_argument("--graph-h", default="K3")
    ap.add_argument("--games", type=int, default=5)
    a = ap.parse_args()
    h = load_graph(a.graph_h)
    print(f"{'n':>3} {'t':>2} {'delta':>6} {'bunches':>8} {'phase1':>6} {'largest':>7} {'tau':>4} {'secs':>5}")
    for n in a.n:
        t0 = time.time()
        template = HGameBreaker(n, h, 1)
        board = complete_graph_board(n)
        fam = copies_family(h, n)
        largest, taus = 0, []
        for seed in range(a.games):
            br = copy.copy(template)
            maker = GreedyMaker() if seed == 0 else RandomMaker(seed)
            tr = play_multistage(board, fam, 1, maker, br, max_stages=br.phase1_stages, continue_when_empty=True)
            g = complete_graph_board(n).restrict(tr.stages[-1].maker_mask).graph()
            largest = max(largest, k_collections(g, template.k).largest())
            taus.append(play_multistage(board, fam, 1, copy.deepcopy(maker) if seed == 0 else RandomMaker(seed),
                                        copy.copy(template)).tau_observed)
        p = template.params
        print(f"{n:>3} {p.t:>2} {p.delta:>6.3f} {len(template.bunches.masks):>8} {template.phase1_stages:>6} "
              f"{largest:>7} {max(taus):>4} {time.time() - t0:>5.1f}")


if __name__ == "__main__":
    main()
