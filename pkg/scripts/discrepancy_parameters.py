"""alpha = 1/(b+1) - eps(delta/2, b) over a (delta, b) grid, and the
multistage parameters for the colouring game at a few board sizes."""

import argparse

from multistage.errors import DegenerateParameters
from multistage.families import gamma_calculator
from multistage.potential import biased_discrepancy_config, epsilon_from_mu


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--deltas", type=float, nargs="+", default=[0.1, 0.3, 0.5, 0.7, 0.9])
    ap.add_argument("--bs", type=int, nargs="+", default=[1, 2, 3, 5])
    a = ap.parse_args()
    print("delta " + " ".join(f"{'b=' + str(b):>10}" for b in a.bs))
    for d in a.deltas:
        cells = []
        for b in a.bs:
            try:
                cells.append(f"{biased_discrepancy_config(d, b).alpha:>10.5f}")
            except DegenerateParameters:
                cells.append(f"{'degen':>10}")
        print(f"{d:>5} " + " ".join(cells))
    print("\neps(mu=0.25, b=1) =", epsilon_from_mu(0.25, 1))
    for n in (10 ** 6, 10 ** 12, 10 ** 30):
        print(f"colouring gamma, n={n:.0e}, k=2, b=1: {gamma_calculator('coloring', n, 1, k=2).gamma:.4f}")


if __name__ == "__main__":
    main()
