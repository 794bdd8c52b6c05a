"""Endpoint error of the geometric integrator under step halving, for several generators."""
import argparse

import numpy as np

from nkflag.cartan import order_table
from nkflag.su3 import NAMES


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--t", type=float, default=2 * np.pi / 3)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    rng = np.random.default_rng(a.seed)
    gens = {"h1": np.eye(8)[0], "m1": np.eye(8)[NAMES.index("m1")], "random": rng.normal(size=8) / 2}
    for name, x in gens.items():
        print(name)
        for row in order_table(x, a.t):
            ratio = "" if row.ratio is None else f"{row.ratio:8.3f}"
            print(f"  {row.steps:5d} {row.error:.3e} {ratio}")


if __name__ == "__main__":
    main()
