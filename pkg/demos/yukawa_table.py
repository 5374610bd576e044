"""Rebuild the Yukawa comparison table: series energies, numerical energies
and the unscreened Coulomb values, all in units of g^4 m."""

import sys

from strongcoupling.yukawa import comparison_table

LAMBDAS = [0.005, 0.01, 0.02, 1 / 30, 0.05, 0.1, 0.2, 1 / 3]


def main(lams=LAMBDAS):
    print(f"{'lambda':>8} {'state':>5} {'series':>10} {'numerical':>10} {'coulomb':>9} {'dev':>7} {'dev_C':>7}")
    for row in comparison_table(lams, ["1s", "2s", "2p"]):
        if row.oracle is None:
            print(f"{row.lam:8.4f} {row.state:>5} {row.analytic:10.6f} {'-':>10} {row.coulomb:9.5f}   {row.note}")
            continue
        print(f"{row.lam:8.4f} {row.state:>5} {row.analytic:10.6f} {row.oracle:10.6f} {row.coulomb:9.5f}"
              f" {row.deviation:7.2%} {row.coulomb_deviation:7.2%}")


if __name__ == "__main__":
    main([float(x) for x in sys.argv[1:]] or LAMBDAS)
