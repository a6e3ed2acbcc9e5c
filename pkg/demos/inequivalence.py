"""Compare the cone code with the non-linear OO code and with a Gabidulin code.

Run: python3 demos/inequivalence.py
"""

from __future__ import annotations

import json

from rankcodes import build_field, c_sigma_t, gabidulin, inequivalence_report, oo_nonlinear


def show(title, rep):
    print(title)
    print("  verdict:", rep["verdict"], rep.get("invariant", ""), rep.get("values", ""))
    print("  invariants:", json.dumps(rep["invariants"]))


def main():
    F = build_field(3, 1, 3, 2)
    show("C_{sigma,T} vs OO non-linear (q=3, n=3, k=2)",
         inequivalence_report(c_sigma_t(F, 2, [1]), oo_nonlinear(F, 2, [1])))
    show("G_2 vs C_{sigma,T}, T={1}", inequivalence_report(gabidulin(F, 2), c_sigma_t(F, 2, [1])))
    show("G_2 vs C_{sigma,T}, T=F_3^*", inequivalence_report(gabidulin(F, 2), c_sigma_t(F, 2, [1, 2])))


if __name__ == "__main__":
    main()
