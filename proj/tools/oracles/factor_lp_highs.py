#!/usr/bin/env python3
"""Reference values for the factor-revealing LPs, solved with HiGHS.

This is an independent re-implementation used to freeze the constants in
tests/unit/test_factor_lp.cpp. It shares no code with the C++ model builder.

usage: factor_lp_highs.py q T [plain|plus] ...   (T may be 'inf')
"""
import math
import sys

import numpy as np
from scipy.optimize import linprog


def solve(q, T, variant):
    names = {}

    def var(key):
        if key not in names:
            names[key] = len(names)
        return names[key]

    for i in range(q):
        var(("a", i))
        var(("d", i))
    for i in range(q):
        for j in range(i + 1):
            var(("r", j, i))
    var(("lam",))
    in_g = (lambda j, i: j < i) if variant == "plain" else (lambda j, i: j <= i)
    for i in range(q):
        for j in range(q):
            var(("g" if in_g(j, i) else "h", i, j))

    ub_rows, ub_rhs = [], []

    def le(coefs, rhs=0.0):
        row = np.zeros(len(names))
        for key, c in coefs:
            row[names[key]] += c
        ub_rows.append(row)
        ub_rhs.append(rhs)

    for i in range(q - 1):
        le([(("a", i), 1), (("a", i + 1), -1)])
    for j in range(q):
        for i in range(j, q - 1):
            le([(("r", j, i + 1), 1), (("r", j, i), -1)])
    for i in range(q):
        for j in range(i):
            le([(("a", i), 1), (("r", j, i), -1), (("d", i), -1), (("d", j), -1)])
    for j in range(q):
        le([(("r", j, j), 1), (("a", j), -1)])
    for i in range(q):
        terms = []
        for j in range(q):
            if in_g(j, i):
                le([(("r", j, i), 1), (("d", j), -1), (("g", i, j), -1)])
                terms.append((("g", i, j), 1))
            else:
                le([(("a", i), 1), (("d", j), -1), (("h", i, j), -1)])
                terms.append((("h", i, j), 1))
        le(terms + [(("lam",), -1)])
    if math.isfinite(T):
        le([(("lam",), 1)], T)

    eq = np.zeros((1, len(names)))
    for i in range(q):
        eq[0, names[("d", i)]] = 1.0
    c = np.zeros(len(names))
    for i in range(q):
        c[names[("a", i)]] = -1.0
    c[names[("lam",)]] = 1.0
    res = linprog(c, A_ub=np.array(ub_rows), b_ub=np.array(ub_rhs), A_eq=eq, b_eq=[1.0],
                  bounds=(0, None), method="highs")
    if res.status != 0:
        raise RuntimeError(res.message)
    return -res.fun


def main(argv):
    if len(argv) < 3:
        print(__doc__)
        return 1
    q, T = int(argv[1]), float(argv[2])
    variants = argv[3:] or ["plain", "plus"]
    for v in variants:
        print(f"q={q} T={T:g} variant={v} value={solve(q, T, v):.12f}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
