"""Exact reference values for the cone metric, computed symbolically.

The metric is the Hessian of -log Vol, and the connection and curvature come
from the coordinate formulas of Riemannian geometry. Nothing here shares code
with the Rust crate. Output is JSON on stdout; the frozen copies live in
crates/core/tests/oracle_values.rs.
"""
import itertools
import json
from math import factorial

import sympy as sp

CASES = {
    "CY3GEN": (3, {(1, 1, 1): 8, (1, 1, 2): 4, (1, 2, 2): 2}, [(1, 1), (3, 1)]),
    "LOR3": (2, {(1, 1): 1, (2, 2): -1, (3, 3): -1}, [(1, 0, 0), (2, sp.Rational(1, 2), sp.Rational(1, 3))]),
    "BLP2": (2, {(1, 1): 1, (2, 2): -1}, [(2, -1)]),
    "TRI3": (3, {(1, 1, 1): 2, (1, 2, 3): 3, (1, 3, 3): 2, (3, 3, 3): 3}, [(1, 1, 1), (2, 1, 1)]),
}


def volume(n, coeffs, xs):
    total = 0
    for idx in itertools.product(range(1, len(xs) + 1), repeat=n):
        c = coeffs.get(tuple(sorted(idx)), 0)
        if c:
            term = c
            for i in idx:
                term *= xs[i - 1]
            total += term
    return total / factorial(n)


def analyse(n, coeffs, m, point):
    xs = sp.symbols(f"x1:{m + 1}")
    vol = volume(n, coeffs, xs)
    phi = -sp.log(vol)
    g = sp.hessian(phi, xs)
    ginv = g.inv()
    gamma = [[[sp.simplify(sum(ginv[k, l] * (sp.diff(g[l, i], xs[j]) + sp.diff(g[l, j], xs[i]) - sp.diff(g[i, j], xs[l]))
                               for l in range(m)) / 2)
               for j in range(m)] for i in range(m)] for k in range(m)]
    at = dict(zip(xs, point))
    G = g.subs(at)
    Gam = [[[gamma[k][i][j].subs(at) for j in range(m)] for i in range(m)] for k in range(m)]

    def riemann_up(l, k, i, j):
        # R(e_i, e_j) e_k = R^l_{kij} e_l
        val = sp.diff(gamma[l][j][k], xs[i]) - sp.diff(gamma[l][i][k], xs[j])
        val += sum(gamma[l][i][p] * gamma[p][j][k] - gamma[l][j][p] * gamma[p][i][k] for p in range(m))
        return val.subs(at)

    up = {(l, k, i, j): riemann_up(l, k, i, j) for l, k, i, j in itertools.product(range(m), repeat=4)}
    # R(i, j, k, w) = g(R(e_i, e_j) e_k, e_w)
    low = {(i, j, k, w): sp.simplify(sum(up[(l, k, i, j)] * G[l, w] for l in range(m)))
           for i, j, k, w in itertools.product(range(m), repeat=4)}
    Ginv = G.inv()
    ric = sp.Matrix(m, m, lambda j, k: sum(Ginv[a, b] * low[(a, j, k, b)] for a in range(m) for b in range(m)))
    scalar = sp.simplify(sum(Ginv[j, k] * ric[j, k] for j in range(m) for k in range(m)))

    def sectional(i, j):
        area = G[i, i] * G[j, j] - G[i, j] ** 2
        return sp.simplify(low[(i, j, j, i)] / area)

    return {
        "point": [str(p) for p in point],
        "volume": str(sp.simplify(vol.subs(at))),
        "gram": [[str(sp.simplify(G[i, j])) for j in range(m)] for i in range(m)],
        "christoffel": [[[str(sp.simplify(Gam[k][i][j])) for j in range(m)] for i in range(m)] for k in range(m)],
        "sectional": {f"{i + 1}{j + 1}": str(sectional(i, j)) for i in range(m) for j in range(i + 1, m)},
        "ricci": [[str(sp.simplify(ric[i, j])) for j in range(m)] for i in range(m)],
        "scalar": str(scalar),
        "riemann_1221": str(low[(0, 1, 1, 0)]) if m > 1 else "0",
    }


def main():
    out = {}
    for name, (n, coeffs, points) in CASES.items():
        m = max(max(k) for k in coeffs)
        out[name] = [analyse(n, coeffs, m, p) for p in points]
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
