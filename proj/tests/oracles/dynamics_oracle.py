"""Orbits and fixed points of the chain and cusp germs, recomputed with
plain fractions and sympy.

Each map is written as a list of (cell, lo, hi, matrix, target) with the
matrix acting on (r, s) in the cell's stated orientation; all generic
multiplicities are 1, so a normalized edge point is (1 - t, t).
"""
from fractions import Fraction as F

from sympy import Matrix, Rational, simplify, sqrt, symbols, solve

CHAIN_FINITE = [  # (p, q) -> (min(q, 3p), 2p + q)
    ("A", 0, 1, ((0, 2), (1, 0)), "B"),
    ("B", 0, 1, ((0, 1), (2, 2)), "A"),
]
CHAIN_NONFINITE = [  # (p, q) -> (p + min(q, 3p), 2p + q); A read from E0
    ("A", 0, 1, ((1, 2), (1, 1)), "A"),
    ("B", 0, 1, ((2, 3), (1, 1)), "A"),
]
CUSP_3 = [
    ("A", 0, F(1, 2), ((5, 4), (3, 4)), "A"),
    ("A", F(1, 2), 1, ((5, 4), (4, 3)), "A"),
]


def step(table, cell, t):
    for src, lo, hi, m, dst in table:
        if src == cell and lo <= t <= hi:
            r, s = 1 - t, t
            r2 = m[0][0] * r + m[0][1] * s
            s2 = m[1][0] * r + m[1][1] * s
            rate = r2 + s2
            return dst, s2 / rate, rate
    raise ValueError((cell, t))


def rates(table, cell, t, n):
    out, c = [F(1)], F(1)
    for _ in range(n - 1):
        cell, t, k = step(table, cell, t)
        # a vertex shared by both edges: E1 is t = 1 on A and t = 0 on B
        if cell == "A" and t == 1:
            cell, t = "B", F(0)
        c *= k
        out.append(c)
    return out


def main():
    assert rates(CHAIN_FINITE, "A", F(0), 8) == [1, 1, 3, 5, 11, 21, 43, 85]
    assert rates(CHAIN_NONFINITE, "A", F(0), 8) == [1, 2, 5, 12, 29, 70, 169, 408]

    # eigen-direction of [[1,2],[1,1]]: eigenvalue 1 + sqrt(2), (r, s) = (sqrt 2, 1)
    m = Matrix([[1, 2], [1, 1]])
    (val, _, vecs), = [ev for ev in m.eigenvects() if ev[0].evalf() > 0]
    assert simplify(val - (1 + sqrt(2))) == 0
    r, s = vecs[0]
    # read from E1: r' = s, s' = r; slope and parameter
    assert simplify(r / s - sqrt(2)) == 0
    assert simplify(r / (r + s) - (2 - sqrt(2))) == 0

    # cusp germ on (-2,-2,-3): fixed parameter on w0 and its rate
    t = symbols("t")
    (fix,) = solve((3 + t) / 8 - t, t)
    assert fix == Rational(3, 7)
    assert step(CUSP_3, "A", F(0)) == ("A", F(3, 8), 8)
    print("dynamics oracle ok")


if __name__ == "__main__":
    main()
