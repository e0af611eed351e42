"""Transport values for the quotient germ f(x,y,z) = (x^2 z, y^2 z, xyz) on
xy = z^2, recomputed symbolically.

One exceptional prime E0 with E0^2 = -2; the curves C_x, C_y each meet E0
once.  Valuations nu_{z0,t} are monomial at a point of E0 with weights
1 on E0 and t on the transverse curve through that point.
"""
from sympy import Matrix, Rational as Q, simplify, symbols

M = Matrix([[-2]])
INV = M.inv()
E_CHECK = INV[0, 0]  # E0-check . E0-check


def main():
    assert E_CHECK == Q(-1, 2)
    corr = -(1 * INV[0, 0])  # -C . E0-check, C meeting E0 once
    assert corr == Q(1, 2)
    push = 3 * INV[0, 0] - 2 * corr * 1 * INV[0, 0]  # k=3, two curves, k_C=1
    assert push == -1
    pull_exc, pull_curve = 2 * INV[0, 0], -INV[0, 0] * 1
    assert (pull_exc, pull_curve) == (-1, Q(1, 2))
    # projection formula against E0-check; the curve classes are orthogonal
    # to exceptional divisors, so only the exceptional part pairs
    assert push * M[0, 0] * INV[0, 0] == pull_exc * M[0, 0] * INV[0, 0] == -1

    # canonical class: K.E0 = -2 - E0^2 = 0, so A(E0) = 1
    k = M.solve(Matrix([-2 - M[0, 0]]))[0]
    a_e0 = 1 + k
    assert a_e0 == 1

    t = symbols("t", nonnegative=True)
    c_curve = -INV[0, 0]  # pull-back coefficient of a curve meeting E0 once

    def A(tt):
        return a_e0 + tt  # r A(E0) + s with r = 1

    def nu_R(tt, on_x, on_y, coeff=2):
        return coeff * (c_curve + (tt if on_x else 0)) + coeff * (c_curve + (tt if on_y else 0))

    # nu_{0,t} (along C_y): rate 3+t, image parameter 2t/(3+t)
    lhs = (3 + t) * A(2 * t / (3 + t))
    assert simplify(lhs - (A(t) + nu_R(t, False, True))) == 0
    # generic point: rate 3, image parameter t/3
    assert simplify(3 * A(t / 3) - (A(t) + nu_R(t, False, False))) == 0
    # perturbed R_f fails
    assert simplify(3 * A(t / 3) - (A(t) + nu_R(t, False, False, coeff=3))) != 0
    print("transport oracle ok")


if __name__ == "__main__":
    main()
