"""Extended-precision reference values for the stability tests.

The determinant is taken directly from the 2x2 stability matrix so the
`consistent` form is checked against an independent expansion.
"""
from mpmath import mp, mpf, matrix, det

mp.dps = 40


def eta_sq(k, l, a, b):
    return 4 * (a**l * b + a * b**l) * (2 * k + 1) * (l + 2 * k + 1) * (l + 4 * k) / (
        a * b * (a ** (l + 1) + b ** (l + 1)) * (l + 4 * k + 2))


def stability_matrix(al, be, ga, d, e):
    s = al + be
    return matrix([[ga * (be - al) / s - e, ga * s**2],
                   [-ga * 2 * be / s, -ga * s**2 - d * e]])


def printed(al, be, ga, d, e):
    s = al + be
    T = ga * (be - al - s**3) / s - (d + 1) * e
    D = (ga * (be - al) / s - e) * (-ga * s**2 - (d + 1) * e) + 2 * ga**2 * be * s
    return T, D


half, one = mpf(1) / 2, mpf(1)
e = eta_sq(0, mpf("1.3"), half, one)
J = stability_matrix(mpf("0.05"), mpf("0.55"), mpf(730), mpf(5), e)
print("eta_sq(0,1.3) =", mp.nstr(e, 25))
print("consistent T =", mp.nstr(J[0, 0] + J[1, 1], 25), " D =", mp.nstr(det(J), 25))
T, D = printed(mpf("0.05"), mpf("0.55"), mpf(730), mpf(5), e)
print("paper-literal T =", mp.nstr(T, 25), " D =", mp.nstr(D, 25))


def bound(factor, d, ga, k, l, a):
    return (factor * (d + 1) * (2 * k + 1) * (l + 2 * k + 1) * (l + 4 * k) - ga * a**2 * (l + 4 * k + 2)) / (
        ga * a * (l + 4 * k + 2))


print("turing_only_bound(10,250,0,1.3,0.5) =", mp.nstr(bound(4, 10, 250, 0, mpf("1.3"), half), 25))
print("negative_l_bound(8,21,0,0.27,0.5) =", mp.nstr(bound(8, 8, 21, 0, mpf("0.27"), half), 25))
print("hopf threshold(1.4,1,0,0.27,0.5) =", mp.nstr(bound(8, mpf("1.4"), 1, 0, mpf("0.27"), half), 25))
e27 = eta_sq(0, mpf("0.27"), half, one)
print("(d+1) eta_sq(0,0.27) for d=8:", mp.nstr(9 * e27, 20), " d=1.4:", mp.nstr(mpf("2.4") * e27, 20))
