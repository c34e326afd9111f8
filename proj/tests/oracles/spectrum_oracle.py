"""Extended-precision reference values for the spectrum tests.

Run with mpmath installed; the printed constants are frozen in
tests/test_spectrum.cpp.
"""
from mpmath import mp, mpf, gamma, besselj, power

mp.dps = 50


def factor(k, l):
    return 4 * (2 * k + 1) * (l + 2 * k + 1) * (l + 4 * k) / (l + 4 * k + 2)


def weighting(a, rho, l):
    b = a + rho
    return (power(a, l - 1) + power(b, l - 1)) / (power(a, l + 1) + power(b, l + 1))


def components(k, l, a, b):
    common = power(a, l + 1) + power(b, l + 1)
    f = factor(k, l)
    return f / (power(a, 1 - l) * common), f / (power(b, 1 - l) * common)


def radial(l, x):
    # Sum of the two Frobenius series with unit leading coefficient.
    return gamma(1 + l) * power(2, l) * besselj(l, x) + gamma(1 - l) * power(2, -l) * besselj(-l, x)


half = mpf(1) / 2
print("eta_sq(k=0,l=0.27,a=1/2,rho=1/2) =", mp.nstr(factor(0, mpf("0.27")) * weighting(half, half, mpf("0.27")), 20))
print("eta_sq(k=0,l=1.3) =", mp.nstr(factor(0, mpf("1.3")) * weighting(half, half, mpf("1.3")), 20))
print("eta_sq(k=1,l=1.3) =", mp.nstr(factor(1, mpf("1.3")) * weighting(half, half, mpf("1.3")), 20))
c1, c2 = components(1, mpf("0.3"), half, mpf(1))
print("components(k=1,l=0.3) =", mp.nstr(c1, 20), mp.nstr(c2, 20))
print("weighting(0.5,0.5,-40) =", mp.nstr(weighting(half, half, mpf(-40)), 20))
print("weighting(0.5,1.5,-1000) =", mp.nstr(weighting(half, mpf("1.5"), mpf(-1000)), 20))
for l, x in [("0.3", "3.7"), ("1.3", "12"), ("-0.3", "0.8"), ("2.7", "25")]:
    print(f"radial(l={l}, x={x}) =", mp.nstr(radial(mpf(l), mpf(x)), 20))
