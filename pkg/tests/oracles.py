"""Independent high-precision reference formulas (mpmath), written from the
definitions and sharing no code with the package."""

import mpmath as mp

mp.mp.dps = 40


def entropy(probs):
    return float(-mp.fsum(mp.mpf(p) * mp.log(p) for p in probs if p > 0))


def binary_entropy(p):
    return entropy([p, 1 - mp.mpf(p)])


def kl_bernoulli(p, q):
    p, q = mp.mpf(p), mp.mpf(q)
    d = 0
    if p > 0:
        d += p * mp.log(p / q)
    if p < 1:
        d += (1 - p) * mp.log((1 - p) / (1 - q))
    return float(d)


def deviation(delta, n):
    n = mp.mpf(n)
    return mp.sqrt(2 * mp.log(n) ** 2 * mp.log(2 / mp.mpf(delta)) / n)


def ucd_bias(delta, n, size):
    return float(mp.log(1 + mp.mpf(size - 1) / n) + deviation(delta, n))


def ucd_ber(q, delta, n):
    lg = mp.log(6 / mp.mpf(delta))
    first = 0 if q == 0 else mp.sqrt(12 * q * lg / n) * mp.log(n / (q * lg))
    return float(first + 18 * lg * mp.log(n) / n)


def ucd_ber_half(q, delta, n):
    lg = mp.log(4 / mp.mpf(delta))
    return float(7 * abs(mp.mpf(0.5) - q) * mp.sqrt(lg / n) + 9 * lg / n)


def ucd_tv(z, size, delta, n):
    z, size, n = mp.mpf(z), mp.mpf(size), mp.mpf(n)
    lg = mp.log(2 / mp.mpf(delta))
    first = 0 if z == 0 else 3 * mp.sqrt(z * size / n) * mp.log(n * size / (36 * z))
    second = mp.mpf(1.5) * mp.sqrt(lg / n) * mp.log(n * size ** 2 / 9)
    third = 2 * mp.sqrt(size) * lg ** mp.mpf(0.25) * mp.log(n * size ** (mp.mpf(2) / 3)) / n ** mp.mpf(0.75)
    return float(first + second + third)


def support_upper(s_hat, delta, n, kappa):
    return float((s_hat + mp.sqrt(mp.log(1 / mp.mpf(delta)) / 2)) / (1 - mp.exp(-mp.mpf(n) / kappa)))


def se_bias(s_hat, delta, n, kappa):
    u = mp.mpf(support_upper(s_hat, delta, n, kappa))
    return float(mp.log(1 + (u - 1) / n))


def ucd_se(s_hat, delta, n, kappa):
    return float(mp.mpf(se_bias(s_hat, delta, n, kappa)) + deviation(delta, n))
