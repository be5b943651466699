"""Independent numerical oracle for PG(1,c) moments.

Integrates the alternating-series density directly (no sampler involved) and
prints mean/variance for the c grid used by the acceptance suite. The density:

    f(x | 0) = sum_{k>=0} (-1)^k (2k+1) / sqrt(2 pi x^3) * exp(-(2k+1)^2 / (8x))
    f(x | c) = cosh(c/2) * exp(-c^2 x / 2) * f(x | 0)

Run as a script to regenerate the FROZEN_MEAN / FROZEN_VAR tables in
tests/test_pg.py.
"""

import numpy as np
from scipy.integrate import quad


def pg1_density(x, c, terms=400):
    if x <= 0.0:
        return 0.0
    k = np.arange(terms)
    coef = (2.0 * k + 1.0) * (-1.0) ** k
    series = np.sum(coef * np.exp(-((2.0 * k + 1.0) ** 2) / (8.0 * x)))
    base = series / np.sqrt(2.0 * np.pi * x**3)
    return float(np.cosh(c / 2.0) * np.exp(-(c**2) * x / 2.0) * base)


def moment(c, power):
    # PG(1,c) mass beyond x=60 is < exp(-pi^2*60/8) ~ 1e-33; finite upper limit
    # avoids quad's infinite-interval transform fighting the series near zero.
    total = 0.0
    total_err = 0.0
    for lo, hi in [(0.0, 0.5), (0.5, 2.0), (2.0, 60.0)]:
        val, err = quad(
            lambda x: x**power * pg1_density(x, c),
            lo,
            hi,
            limit=800,
            epsabs=1e-14,
            epsrel=1e-12,
        )
        total += val
        total_err += err
    if total_err > 1e-9:
        raise RuntimeError(f"quad error too large for c={c}, power={power}: {total_err}")
    return total


def closed_form_mean(c):
    if c == 0.0:
        return 0.25
    return np.tanh(c / 2.0) / (2.0 * c)


if __name__ == "__main__":
    print("c, total_mass, mean_numeric, mean_closed_form, var_numeric")
    for c in [0.0, 0.5, 1.0, 2.0, 5.0]:
        mass = moment(c, 0)
        m1 = moment(c, 1)
        m2 = moment(c, 2)
        var = m2 - m1**2
        print(f"{c}: mass={mass:.14f} mean={m1:.14f} closed={closed_form_mean(c):.14f} var={var:.14e}")
