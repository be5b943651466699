"""Cutoff rule cross-check for the stable multivariate PSRF gate.

The gate declares convergence when the multivariate PSRF falls below
sqrt(1 + R / M_min), where M_min is the minimum multivariate effective sample
size needed for an (epsilon, alpha) confidence volume:

    M_min = 2^(2/d) * pi * (d * Gamma(d/2))^(-2/d) * chi2_{1-alpha, d} / epsilon^2

computed in log space (Gamma(d/2) overflows for d in the hundreds). This script
scans (epsilon, alpha) and prints the cutoffs for the two (d, R) pairs the gate
must reproduce, to identify the tolerance pair in force.
"""

import numpy as np
from scipy.special import gammaln
from scipy.stats import chi2


def min_ess(d, epsilon, alpha):
    log_m = (
        (2.0 / d) * np.log(2.0)
        + np.log(np.pi)
        - (2.0 / d) * (np.log(d) + gammaln(d / 2.0))
        + np.log(chi2.ppf(1.0 - alpha, d))
        - 2.0 * np.log(epsilon)
    )
    return float(np.exp(log_m))


def cutoff(d, n_chains, epsilon, alpha):
    return float(np.sqrt(1.0 + n_chains / min_ess(d, epsilon, alpha)))


if __name__ == "__main__":
    targets = {852: 1.000342, 526: 1.000336}
    for eps in [0.01, 0.02, 0.05, 0.10]:
        for al in [0.01, 0.05, 0.10]:
            row = []
            ok = True
            for d, want in targets.items():
                got = cutoff(d, 5, eps, al)
                row.append(f"d={d}: {got:.8f} (want {want})")
                if abs(got - want) > 1e-5:
                    ok = False
            flag = "  <-- MATCH" if ok else ""
            print(f"eps={eps} alpha={al}: " + "; ".join(row) + flag)
    print()
    print("M_min at eps=0.05, alpha=0.05:")
    for d in (852, 526):
        print(f"  d={d}: {min_ess(d, 0.05, 0.05):.4f}")
