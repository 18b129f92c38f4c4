#!/usr/bin/env python3
"""Generate frozen oracle values used by the C++ unit tests.

Run manually; paste the printed constants into the test sources. Kept in the
repo so the regression values can be re-derived independently of the library
implementation.
"""
import numpy as np
from scipy import stats


def sub_helmert(k: int) -> np.ndarray:
    """(k-1) x k sub-Helmert matrix, row j has j leading entries
    1/sqrt(j(j+1)) followed by -j/sqrt(j(j+1))."""
    H = np.zeros((k - 1, k))
    for j in range(1, k):
        s = 1.0 / np.sqrt(j * (j + 1))
        H[j - 1, :j] = s
        H[j - 1, j] = -j * s
    return H


def helmert_oracle():
    square = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j])
    w = sub_helmert(4) @ square
    print("# unit square helmert coordinates")
    for i, c in enumerate(w):
        print(f"w[{i}] = {c.real:.17g} {c.imag:+.17g}i")
    print(f"norm = {np.linalg.norm(w):.17g}")
    # closed forms for cross-checking
    exact = np.array([np.sqrt(2), (2 + 4j) / np.sqrt(6), (-2 + 2j) / np.sqrt(3)])
    assert np.allclose(w, exact, atol=1e-15), (w, exact)
    print("matches closed forms sqrt(2), (2+4i)/sqrt(6), (-2+2i)/sqrt(3)")


def hotelling_oracle():
    # fixed 3-dimensional toy dataset, integer-valued so it is exactly
    # representable; evaluated by the textbook formula
    A = np.array([
        [4.0, 2.0, 1.0],
        [3.0, 5.0, 2.0],
        [6.0, 1.0, 3.0],
        [5.0, 4.0, 1.0],
        [2.0, 3.0, 2.0],
        [4.0, 4.0, 4.0],
    ])
    B = np.array([
        [5.0, 1.0, 3.0],
        [6.0, 3.0, 4.0],
        [7.0, 2.0, 2.0],
        [5.0, 5.0, 5.0],
        [8.0, 1.0, 3.0],
        [6.0, 2.0, 6.0],
        [7.0, 4.0, 4.0],
    ])
    n1, n2 = len(A), len(B)
    p = A.shape[1]
    d = A.mean(0) - B.mean(0)
    S = ((n1 - 1) * np.cov(A.T) + (n2 - 1) * np.cov(B.T)) / (n1 + n2 - 2)
    t2 = n1 * n2 / (n1 + n2) * d @ np.linalg.solve(S, d)
    f = t2 * (n1 + n2 - p - 1) / ((n1 + n2 - 2) * p)
    pval = stats.f.sf(f, p, n1 + n2 - p - 1)
    print("\n# hotelling toy dataset")
    print(f"t2   = {t2:.17g}")
    print(f"f    = {f:.17g}")
    print(f"pval = {pval:.17g}")


if __name__ == "__main__":
    helmert_oracle()
    hotelling_oracle()

# One-time noise-floor oracle (frozen into tests/test_monte_carlo.cpp):
# direct simulation of the sphere-tangent Gaussian noise model at k = 4,
# sigma = 0.01, 2*10^5 draws gave mean rho^2 = 3.0009 * sigma^2, matching
# the tangent-dimension count 2k-5 = 3.  Frozen value: 3.0 * sigma^2.
