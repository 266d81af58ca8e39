import numpy as np

from sas_witness import su2
from sas_witness.states import Spectrum, haar_random_unitary
from sas_witness.witnesses import YParams, extremal_y


def admissible_interval(N, L, yN):
    """Range of y_L allowed by the admissibility rows at fixed y_N."""
    fN1 = float(su2.f_coeff(N, N, 1))
    lo, hi = -np.inf, np.inf
    for mu in range(1, L + 1):
        F = float(su2.f_coeff(N, L, mu))
        bound = yN * fN1 / F
        if F > 0:
            lo = max(lo, bound)
        elif F < 0:
            hi = min(hi, bound)
    return lo, hi


def random_admissible_y(N, rng, convex=False):
    """Random admissible y around the extremal point, optionally with every h_L >= 0."""
    scale = float(extremal_y(N).y[N])
    while True:
        yN = rng.uniform(0, 2 * scale)
        y = {N: yN}
        for L in range(N // 2 + 1, N):
            lo, hi = admissible_interval(N, L, yN)
            if convex:
                lo = max(lo, 0.0)
            y[L] = rng.uniform(lo, hi)
        params = YParams(N, y)
        if params.admissible():
            return params


def random_spectrum_unsorted(N, rng):
    return Spectrum(N, rng.dirichlet(np.ones(N + 1)))


def random_birkhoff(d, rng):
    U = haar_random_unitary(d, rng)
    return np.abs(U) ** 2
