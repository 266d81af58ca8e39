"""SU(2) special functions for a spin ``j = N/2`` (symmetric ``N``-qubit) system.

Exact routines return :class:`~fractions.Fraction` or
:class:`~sas_witness.exact.SqrtRational`; the floating point ones are used for
state-level numerics. Vectors of length ``N+1`` built here are indexed by the
Dicke index ``k = j - m`` (``m = j`` first), except the kernel spectrum which is
indexed by ``j + m`` as in its closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, pi, sqrt

import numpy as np

from .exact import SqrtRational, half_twice

__all__ = [
    "clebsch_gordan",
    "cg_float",
    "wigner_small_d",
    "wigner_d_matrix",
    "rotation_matrix",
    "spherical_harmonic",
    "multipole_diag",
    "multipole_diag_exact",
    "multipole_operator",
    "KernelSpectrum",
    "kernel_eigenvalues",
    "kernel_eigenvalues_cg_sum",
    "kernel_diag_dicke",
    "f_coeff",
    "f_row",
    "g_coeff",
    "g_squared",
    "cg_top_identity",
    "delta_norm_sq",
]


@lru_cache(maxsize=None)
def _fact(n: int) -> int:
    return factorial(n)


def _check_pair(tj: int, tm: int, name: str) -> None:
    if tj < 0:
        raise ValueError(f"{name}: negative angular momentum {tj}/2")
    if abs(tm) > tj:
        raise ValueError(f"{name}: projection {tm}/2 out of range for j={tj}/2")
    if (tj + tm) % 2:
        raise ValueError(f"{name}: j and m must differ by an integer")


@lru_cache(maxsize=200_000)
def _cg_twice(tj1: int, tm1: int, tj2: int, tm2: int, tJ: int, tM: int) -> SqrtRational:
    # Racah's closed formula; every factorial argument is an integer here.
    a = (tj1 + tj2 - tJ) // 2
    b = (tj1 - tm1) // 2
    c = (tj2 + tm2) // 2
    d = (tJ - tj2 + tm1) // 2
    e = (tJ - tj1 - tm2) // 2
    kmin = max(0, -d, -e)
    kmax = min(a, b, c)
    s = Fraction(0)
    for k in range(kmin, kmax + 1):
        den = _fact(k) * _fact(a - k) * _fact(b - k) * _fact(c - k) * _fact(d + k) * _fact(e + k)
        s += Fraction(-1 if k % 2 else 1, den)
    if s == 0:
        return SqrtRational.zero()
    pre = Fraction(
        (tJ + 1)
        * _fact((tJ + tj1 - tj2) // 2)
        * _fact((tJ - tj1 + tj2) // 2)
        * _fact(a)
        * _fact((tJ + tM) // 2)
        * _fact((tJ - tM) // 2)
        * _fact((tj1 - tm1) // 2)
        * _fact((tj1 + tm1) // 2)
        * _fact((tj2 - tm2) // 2)
        * _fact((tj2 + tm2) // 2),
        _fact((tj1 + tj2 + tJ) // 2 + 1),
    )
    return SqrtRational(1 if s > 0 else -1, pre * s * s)


def clebsch_gordan(j1, m1, j2, m2, J, M) -> SqrtRational:
    """Exact Clebsch-Gordan coefficient ``<j1 m1; j2 m2 | J M>`` (Condon-Shortley).

    Arguments may be ints, ``Fraction`` or floats holding half-integers.

    Raises
    ------
    ValueError
        If any projection is out of range, the triangle rule fails or
        ``m1 + m2 != M``.
    """
    tj1, tm1, tj2, tm2, tJ, tM = (half_twice(x) for x in (j1, m1, j2, m2, J, M))
    _check_pair(tj1, tm1, "j1")
    _check_pair(tj2, tm2, "j2")
    _check_pair(tJ, tM, "J")
    if not abs(tj1 - tj2) <= tJ <= tj1 + tj2 or (tj1 + tj2 + tJ) % 2:
        raise ValueError(f"triangle rule violated for ({tj1}/2, {tj2}/2, {tJ}/2)")
    if tm1 + tm2 != tM:
        raise ValueError("m1 + m2 must equal M")
    return _cg_twice(tj1, tm1, tj2, tm2, tJ, tM)


def cg_float(j1, m1, j2, m2, J, M) -> float:
    return float(clebsch_gordan(j1, m1, j2, m2, J, M))


def wigner_small_d(j, mp, m, beta: float) -> float:
    """Wigner small-d element ``d^j_{mp,m}(beta) = <j mp| exp(-i beta J_y) |j m>``."""
    tj, tmp, tm = half_twice(j), half_twice(mp), half_twice(m)
    _check_pair(tj, tmp, "mp")
    _check_pair(tj, tm, "m")
    return float(_small_d_matrix(tj, beta)[(tj - tmp) // 2, (tj - tm) // 2])


def _small_d_matrix(tj: int, beta: float) -> np.ndarray:
    n = tj + 1
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    out = np.zeros((n, n))
    for a in range(n):
        tmp = tj - 2 * a
        jp_p, jp_m = (tj + tmp) // 2, (tj - tmp) // 2
        for b in range(n):
            tm = tj - 2 * b
            j_p, j_m = (tj + tm) // 2, (tj - tm) // 2
            norm = sqrt(_fact(jp_p) * _fact(jp_m) * _fact(j_p) * _fact(j_m))
            dm = (tmp - tm) // 2  # mp - m
            total = 0.0
            for k in range(max(0, -dm), min(j_p, jp_m) + 1):
                den = _fact(j_p - k) * _fact(k) * _fact(jp_m - k) * _fact(k + dm)
                sign = -1.0 if (k + dm) % 2 else 1.0
                total += sign / den * c ** (tj - dm - 2 * k) * s ** (2 * k + dm)
            out[a, b] = norm * total
    return out


def wigner_d_matrix(j, beta: float) -> np.ndarray:
    """Full small-d matrix, rows/columns ordered ``m = j, j-1, ..., -j``."""
    return _small_d_matrix(half_twice(j), beta)


def rotation_matrix(j, alpha: float, beta: float, gamma: float) -> np.ndarray:
    """``D(alpha, beta, gamma) = exp(-i alpha Jz) exp(-i beta Jy) exp(-i gamma Jz)``."""
    tj = half_twice(j)
    m = (tj - 2 * np.arange(tj + 1)) / 2
    d = _small_d_matrix(tj, beta)
    return np.exp(-1j * alpha * m)[:, None] * d * np.exp(-1j * gamma * m)[None, :]


def spherical_harmonic(L: int, M: int, theta: float, phi: float) -> complex:
    """``Y_LM(theta, phi)`` with the Condon-Shortley phase."""
    if L < 0 or abs(M) > L:
        raise ValueError(f"invalid (L, M) = ({L}, {M})")
    d = _small_d_matrix(2 * L, theta)[L - M, L]
    return complex(sqrt((2 * L + 1) / (4 * pi)) * d * np.exp(1j * M * phi))


def _check_NL(N: int, L: int) -> None:
    if N < 1:
        raise ValueError("N must be >= 1")
    if not 0 <= L <= N:
        raise ValueError(f"L={L} out of range 0..{N}")


@lru_cache(maxsize=None)
def multipole_diag_exact(N: int, L: int) -> tuple[SqrtRational, ...]:
    """Diagonal of ``T_{L0}`` for spin ``N/2``: ``(-1)^(j-m) C^{L0}_{jm,j-m}``, m = j..-j."""
    _check_NL(N, L)
    out = []
    for k in range(N + 1):
        tm = N - 2 * k
        cg = _cg_twice(N, tm, N, -tm, 2 * L, 0)
        out.append(-cg if k % 2 else cg)
    return tuple(out)


def multipole_diag(N: int, L: int) -> np.ndarray:
    return np.array([float(x) for x in multipole_diag_exact(N, L)])


def multipole_operator(N: int, L: int, M: int) -> np.ndarray:
    """Dense ``T_LM`` in the Dicke basis (``m = j`` first)."""
    _check_NL(N, L)
    if abs(M) > L:
        raise ValueError(f"|M| > L for (L, M) = ({L}, {M})")
    T = np.zeros((N + 1, N + 1))
    for a in range(N + 1):
        tm = N - 2 * a
        for b in range(N + 1):
            tmp = N - 2 * b
            # <j m| T_LM |j m'> = (-1)^(j-m') C^{LM}_{jm, j -m'}
            if tm - tmp != 2 * M:
                continue
            val = float(_cg_twice(N, tm, N, -tmp, 2 * L, 2 * M))
            T[a, b] = -val if b % 2 else val
    return T


@dataclass(frozen=True)
class KernelSpectrum:
    """Eigenvalues ``Delta_0..Delta_N`` of the s=1 Stratonovich-Weyl kernel."""

    n_qubits: int
    deltas: tuple[int, ...]

    def as_array(self) -> np.ndarray:
        return np.array(self.deltas, dtype=float)


def kernel_eigenvalues(N: int) -> KernelSpectrum:
    if N < 1:
        raise ValueError("N must be >= 1")
    deltas = tuple((-1) ** (N - k) * comb(N + 1, k) for k in range(N + 1))
    return KernelSpectrum(N, deltas)


def kernel_eigenvalues_cg_sum(N: int) -> np.ndarray:
    """Kernel eigenvalues from the Clebsch-Gordan sum, indexed by ``j + m``.

    Independent of the binomial closed form; used to cross-check it.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    out = np.zeros(N + 1)
    for k in range(N + 1):  # k = j - m
        tm = N - 2 * k
        total = 0.0
        for L in range(N + 1):
            cg = float(_cg_twice(N, tm, N, -tm, 2 * L, 0))
            total += cg * sqrt((2 * L + 1) * _fact(N - L) * _fact(N + L + 1))
        out[N - k] = (-1) ** k * total / _fact(N + 1)
    return out


def kernel_diag_dicke(N: int) -> np.ndarray:
    """Kernel eigenvalues rearranged to the Dicke index: entry ``k`` is ``Delta_{N-k}``."""
    return kernel_eigenvalues(N).as_array()[::-1].copy()


def cg_top_identity(N: int, L: int) -> SqrtRational:
    """``C^{jj}_{jj,L0}`` from its factorial closed form (no Racah sum)."""
    _check_NL(N, L)
    return SqrtRational(1, Fraction(_fact(N) ** 2 * (N + 1), _fact(N - L) * _fact(N + L + 1)))


@lru_cache(maxsize=None)
def f_coeff(N: int, L: int, mu: int) -> Fraction:
    """State-independent weight ``F(L, mu)`` of ``|rho_{L mu}|^2`` in the squared-Q_L term.

    The sum over the intermediate rank runs over even values ``0..N``.
    """
    _check_NL(N, L)
    if L < 1:
        raise ValueError("L must be >= 1")
    if not 0 <= mu <= L:
        raise ValueError(f"mu={mu} out of range 0..{L}")
    total = Fraction(0)
    for sigma in range(0, min(N, 2 * L) + 1, 2):
        c0 = _cg_twice(2 * L, 0, 2 * L, 0, 2 * sigma, 0)
        if mu == 0:
            total += c0.squared()
        else:
            cmu = _cg_twice(2 * L, 2 * mu, 2 * L, -2 * mu, 2 * sigma, 0)
            total += (c0 * cmu).to_fraction()
    if mu == 0:
        return 1 - total
    return 2 * (-1) ** (mu + 1) * total


def f_row(N: int, L: int) -> list[Fraction]:
    return [f_coeff(N, L, mu) for mu in range(L + 1)]


def g_coeff(N: int, L: int) -> SqrtRational:
    """Linear coefficient ``g_L = sqrt((2L+1)/(N+1)) / C^{jj}_{jj,L0}``."""
    _check_NL(N, L)
    top = _cg_twice(N, N, 2 * L, 0, N, N)
    return SqrtRational(1, Fraction(2 * L + 1, N + 1)) / top


def g_squared(N: int, L: int) -> Fraction:
    """``g_L^2`` from the factorial identity; exact and cheap for large ``N``."""
    top = cg_top_identity(N, L)
    return Fraction(2 * L + 1, N + 1) / top.squared()


def delta_norm_sq(N: int) -> int:
    """``|Delta|^2 = binomial(2N+2, N+1) - 1``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return comb(2 * N + 2, N + 1) - 1
