"""Quadratic lower bound of the P function over doubly stochastic matrices.

The objective depends on a doubly stochastic ``B`` only through ``x = lambda B``:

    value(B) = f + sum_L g_L (x . t_L) + h_L (x . t_L)^2

Rows of ``B`` follow the (descending) spectrum, columns the Dicke index.
Minimization uses away-step Frank-Wolfe with an exact assignment oracle.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import inf

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import su2
from .states import Spectrum, as_rng, spectrum_r

__all__ = [
    "QuadraticObjective",
    "FWResult",
    "build_plb",
    "evaluate",
    "evaluate_bprime",
    "gradient",
    "bprime_to_matrix",
    "matrix_to_bprime",
    "assignment_lmo",
    "permutation_matrix",
    "fw_minimize",
    "unconstrained_min",
    "min_over_permutations",
    "grid_min_b3",
    "b3_matrix",
    "unistochastic_check_d3",
    "unistochastic_preimage",
    "unistochastic_preimage_d3",
    "random_birkhoff_point",
    "is_birkhoff",
]


@dataclass(frozen=True, eq=False)
class QuadraticObjective:
    dim: int
    f: float
    g: np.ndarray
    h: np.ndarray
    t: np.ndarray = field(repr=False)  # row L-1 is t_L, Dicke ordered
    lambdas: np.ndarray = field(repr=False)
    y: dict = field(default_factory=dict)

    @property
    def n_qubits(self) -> int:
        return self.dim - 1

    @property
    def v(self) -> np.ndarray:
        """Rows ``v_L`` in the shifted minor coordinates ``b'`` (row-major, ``N^2`` long)."""
        N = self.n_qubits
        dl = self.lambdas[:N] - self.lambdas[N]
        dt = self.t[:, :N] - self.t[:, N:N + 1]
        return np.einsum("i,Lj->Lij", dl, dt).reshape(N, N * N)

    @property
    def q(self) -> np.ndarray:
        return 0.5 * self.g @ self.v

    @property
    def hessian(self) -> np.ndarray:
        v = self.v
        return (v.T * self.h) @ v

    @property
    def convex(self) -> bool:
        return bool(np.all(self.h >= 0))


def build_plb(s: Spectrum, y=None) -> QuadraticObjective:
    """Coefficients of the quadratic lower bound for spectrum ``s``.

    ``y`` is a mapping ``L -> y_L`` (or an object with a ``.y`` mapping); entries
    with ``L <= N/2`` are ignored, missing entries count as zero.
    """
    N = s.n_qubits
    ymap = {} if y is None else dict(getattr(y, "y", y))
    n_y = getattr(y, "n_qubits", N)
    if n_y != N or any(not (1 <= int(L) <= N) for L in ymap):
        raise ValueError(f"y parameters do not match N={N}")
    yN = float(ymap.get(N, 0.0))
    fN1 = float(su2.f_coeff(N, N, 1)) if N >= 1 else 0.0
    g = np.array([float(su2.g_coeff(N, L)) for L in range(1, N + 1)])
    h = np.empty(N)
    for L in range(1, N + 1):
        yl = float(ymap.get(L, 0.0)) if 2 * L > N else 0.0
        h[L - 1] = yl * float(su2.f_coeff(N, L, 0)) - yN * fN1 / 2
    r2 = spectrum_r(s) ** 2
    f = 1.0 / (N + 1) + yN * fN1 / 2 * r2
    t = np.array([su2.multipole_diag(N, L) for L in range(1, N + 1)])
    return QuadraticObjective(N + 1, f, g, h, t, np.array(s.lambdas), {int(k): v for k, v in ymap.items()})


def _rho(obj: QuadraticObjective, B: np.ndarray) -> np.ndarray:
    return obj.t @ (obj.lambdas @ B)


def evaluate(obj: QuadraticObjective, B: np.ndarray) -> float:
    rho = _rho(obj, np.asarray(B, dtype=float))
    return float(obj.f + obj.g @ rho + obj.h @ rho**2)


def gradient(obj: QuadraticObjective, B: np.ndarray) -> np.ndarray:
    rho = _rho(obj, np.asarray(B, dtype=float))
    return np.outer(obj.lambdas, obj.t.T @ (obj.g + 2 * obj.h * rho))


def evaluate_bprime(obj: QuadraticObjective, bp: np.ndarray) -> float:
    """``f + 2 q.b' + b' H b'`` in the shifted minor coordinates."""
    bp = np.asarray(bp, dtype=float)
    return float(obj.f + 2 * obj.q @ bp + bp @ obj.hessian @ bp)


def bprime_to_matrix(bp: np.ndarray, dim: int) -> np.ndarray:
    """Doubly-stochastic-completion of the free upper-left minor ``b = b' + 1/d``."""
    n = dim - 1
    minor = np.asarray(bp, dtype=float).reshape(n, n) + 1.0 / dim
    B = np.empty((dim, dim))
    B[:n, :n] = minor
    B[:n, n] = 1 - minor.sum(axis=1)
    B[n, :n] = 1 - minor.sum(axis=0)
    B[n, n] = minor.sum() - (dim - 2)
    return B


def matrix_to_bprime(B: np.ndarray) -> np.ndarray:
    dim = B.shape[0]
    return (np.asarray(B, dtype=float)[: dim - 1, : dim - 1] - 1.0 / dim).ravel()


def is_birkhoff(B: np.ndarray, tol: float = 1e-10) -> bool:
    B = np.asarray(B, dtype=float)
    return bool(
        B.min() >= -1e-12
        and np.abs(B.sum(axis=0) - 1).max() <= tol
        and np.abs(B.sum(axis=1) - 1).max() <= tol
    )


def assignment_lmo(cost: np.ndarray) -> np.ndarray:
    """Permutation ``perm`` minimizing ``sum_i cost[i, perm[i]]``."""
    cost = np.asarray(cost, dtype=float)
    if not np.all(np.isfinite(cost)):
        raise ValueError("costs must be finite")
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(cost.shape[0], dtype=int)
    perm[rows] = cols
    return perm


def permutation_matrix(perm) -> np.ndarray:
    perm = np.asarray(perm)
    P = np.zeros((perm.size, perm.size))
    P[np.arange(perm.size), perm] = 1.0
    return P


def random_birkhoff_point(dim: int, rng, n_perms: int | None = None) -> np.ndarray:
    """Random convex combination of random permutation matrices."""
    rng = as_rng(rng)
    k = n_perms or dim + 1
    w = rng.dirichlet(np.ones(k))
    return sum(wi * permutation_matrix(rng.permutation(dim)) for wi in w)


@dataclass
class FWResult:
    value: float
    B: np.ndarray
    status: str  # converged | inconclusive | heuristic
    gap: float
    lower_bound: float
    iterations: int
    trace: list = field(default_factory=list, repr=False)


def _fw_run(obj: QuadraticObjective, start_perm, tol: float, max_iter: int, away: bool, record: bool):
    d = obj.dim
    idx = np.arange(d)
    active = {tuple(start_perm): 1.0}
    B = permutation_matrix(start_perm)
    trace = []
    gap = inf
    it = 0
    for it in range(1, max_iter + 1):
        G = gradient(obj, B)
        s_perm = assignment_lmo(G)
        gs = G[idx, s_perm].sum()
        gB = float(np.sum(G * B))
        gap = gB - gs
        if record:
            trace.append((it, evaluate(obj, B), gap))
        if gap <= tol:
            break
        S = permutation_matrix(s_perm)
        a_key, a_val = None, -inf
        if away and len(active) > 1:
            for key in active:
                val = G[idx, key].sum()
                if val > a_val:
                    a_key, a_val = key, val
        if a_key is not None and a_val - gB > gap:
            D = B - permutation_matrix(a_key)
            wa = active[a_key]
            gmax = wa / (1 - wa)
            fw_step = False
        else:
            D = S - B
            gmax = 1.0
            fw_step = True
        slope = float(np.sum(G * D))
        rd = obj.t @ (obj.lambdas @ D)
        curv = float(obj.h @ rd**2)
        if curv > 0:
            gamma = min(max(-slope / (2 * curv), 0.0), gmax)
        else:
            gamma = gmax
        if gamma <= 0:
            break
        B = B + gamma * D
        if fw_step:
            for key in active:
                active[key] *= 1 - gamma
            skey = tuple(int(x) for x in s_perm)
            active[skey] = active.get(skey, 0.0) + gamma
            if gamma >= 1.0:
                active = {skey: 1.0}
                B = S.copy()
        else:
            for key in active:
                active[key] *= 1 + gamma
            active[a_key] -= gamma
            if gamma >= gmax or active[a_key] <= 1e-15:
                del active[a_key]
                B = sum(w * permutation_matrix(k) for k, w in active.items())
    return B, gap, it, trace


def fw_minimize(
    obj: QuadraticObjective,
    tol: float = 1e-9,
    max_iter: int = 50_000,
    restarts: int = 8,
    seed=0,
    away_steps: bool = True,
    record_trace: bool = False,
) -> FWResult:
    """Minimize the objective over the Birkhoff polytope.

    For a convex objective the result carries a certified lower bound
    ``value - gap`` (tightened by :func:`unconstrained_min` when all ``h_L > 0``).
    Non-convex objectives get a multi-start local search, flagged ``heuristic``,
    whose lower bound is ``-inf``.
    """
    d = obj.dim
    if obj.convex:
        G0 = gradient(obj, np.full((d, d), 1.0 / d))
        B, gap, it, trace = _fw_run(obj, assignment_lmo(G0), tol, max_iter, away_steps, record_trace)
        value = evaluate(obj, B)
        lower = value - max(gap, 0.0)
        if np.all(obj.h > 0):
            lower = max(lower, unconstrained_min(obj))
        status = "converged" if gap <= tol else "inconclusive"
        return FWResult(value, B, status, gap, lower, it, trace)
    rng = as_rng(seed)
    best = None
    for _ in range(max(1, restarts)):
        B, gap, it, trace = _fw_run(obj, rng.permutation(d), tol, max_iter, away_steps, record_trace)
        value = evaluate(obj, B)
        if best is None or value < best.value:
            best = FWResult(value, B, "heuristic", gap, -inf, it, trace)
    perm_val, perm = min_over_permutations(obj)
    if perm_val < best.value:
        best = FWResult(perm_val, permutation_matrix(perm), "heuristic", 0.0, -inf, 0)
    return best


def write_trace(result: FWResult, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "value", "gap"])
        for it, val, gap in result.trace:
            w.writerow([it, repr(float(val)), repr(float(gap))])


def unconstrained_min(obj: QuadraticObjective) -> float:
    """Global minimum over all real ``b'``: ``f - sum_L g_L^2 / (4 h_L)``."""
    if np.any(obj.h <= 0):
        raise ValueError("unconstrained minimum requires every h_L > 0")
    return float(obj.f - 0.25 * np.sum(obj.g**2 / obj.h))


def min_over_permutations(obj: QuadraticObjective) -> tuple[float, np.ndarray]:
    """Exhaustive minimum over permutation matrices (vertices of the polytope)."""
    d = obj.dim
    best, best_perm = inf, None
    lam = obj.lambdas
    for perm in itertools.permutations(range(d)):
        x = np.empty(d)
        x[list(perm)] = lam
        rho = obj.t @ x
        val = obj.f + obj.g @ rho + obj.h @ rho**2
        if val < best:
            best, best_perm = float(val), np.array(perm)
    return best, best_perm


def b3_matrix(b) -> np.ndarray:
    b1, b2, b3, b4 = b
    return np.array(
        [
            [b1, b2, 1 - b1 - b2],
            [b3, b4, 1 - b3 - b4],
            [1 - b1 - b3, 1 - b2 - b4, b1 + b2 + b3 + b4 - 1],
        ],
        dtype=float,
    )


def grid_min_b3(obj: QuadraticObjective, step: float = 0.01, chunk: int = 256) -> float:
    """Brute-force minimum over a regular grid of the 3x3 Birkhoff polytope."""
    if obj.dim != 3:
        raise ValueError("grid_min_b3 only supports d = 3")
    n = int(round(1.0 / step))
    if abs(n * step - 1.0) > 1e-12:
        raise ValueError("step must divide 1")
    l0, l1, l2 = obj.lambdas
    # (b1, b3) and (b2, b4) pairs already satisfying their own column sums
    i, k = np.nonzero(np.add.outer(np.arange(n + 1), np.arange(n + 1)) <= n)
    x0 = l2 + ((l0 - l2) * i + (l1 - l2) * k) / n
    x1 = x0  # the (b2, b4) pairs run over the same grid
    # rho_L = t_L2 + (t_L0 - t_L2) x0 + (t_L1 - t_L2) x1
    c = obj.t[:, 2]
    a = obj.t[:, 0] - c
    b = obj.t[:, 1] - c
    best = inf
    for s0 in range(0, i.size, chunk):
        i1, i3 = i[s0 : s0 + chunk, None], k[s0 : s0 + chunk, None]
        mask = (i1 + i[None, :] <= n) & (i3 + k[None, :] <= n) & (i1 + i3 + i[None, :] + k[None, :] >= n)
        if not mask.any():
            continue
        val = np.full(mask.shape, obj.f)
        for L in range(obj.t.shape[0]):
            rho = c[L] + a[L] * x0[s0 : s0 + chunk, None] + b[L] * x1[None, :]
            val += obj.g[L] * rho + obj.h[L] * rho * rho
        best = min(best, float(val[mask].min()))
    return best


def unistochastic_check_d3(b) -> tuple[bool, object, bool]:
    """Bistochasticity, triangle-area function and unistochasticity of ``B(b)``.

    Exact when ``b`` holds ints/Fractions.
    """
    b1, b2, b3, b4 = b
    exact = all(isinstance(x, (int, Fraction)) for x in b)
    zero = 0 if exact else -1e-12
    entries = [b1, b2, 1 - b1 - b2, b3, b4, 1 - b3 - b4, 1 - b1 - b3, 1 - b2 - b4, b1 + b2 + b3 + b4 - 1]
    bistochastic = all(e >= zero for e in entries)
    area = 4 * b1 * b2 * b3 * b4 - (b1 + b2 + b3 + b4 - 1 - b1 * b4 - b2 * b3) ** 2
    return bistochastic, area, bool(bistochastic and area >= zero)


def _schur_horn_sorted(lam: np.ndarray, x: np.ndarray) -> np.ndarray:
    # both sorted descending, x majorized by lam; Givens deflation on x[0]
    d = lam.size
    if d == 1:
        return np.ones((1, 1))
    Q = np.eye(d)
    x1 = x[0]
    if lam[0] - x1 > 1e-15:
        j = next(k for k in range(1, d) if lam[k] <= x1)
        c2 = (x1 - lam[j]) / (lam[0] - lam[j])
        c, s = np.sqrt(c2), np.sqrt(1 - c2)
        Q[0, 0], Q[j, 0], Q[0, j], Q[j, j] = c, s, -s, c
        rest = lam.copy()
        rest[j] = lam[0] + lam[j] - x1
        rest = rest[1:]
    else:
        rest = lam[1:].copy()
    order = np.argsort(-rest, kind="stable")
    sub = _schur_horn_sorted(rest[order], x[1:])
    inner = np.zeros((d - 1, d - 1))
    inner[order, :] = sub
    full = np.eye(d)
    full[1:, 1:] = inner
    return Q @ full


def unistochastic_preimage(lambdas, B, tol: float = 1e-9) -> np.ndarray | None:
    """Unistochastic ``B'`` with ``lambda B' = lambda B``, built from an orthogonal matrix.

    Constructive Schur-Horn: a product of plane rotations ``Q`` with
    ``diag(Q^T diag(lambda) Q) = lambda B``, so ``B' = Q**2`` entrywise.
    Returns ``None`` if the construction misses the target by more than ``tol``.
    """
    lam = np.asarray(lambdas, dtype=float)
    x = lam @ np.asarray(B, dtype=float)
    lo = np.argsort(-lam, kind="stable")
    xo = np.argsort(-x, kind="stable")
    Q = _schur_horn_sorted(lam[lo], x[xo])
    Qf = np.zeros_like(Q)
    Qf[np.ix_(lo, xo)] = Q
    Bp = Qf**2
    if np.abs(lam @ Bp - x).max() > tol or np.abs(Qf.T @ Qf - np.eye(lam.size)).max() > tol:
        return None
    return Bp


def unistochastic_preimage_d3(lambdas, B, tol: float = 1e-9):
    """``b`` vector of a unistochastic ``B'`` with ``lambda B' = lambda B`` (d = 3)."""
    if np.shape(B) != (3, 3):
        raise ValueError("unistochastic_preimage_d3 only supports d = 3")
    Bp = unistochastic_preimage(lambdas, B, tol)
    if Bp is None:
        return None
    return np.array([Bp[0, 0], Bp[0, 1], Bp[1, 0], Bp[1, 1]])
