"""Independent ground truth in the full ``2^N``-dimensional qubit space.

PPT is only a necessary condition for separability: a negative partial
transpose proves entanglement, a positive one proves nothing for ``N >= 3``.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, sqrt

import numpy as np

from . import su2
from .states import (
    Spectrum,
    SymmetricState,
    as_rng,
    haar_random_unitary,
)

__all__ = [
    "EMBED_MAX_N",
    "GHZ_MAX_N",
    "NPT_THRESHOLD",
    "DickeEmbedding",
    "dicke_embedding",
    "embed",
    "partial_transpose",
    "min_pt_eigenvalue",
    "min_pt_over_cuts",
    "ppt_verdict",
    "ghz_mixture",
    "ghz_radius",
    "r_ns",
    "exact_sas_n2",
    "permutation_min_p0",
    "orbit_p0_min",
    "thread_count",
    "SweepReport",
    "soundness_sweep",
    "completeness_n2",
]

EMBED_MAX_N = 12
GHZ_MAX_N = 10
# PT eigenvalues of the symmetric projector are exactly zero for N >= 3; rounding
# noise on them stays below 1e-15 up to N = 10
NPT_THRESHOLD = 1e-13


def thread_count() -> int:
    """Worker threads, capped by ``SAS_WITNESS_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("SAS_WITNESS_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True, eq=False)
class DickeEmbedding:
    """Isometry from the Dicke basis (``k`` excitations in column ``k``) to qubits."""

    n_qubits: int
    matrix: np.ndarray = field(repr=False)


@lru_cache(maxsize=None)
def dicke_embedding(N: int) -> DickeEmbedding:
    if not 1 <= N <= EMBED_MAX_N:
        raise ValueError(f"embedding supports 1 <= N <= {EMBED_MAX_N}")
    weights = np.array([bin(x).count("1") for x in range(2**N)])
    E = np.zeros((2**N, N + 1))
    E[np.arange(2**N), weights] = 1.0 / np.sqrt([comb(N, int(k)) for k in weights])
    E.setflags(write=False)
    return DickeEmbedding(N, E)


def embed(state) -> np.ndarray:
    """Full ``2^N x 2^N`` density matrix of a symmetric state.

    Accepts a :class:`SymmetricState` or a stack of Dicke-basis matrices
    with shape ``(..., N+1, N+1)``.
    """
    rho = state.matrix if isinstance(state, SymmetricState) else np.asarray(state)
    N = rho.shape[-1] - 1
    E = dicke_embedding(N).matrix
    return E @ rho @ E.T


def _n_of(dim: int) -> int:
    N = dim.bit_length() - 1
    if 2**N != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    if N > EMBED_MAX_N:
        raise ValueError(f"N={N} exceeds the {EMBED_MAX_N}-qubit guard")
    return N


def partial_transpose(rho_full: np.ndarray, k: int) -> np.ndarray:
    """Partial transpose on the first ``k`` qubits (works on stacks)."""
    rho_full = np.asarray(rho_full)
    N = _n_of(rho_full.shape[-1])
    if not 1 <= k <= N - 1:
        raise ValueError(f"cut size must be in 1..{N - 1}")
    a, b = 2**k, 2 ** (N - k)
    lead = rho_full.shape[:-2]
    r = rho_full.reshape(lead + (a, b, a, b))
    n = len(lead)
    axes = list(range(n)) + [n + 2, n + 1, n, n + 3]
    return r.transpose(axes).reshape(lead + (a * b, a * b))


def min_pt_eigenvalue(rho_full: np.ndarray, k: int):
    """Smallest eigenvalue of the partial transpose over the first ``k`` qubits."""
    pt = partial_transpose(rho_full, k)
    if np.iscomplexobj(pt) and not np.any(pt.imag):
        pt = pt.real
    w = np.linalg.eigvalsh(pt)[..., 0]
    return float(w) if np.ndim(w) == 0 else w


def min_pt_over_cuts(rho_full: np.ndarray, cuts=None):
    N = _n_of(np.shape(rho_full)[-1])
    cuts = range(1, N) if cuts is None else cuts
    vals = [min_pt_eigenvalue(rho_full, k) for k in cuts]
    return np.min(np.array(vals), axis=0)


def ppt_verdict(rho_full: np.ndarray, tol: float = 1e-8) -> str:
    return "NPT-entangled" if min_pt_over_cuts(rho_full) < -tol else "PPT (inconclusive)"


# -- GHZ mixture --------------------------------------------------------------


def ghz_mixture(N: int, p: float) -> SymmetricState:
    """``p |GHZ><GHZ| + (1-p) * identity/(N+1)`` in the Dicke basis."""
    rho = (1 - p) * np.eye(N + 1) / (N + 1)
    rho[0, 0] += p / 2
    rho[N, N] += p / 2
    rho[0, N] += p / 2
    rho[N, 0] += p / 2
    return SymmetricState(N, rho)


def _ghz_is_npt(N: int, p: float) -> bool:
    full = embed(ghz_mixture(N, p)).real
    return any(min_pt_eigenvalue(full, k) < -NPT_THRESHOLD for k in range(1, N // 2 + 1))


def ghz_radius(N: int, tol: float = 1e-10, max_n: int = GHZ_MAX_N) -> float:
    """Distance to the maximally mixed state at which the GHZ mixture turns NPT.

    Bisects on the mixing weight ``p``; a cut and its complement give the
    same spectrum, so cuts ``1..N//2`` cover every bipartition of a
    symmetric state.
    """
    if not 2 <= N <= max_n:
        raise ValueError(f"ghz_radius supports 2 <= N <= {max_n}")
    lo, hi = 0.0, 1.0
    if _ghz_is_npt(N, lo) or not _ghz_is_npt(N, hi):
        raise RuntimeError("NPT threshold is not bracketed by [0, 1]")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if _ghz_is_npt(N, mid):
            hi = mid
        else:
            lo = mid
    p_star = (lo + hi) / 2
    return p_star * sqrt(N / (N + 1))


# -- spectral references ------------------------------------------------------


def r_ns(N: int) -> float:
    """Radius of the absolutely separable ball for ``N`` unrestricted qubits."""
    if N < 1:
        raise ValueError("N must be >= 1")
    D = 2**N
    return 1.0 / sqrt(D * (D - 1))


def exact_sas_n2(s: Spectrum, tol: float = 0.0) -> bool:
    """Two-qubit symmetric absolute separability, exact."""
    if s.n_qubits != 2:
        raise ValueError("exact criterion only exists for N = 2")
    lam = np.asarray(s.lambdas)
    return bool(sqrt(lam[1]) + sqrt(lam[2]) >= 1 - tol)


def permutation_min_p0(s: Spectrum) -> float:
    """Minimum of the north-pole P value over all diagonal permutations of the spectrum."""
    if s.n_qubits > 6:
        raise ValueError("exhaustive permutation search supports N <= 6")
    D = su2.kernel_diag_dicke(s.n_qubits)
    perms = np.array(list(itertools.permutations(range(s.dim))))
    return float((np.asarray(s.lambdas)[perms] @ D).min())


def _orbit_chunk(lam, D, n, seed):
    V = haar_random_unitary(lam.size, seed=seed, size=n)
    # (V diag(lam) V^dagger)_kk = sum_i |V_ki|^2 lam_i
    diag = (np.abs(V) ** 2) @ lam
    return float((diag @ D).min())


def orbit_p0_min(s: Spectrum, n_samples: int, seed=0, chunk: int = 4096) -> float:
    """Minimum of the north-pole P value over Haar-random unitary conjugates."""
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    lam = np.asarray(s.lambdas)
    D = su2.kernel_diag_dicke(s.n_qubits)
    sizes = [min(chunk, n_samples - i) for i in range(0, n_samples, chunk)]
    # fixed chunking keeps results independent of the thread count
    seeds = as_rng(seed).spawn(len(sizes))
    with ThreadPoolExecutor(thread_count()) as ex:
        mins = list(ex.map(lambda a: _orbit_chunk(lam, D, *a), zip(sizes, seeds)))
    return min(mins)


# -- soundness and completeness sweeps ---------------------------------------


@dataclass
class SweepReport:
    seed: int
    n_values: list
    n_spectra: int = 0
    n_states: int = 0
    certified_by: dict = field(default_factory=dict)
    min_pt: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "n_values": list(self.n_values),
            "n_spectra": self.n_spectra,
            "n_states": self.n_states,
            "certified_by": dict(self.certified_by),
            "min_pt_eigenvalue": {str(k): v for k, v in self.min_pt.items()},
            "violations": self.violations,
        }


def sample_near_uniform(N: int, radius: float, rng) -> np.ndarray:
    """Spectrum drawn uniformly from a ball around the uniform spectrum, clipped to the simplex."""
    d = N + 1
    while True:
        v = rng.standard_normal(d)
        v -= v.mean()
        v *= radius * rng.random() ** (1 / (d - 1)) / np.linalg.norm(v)
        lam = v + 1.0 / d
        if lam.min() >= 0:
            return lam


def _certifying(s: Spectrum, fault: bool) -> list[str]:
    from . import witnesses as W

    out = []
    if W.w0_check(s).certified:
        out.append("W0")
    w1 = W.w1_margin(s)
    if (-w1 if fault else w1) >= -1e-12:
        out.append("W1")
    if W.w3_check(s).certified:
        out.append("W3")
    if W.w2_check(s, W.extremal_y(s.n_qubits)).certified:
        out.append("W2")
    return out


def _ball_radius(N: int) -> float:
    from . import witnesses as W

    cands = [W._dist2(p) for _, p in W.s1_vertex_candidates(N)]
    return 1.05 * max(sqrt(float(max(cands))), sqrt(float(W.w3_bound(N))))


def soundness_sweep(
    n_values=(2, 3, 4),
    n_spectra: int = 1000,
    n_unitaries: int = 50,
    seed: int = 0,
    threshold: float = 1e-8,
    fault: bool = False,
    batch: int = 50,
) -> SweepReport:
    """Embed Haar-rotated certified spectra and look for a negative partial transpose.

    ``n_spectra`` certified spectra are split evenly over ``n_values``. Half
    of the candidates are drawn near the uniform spectrum, half uniformly
    from the simplex. ``fault`` flips the sign of the W1 margin (harness
    self-test; it must produce violations).
    """
    n_values = list(n_values)
    rng = as_rng(seed)
    report = SweepReport(seed=seed, n_values=n_values)
    per_n = [n_spectra // len(n_values) + (i < n_spectra % len(n_values)) for i in range(len(n_values))]
    for N, count in zip(n_values, per_n):
        d = N + 1
        radius = _ball_radius(N)
        worst = np.inf
        found = 0
        while found < count:
            lam = sample_near_uniform(N, radius, rng) if rng.random() < 0.5 else rng.dirichlet(np.ones(d))
            s = Spectrum(N, lam / lam.sum())
            by = _certifying(s, fault)
            if not by:
                continue
            found += 1
            for w in by:
                report.certified_by[w] = report.certified_by.get(w, 0) + 1
            useed = int(rng.integers(2**63))
            Vs = haar_random_unitary(d, seed=useed, size=n_unitaries)
            lam_s = np.asarray(s.lambdas)
            for start in range(0, n_unitaries, batch):
                V = Vs[start : start + batch]
                rho = (V * lam_s[None, None, :]) @ V.conj().transpose(0, 2, 1)
                full = embed(rho)
                mins = min_pt_over_cuts(full, range(1, N // 2 + 1))
                worst = min(worst, float(mins.min()))
                bad = np.flatnonzero(mins < -threshold)
                if bad.size:
                    report.violations.append(
                        {
                            "spectrum": s.to_json(),
                            "certified_by": by,
                            "unitary_seed": useed,
                            "unitary_index": int(start + bad[0]),
                            "min_pt_eigenvalue": float(mins[bad[0]]),
                        }
                    )
                    break
            report.n_states += n_unitaries
            if fault and report.violations:
                break
        report.n_spectra += found
        report.min_pt[N] = worst
    return report


def completeness_n2(n_samples: int = 10_000, seed: int = 0) -> dict:
    """Fractions of exactly-SAS two-qubit spectra detected by W0 and by W2 at the extremal ``y``."""
    from . import witnesses as W

    rng = as_rng(seed)
    y = W.extremal_y(2)
    n_sas = n_w0 = n_w2 = unsound = 0
    for _ in range(n_samples):
        s = Spectrum(2, rng.dirichlet(np.ones(3)))
        sas = exact_sas_n2(s)
        w0 = W.w0_check(s).certified
        w2 = W.w2_check(s, y).certified
        if (w0 or w2) and not sas:
            unsound += 1
        if sas:
            n_sas += 1
            n_w0 += w0
            n_w2 += w2
    return {
        "n_samples": n_samples,
        "n_sas": n_sas,
        "fraction_w0": n_w0 / n_sas if n_sas else float("nan"),
        "fraction_w2": n_w2 / n_sas if n_sas else float("nan"),
        "unsound": unsound,
    }
