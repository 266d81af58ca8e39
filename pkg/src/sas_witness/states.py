"""Spectra and symmetric states in the Dicke basis, multipoles and P functions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import pi, sqrt

import numpy as np

from . import su2

__all__ = [
    "Tolerances",
    "TOL",
    "Spectrum",
    "SymmetricState",
    "MultipoleComponents",
    "spectrum_r",
    "state_from_spectrum",
    "maximally_mixed",
    "multipole_components",
    "state_from_components",
    "r_from_components",
    "q_function",
    "truncated_p",
    "truncated_p_north",
    "rotate_state",
    "haar_random_unitary",
    "random_spectrum",
    "as_rng",
]


@dataclass(frozen=True)
class Tolerances:
    structural: float = 1e-12
    derived: float = 1e-10
    clamp: float = 1e-10


TOL = Tolerances()


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a symmetric ``N``-qubit state, stored in non-increasing order."""

    n_qubits: int
    lambdas: np.ndarray = field(repr=False)

    def __init__(self, n_qubits: int, lambdas, tol: float | None = None):
        tol = TOL.structural if tol is None else tol
        lam = np.asarray(lambdas, dtype=float).ravel().copy()
        if n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        if lam.size != n_qubits + 1:
            raise ValueError(f"expected {n_qubits + 1} eigenvalues, got {lam.size}")
        if not np.all(np.isfinite(lam)):
            raise ValueError("eigenvalues must be finite")
        if lam.min() < -TOL.clamp:
            raise ValueError(f"negative eigenvalue {lam.min():.3g}")
        lam[lam < 0] = 0.0
        if abs(lam.sum() - 1.0) > tol:
            raise ValueError(f"eigenvalues sum to {lam.sum():.17g}, not 1")
        lam = np.sort(lam)[::-1].copy()
        lam.setflags(write=False)
        object.__setattr__(self, "n_qubits", int(n_qubits))
        object.__setattr__(self, "lambdas", lam)

    @classmethod
    def from_values(cls, values, tol: float | None = None) -> "Spectrum":
        values = np.asarray(values, dtype=float)
        return cls(values.size - 1, values, tol=tol)

    @property
    def dim(self) -> int:
        return self.n_qubits + 1

    def to_json(self) -> dict:
        return {"n_qubits": self.n_qubits, "lambdas": [float(x) for x in self.lambdas]}

    @classmethod
    def from_json(cls, data, tol: float | None = None) -> "Spectrum":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["n_qubits"]), data["lambdas"], tol=tol)

    def __eq__(self, other):
        if not isinstance(other, Spectrum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and np.array_equal(self.lambdas, other.lambdas)

    def __hash__(self):
        return hash((self.n_qubits, self.lambdas.tobytes()))


@dataclass(frozen=True, eq=False)
class SymmetricState:
    """Density matrix of a symmetric ``N``-qubit state in the Dicke basis (``m = j`` first)."""

    n_qubits: int
    matrix: np.ndarray = field(repr=False)

    def __init__(self, n_qubits: int, matrix, check: bool = True):
        rho = np.array(matrix, dtype=complex)
        if rho.shape != (n_qubits + 1, n_qubits + 1):
            raise ValueError(f"expected a {n_qubits + 1}x{n_qubits + 1} matrix, got {rho.shape}")
        if check:
            if np.abs(rho - rho.conj().T).max() > TOL.structural:
                raise ValueError("density matrix is not Hermitian")
            rho = (rho + rho.conj().T) / 2
            if abs(np.trace(rho).real - 1) > TOL.structural:
                raise ValueError(f"trace {np.trace(rho).real:.17g} != 1")
            w, v = np.linalg.eigh(rho)
            if w.min() < -TOL.clamp:
                raise ValueError(f"density matrix has eigenvalue {w.min():.3g}")
            if w.min() < 0:
                w = np.clip(w, 0, None)
                rho = (v * w) @ v.conj().T
        rho.setflags(write=False)
        object.__setattr__(self, "n_qubits", int(n_qubits))
        object.__setattr__(self, "matrix", rho)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)[::-1]

    def spectrum(self) -> Spectrum:
        return Spectrum(self.n_qubits, np.clip(self.eigenvalues(), 0, None), tol=1e-9)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def to_json(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix],
        }

    @classmethod
    def from_json(cls, data) -> "SymmetricState":
        if isinstance(data, str):
            data = json.loads(data)
        m = np.array(data["matrix"], dtype=float)
        return cls(int(data["n_qubits"]), m[..., 0] + 1j * m[..., 1])


@dataclass(frozen=True, eq=False)
class MultipoleComponents:
    """Components ``rho_LM = Tr(rho T_LM^dagger)`` keyed by ``(L, M)``."""

    n_qubits: int
    rho_lm: dict

    def __getitem__(self, key) -> complex:
        return self.rho_lm[key]


def spectrum_r(s: Spectrum) -> float:
    """Hilbert-Schmidt distance of the spectrum's state to the maximally mixed one."""
    # centred form avoids cancellation near the maximally mixed state
    return float(np.linalg.norm(np.asarray(s.lambdas) - 1.0 / s.dim))


def state_from_spectrum(s: Spectrum, unitary: np.ndarray | None = None) -> SymmetricState:
    lam = np.asarray(s.lambdas)
    if unitary is None:
        return SymmetricState(s.n_qubits, np.diag(lam))
    return SymmetricState(s.n_qubits, (unitary * lam) @ unitary.conj().T)


def maximally_mixed(N: int) -> SymmetricState:
    return SymmetricState(N, np.eye(N + 1) / (N + 1))


@lru_cache(maxsize=None)
def _multipole_basis(N: int) -> tuple[tuple[tuple[int, int], ...], np.ndarray]:
    keys, mats = [], []
    for L in range(N + 1):
        for M in range(-L, L + 1):
            keys.append((L, M))
            mats.append(su2.multipole_operator(N, L, M))
    stack = np.array(mats)
    stack.setflags(write=False)
    return tuple(keys), stack


def multipole_components(state: SymmetricState) -> MultipoleComponents:
    N = state.n_qubits
    keys, stack = _multipole_basis(N)
    # Tr(rho T^dagger) with real T
    vals = np.einsum("ab,kab->k", state.matrix, stack)
    return MultipoleComponents(N, dict(zip(keys, (complex(v) for v in vals))))


def state_from_components(c: MultipoleComponents) -> np.ndarray:
    keys, stack = _multipole_basis(c.n_qubits)
    coeffs = np.array([c.rho_lm[k] for k in keys])
    return np.einsum("k,kab->ab", coeffs, stack)


def r_from_components(c: MultipoleComponents) -> float:
    total = 0.0
    for L in range(1, c.n_qubits + 1):
        total += abs(c.rho_lm[(L, 0)]) ** 2
        total += 2 * sum(abs(c.rho_lm[(L, M)]) ** 2 for M in range(1, L + 1))
    return sqrt(total)


def q_function(c: MultipoleComponents, L: int, theta: float, phi: float) -> float:
    if not 0 <= L <= c.n_qubits:
        raise ValueError(f"L={L} out of range")
    val = sum(c.rho_lm[(L, M)] * su2.spherical_harmonic(L, M, theta, phi) for M in range(-L, L + 1))
    if abs(val.imag) > 1e-8 * max(1.0, abs(val.real)):
        raise ValueError("Q function is not real; components are not Hermitian")
    return float(val.real)


@lru_cache(maxsize=None)
def _p_weights(N: int) -> np.ndarray:
    # sqrt(4 pi / (N+1)) / C^{jj}_{jj L0}
    return np.array([sqrt(4 * pi / (N + 1)) / float(su2.cg_top_identity(N, L)) for L in range(N + 1)])


def truncated_p(state, theta: float, phi: float) -> float:
    """Truncated (band-limited) P function at ``(theta, phi)``.

    ``state`` may be a :class:`SymmetricState` or precomputed
    :class:`MultipoleComponents`.
    """
    c = state if isinstance(state, MultipoleComponents) else multipole_components(state)
    w = _p_weights(c.n_qubits)
    return float(sum(w[L] * q_function(c, L, theta, phi) for L in range(c.n_qubits + 1)))


def truncated_p_north(state) -> float:
    """P function at the north pole: ``sum_m Delta_{j+m} <j m|rho|j m>``.

    Accepts a :class:`SymmetricState` or a (Dicke-ordered) diagonal vector.
    """
    if isinstance(state, SymmetricState):
        diag = np.real(np.diag(state.matrix))
        N = state.n_qubits
    else:
        diag = np.asarray(state, dtype=float)
        N = diag.size - 1
    return float(diag @ su2.kernel_diag_dicke(N))


def rotate_state(state: SymmetricState, alpha: float, beta: float, gamma: float) -> SymmetricState:
    D = su2.rotation_matrix(state.n_qubits / 2, alpha, beta, gamma)
    return SymmetricState(state.n_qubits, D @ state.matrix @ D.conj().T)


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_random_unitary(dim: int, seed=None, size: int | None = None) -> np.ndarray:
    """Haar-distributed unitary (or a stack of ``size`` of them) via phase-fixed QR."""
    if dim < 2:
        raise ValueError("dim must be >= 2")
    rng = as_rng(seed)
    shape = (dim, dim) if size is None else (size, dim, dim)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (d / np.abs(d))[..., None, :]


def random_spectrum(dim: int, seed=None) -> Spectrum:
    """Spectrum drawn uniformly from the probability simplex, then sorted."""
    if dim < 2:
        raise ValueError("dim must be >= 2")
    rng = as_rng(seed)
    x = rng.dirichlet(np.ones(dim))
    x = x / x.sum()
    return Spectrum(dim - 1, x)
