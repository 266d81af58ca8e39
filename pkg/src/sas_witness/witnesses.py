"""Spectral certificates of symmetric absolute separability.

* ``W0`` -- purity ball around the maximally mixed state.
* ``W1`` -- linear test ``lambda_desc . Delta_asc >= 0`` (the polytope S1).
* ``W2`` -- minimum of the quadratic lower bound over doubly stochastic matrices.
* ``W3`` -- purity ball obtained from the closed-form minimum of ``W2``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from . import qp, su2
from .exact import SqrtRational, fraction_str
from .polytope import dedupe_points, distinct_permutations, simplex_cut_vertices
from .states import Spectrum, spectrum_r

__all__ = [
    "Verdict",
    "YParams",
    "w0_bound",
    "w0_check",
    "w1_face",
    "w1_margin",
    "w1_check",
    "w3_bound",
    "w3_check",
    "extremal_y",
    "w2_check",
    "check_all",
    "PolytopeGeometry",
    "s1_polytope",
    "s1_vertex_candidates",
    "s1_inner_radius",
    "s1_inner_point",
    "radii_report",
    "RADII_COLUMNS",
    "UnsupportedError",
]

W_IDS = ("W0", "W1", "W2", "W3")


class UnsupportedError(ValueError):
    """Requested size is outside the supported range of an operation."""


def _jsonable(v):
    if isinstance(v, Fraction):
        return fraction_str(v)
    if isinstance(v, SqrtRational):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


@dataclass
class Verdict:
    witness_id: str
    certified: bool
    margin: float
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "witness": self.witness_id,
            "certified": bool(self.certified),
            "margin": float(self.margin),
            "params": _jsonable(self.params),
        }


@dataclass(frozen=True)
class YParams:
    """Weights ``y_L`` of the squared-Q_L terms, only for ``N/2 < L <= N``."""

    n_qubits: int
    y: dict

    def __post_init__(self):
        N = self.n_qubits
        bad = [L for L in self.y if not (N < 2 * int(L) <= 2 * N)]
        if bad:
            raise ValueError(f"y_L only exists for N/2 < L <= N; got L={bad}")
        object.__setattr__(self, "y", {int(L): v for L, v in sorted(self.y.items())})

    @classmethod
    def zero(cls, N: int) -> "YParams":
        return cls(N, {L: Fraction(0) for L in range(N // 2 + 1, N + 1)})

    @classmethod
    def from_list(cls, N: int, values) -> "YParams":
        """Values for ``L = floor(N/2)+1 .. N`` in increasing order."""
        Ls = list(range(N // 2 + 1, N + 1))
        values = list(values)
        if len(values) != len(Ls):
            raise ValueError(f"expected {len(Ls)} y values for N={N}, got {len(values)}")
        return cls(N, dict(zip(Ls, values)))

    def get(self, L: int):
        return self.y.get(L, 0)

    def violations(self, tol: float = 1e-12) -> list[tuple[int, int, object]]:
        """Rows ``(L, mu, value)`` of the admissibility system that are negative."""
        N = self.n_qubits
        exact = all(isinstance(v, (int, Fraction)) for v in self.y.values())
        yN = self.get(N) if exact else float(self.get(N))
        fN1 = su2.f_coeff(N, N, 1) if exact else float(su2.f_coeff(N, N, 1))
        out = []
        for L in range(1, N + 1):
            for mu in range(1, L + 1):
                if 2 * L > N:
                    F = su2.f_coeff(N, L, mu) if exact else float(su2.f_coeff(N, L, mu))
                    yl = self.get(L) if exact else float(self.get(L))
                    val = yl * F - yN * fN1
                else:
                    val = -yN * fN1
                if (val < 0) if exact else (val < -tol * max(1.0, abs(yN))):
                    out.append((L, mu, val))
        return out

    def admissible(self, tol: float = 1e-12) -> bool:
        return not self.violations(tol)

    def to_json(self) -> dict:
        return {str(L): _jsonable(v) for L, v in self.y.items()}


# -- W0 ---------------------------------------------------------------------


def w0_bound(N: int) -> Fraction:
    """Bound on ``r^2`` of the purity-based witness."""
    return 1 / (2 * (N + 1) * ((2 * N + 1) * comb(2 * N, N) - Fraction(N + 2, 2)))


def w0_check(s: Spectrum) -> Verdict:
    bound = w0_bound(s.n_qubits)
    margin = float(bound) - spectrum_r(s) ** 2
    return Verdict("W0", margin >= -1e-12, margin, {"r2_bound": bound})


# -- W1 ---------------------------------------------------------------------


def w1_face(N: int) -> tuple[int, ...]:
    """Ascending kernel eigenvalues: the strictest face of S1 for a sorted spectrum."""
    return tuple(sorted(su2.kernel_eigenvalues(N).deltas))


def w1_margin(s: Spectrum) -> float:
    return float(np.asarray(s.lambdas) @ np.array(w1_face(s.n_qubits), dtype=float))


def w1_check(s: Spectrum) -> Verdict:
    m = w1_margin(s)
    return Verdict("W1", m >= -1e-12, m, {"face": list(w1_face(s.n_qubits))})


# -- W3 ---------------------------------------------------------------------


@lru_cache(maxsize=None)
def w3_bound(N: int) -> Fraction:
    """Exact bound on ``r^2`` from the closed-form minimum at the extremal ``y``."""
    if N < 2:
        raise ValueError("N must be >= 2")
    total = Fraction(0)
    for L in range(1, N + 1):
        g2 = su2.g_squared(N, L)
        if 2 * L > N:
            total += g2 / (1 - 2 * su2.f_coeff(N, L, 0) / su2.f_coeff(N, L, 1))
        else:
            total += g2
    return 1 / ((N + 1) ** 2 * total)


def w3_check(s: Spectrum) -> Verdict:
    bound = w3_bound(s.n_qubits)
    margin = float(bound) - spectrum_r(s) ** 2
    return Verdict("W3", margin >= -1e-12, margin, {"r2_bound": bound})


@lru_cache(maxsize=None)
def extremal_y(N: int) -> YParams:
    """The admissible ``y`` maximizing the W3 ball radius."""
    if N < 2:
        raise ValueError("N must be >= 2")
    fN1 = su2.f_coeff(N, N, 1)
    total = Fraction(0)
    for L in range(1, N + 1):
        g2 = su2.g_squared(N, L)
        theta = 1 if 2 * L > N else 0
        ratio = su2.f_coeff(N, L, 0) / su2.f_coeff(N, L, 1) if theta else 0
        total += g2 / (2 * theta * ratio - 1)
    yN = (N + 1) / fN1 * total
    y = {L: fN1 / su2.f_coeff(N, L, 1) * yN for L in range(N // 2 + 1, N)}
    y[N] = yN
    return YParams(N, y)


# -- W2 ---------------------------------------------------------------------


def w2_check(
    s: Spectrum,
    y: YParams,
    tol: float = 1e-9,
    max_iter: int = 50_000,
    restarts: int = 8,
    seed=0,
    quick: bool = True,
) -> Verdict:
    """Certify via the minimum of the quadratic lower bound over doubly stochastic matrices.

    With ``quick`` the solver is skipped when the closed-form global minimum
    already certifies, or when some permutation matrix already refutes.
    A solver that does not converge never certifies.
    """
    if y.n_qubits != s.n_qubits:
        raise ValueError("y parameters and spectrum have different N")
    bad = y.violations()
    if bad:
        L, mu, val = bad[0]
        raise ValueError(f"inadmissible y: row (L={L}, mu={mu}) is {float(val):.3g} < 0")
    obj = qp.build_plb(s, y)
    params = {"y": y.to_json(), "tol_solver": tol}
    if quick:
        if np.all(obj.h > 0):
            um = qp.unconstrained_min(obj)
            if um >= 0:
                params.update(method="closed-form", status="converged", lower_bound=um)
                return Verdict("W2", True, um, params)
        if obj.dim <= 7:
            pv, _ = qp.min_over_permutations(obj)
            if pv < -tol:
                params.update(method="vertex", status="converged", lower_bound=None)
                return Verdict("W2", False, pv, params)
    res = qp.fw_minimize(obj, tol=tol, max_iter=max_iter, restarts=restarts, seed=seed)
    params.update(
        method="frank-wolfe", status=res.status, gap=res.gap, iterations=res.iterations,
        lower_bound=None if not np.isfinite(res.lower_bound) else res.lower_bound,
    )
    certified = res.status == "converged" and res.lower_bound >= -tol
    return Verdict("W2", bool(certified), res.value, params)


def check_all(s: Spectrum, y: YParams | None = None, **w2_kwargs) -> list[Verdict]:
    y = extremal_y(s.n_qubits) if y is None else y
    return [w0_check(s), w1_check(s), w2_check(s, y, **w2_kwargs), w3_check(s)]


# -- S1 geometry --------------------------------------------------------------


def s1_inner_radius(N: int) -> SqrtRational:
    """Distance from the maximally mixed spectrum to the nearest face of S1."""
    d2 = su2.delta_norm_sq(N)
    return SqrtRational(1, Fraction(1, (N + 1) * ((N + 1) * d2 - 1)))


def s1_inner_point(N: int) -> tuple[Fraction, ...]:
    """The tangency point ``(|Delta|^2 1 - Delta) / ((N+1)|Delta|^2 - 1)``."""
    d2 = su2.delta_norm_sq(N)
    den = (N + 1) * d2 - 1
    return tuple(Fraction(d2 - dk, den) for dk in su2.kernel_eigenvalues(N).deltas)


def s1_vertex_candidates(N: int) -> list[tuple[int, tuple[Fraction, ...]]]:
    """Exact S1 vertices inside the Weyl chamber, one per subset size ``k = 1..N``.

    The k-th point lies on the segment from the uniform spectrum to
    ``(1/k, ..., 1/k, 0, ..., 0)`` where the W1 margin vanishes; its orbit under
    permutations has ``binomial(N+1, k)`` points.
    """
    D = w1_face(N)
    n = N + 1
    u = Fraction(1, n)
    mu = Fraction(sum(D), n)
    out = []
    for k in range(1, N + 1):
        mv = Fraction(sum(D[:k]), k)
        if mv >= 0:
            raise UnsupportedError(f"chamber corner k={k} is inside S1 for N={N}")
        s = mu / (mu - mv)
        a = u + s * (Fraction(1, k) - u)
        b = u - s * u
        out.append((k, (a,) * k + (b,) * (n - k)))
    return out


def _dist2(point) -> Fraction:
    n = len(point)
    return sum((p - Fraction(1, n)) ** 2 for p in point)


@dataclass
class PolytopeGeometry:
    n_qubits: int
    face_normals: list
    vertices: np.ndarray
    extreme_points: np.ndarray
    edge_midpoints: np.ndarray
    r_max: float
    r_vmin: float
    r_inner: SqrtRational

    def to_json(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "n_faces": len(self.face_normals),
            "faces": [list(c) for c in self.face_normals],
            "n_vertices": int(len(self.vertices)),
            "vertices": [[float(x) for x in v] for v in self.vertices],
            "n_extreme_points": int(len(self.extreme_points)),
            "n_edge_midpoints": int(len(self.edge_midpoints)),
            "r_max": float(self.r_max),
            "r_vmin": float(self.r_vmin),
            "r_inner": str(self.r_inner),
            "r_inner_float": float(self.r_inner),
            "r_inner_squared": fraction_str(self.r_inner.squared()),
        }


POLYTOPE_MAX_N = 6


@lru_cache(maxsize=None)
def s1_polytope(N: int) -> PolytopeGeometry:
    """Faces, vertices and radii of S1 for ``2 <= N <= 6``.

    Extreme points come from a double-description sweep over the distinct
    faces. The reported vertices additionally include the points where the
    face hyperplane crosses the Weyl-chamber edges (their orbits), which for
    odd ``N`` adds points sitting at midpoints of polytope edges.
    """
    if not 2 <= N <= POLYTOPE_MAX_N:
        raise UnsupportedError(f"polytope enumeration supports 2 <= N <= {POLYTOPE_MAX_N}")
    n = N + 1
    faces = distinct_permutations(su2.kernel_eigenvalues(N).deltas)
    full = simplex_cut_vertices(faces)
    # chamber: lambda_0 >= ... >= lambda_N plus the strictest face
    chamber_faces = [np.eye(n)[i] - np.eye(n)[i + 1] for i in range(N)] + [np.array(w1_face(N), float)]
    chamber = simplex_cut_vertices(chamber_faces)
    cut = chamber.vertices[chamber.tight[:, -1]]
    orbit = [p for v in cut for p in itertools.permutations(np.round(v, 15))]
    vertices = dedupe_points(np.array(orbit))
    vertices = vertices[np.lexsort(vertices.T[::-1])][::-1]
    extreme = full.vertices
    is_extreme = np.array([np.abs(extreme - v).max(axis=1).min() <= 1e-9 for v in vertices])
    mids = vertices[~is_extreme]
    u = np.full(n, 1.0 / n)
    dist = np.linalg.norm(vertices - u, axis=1)
    return PolytopeGeometry(
        n_qubits=N,
        face_normals=faces,
        vertices=vertices,
        extreme_points=extreme,
        edge_midpoints=mids,
        r_max=float(dist.max()),
        r_vmin=float(dist.min()),
        r_inner=s1_inner_radius(N),
    )


# -- radii report -----------------------------------------------------------

RADII_COLUMNS = ("N", "r_S0", "r_S3", "r_max_S1", "r_vmin_S1", "r_GHZ", "r_NS")


def _sqrt_fraction(q: Fraction) -> float:
    return float(SqrtRational(1, q))


def radii_row(N: int, ghz_max: int = 10, ghz_tol: float = 1e-10, use_enumeration: bool = True) -> dict:
    from . import oracle

    r_s0 = _sqrt_fraction(w0_bound(N))
    r_s3 = _sqrt_fraction(w3_bound(N))
    cands = [_dist2(p) for _, p in s1_vertex_candidates(N)]
    r_max = _sqrt_fraction(max(cands))
    r_vmin = _sqrt_fraction(min(cands))
    if use_enumeration and N <= POLYTOPE_MAX_N:
        geo = s1_polytope(N)
        if abs(geo.r_max - r_max) > 1e-9 or abs(geo.r_vmin - r_vmin) > 1e-9:
            raise UnsupportedError(f"vertex candidates disagree with enumeration at N={N}")
    row = {
        "N": N,
        "r_S0": r_s0,
        "r_S3": r_s3,
        "r_max_S1": r_max,
        "r_vmin_S1": r_vmin,
        "r_GHZ": oracle.ghz_radius(N, tol=ghz_tol) if N <= ghz_max else None,
        "r_NS": oracle.r_ns(N),
    }
    return row


def radii_report(n_range, ghz_max: int = 10, ghz_tol: float = 1e-10, use_enumeration: bool = False) -> list[dict]:
    """One row of characteristic radii per ``N``; ``r_GHZ`` only for ``N <= ghz_max``."""
    rows = []
    for N in n_range:
        if N < 2:
            raise ValueError("N must be >= 2")
        rows.append(radii_row(N, ghz_max=ghz_max, ghz_tol=ghz_tol, use_enumeration=use_enumeration))
    return rows
