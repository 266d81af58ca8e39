"""Vertex enumeration for polytopes cut out of the probability simplex.

A double-description sweep: start from the simplex and add one half-space
``c . lambda >= 0`` at a time, replacing every edge that crosses the new
hyperplane by its intersection point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = ["DDResult", "simplex_cut_vertices", "distinct_permutations", "dedupe_points"]


@dataclass
class DDResult:
    vertices: np.ndarray  # (n_vertices, d) points on the simplex
    tight: np.ndarray  # (n_vertices, n_faces) bool, tight user faces
    edges: list  # adjacent vertex index pairs of the final polytope


def distinct_permutations(values) -> list[tuple]:
    """All distinct orderings of ``values`` (duplicates collapse)."""
    return sorted(set(itertools.permutations(values)))


def dedupe_points(points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    out: list[np.ndarray] = []
    for p in np.asarray(points, dtype=float):
        if not any(np.abs(p - q).max() <= tol for q in out):
            out.append(p)
    return np.array(out)


def _adjacent(T: np.ndarray, i: int, j: int, dim: int) -> bool:
    common = T[i] & T[j]
    if common.sum() < dim - 1:
        return False
    # no third vertex may share every constraint tight at both
    return int(T[:, common].all(axis=1).sum()) == 2


def simplex_cut_vertices(faces, tol: float = 1e-10) -> DDResult:
    """Vertices of ``{lambda in simplex : c . lambda >= 0 for c in faces}``.

    ``faces`` is an iterable of length-``d`` coefficient vectors. The polytope
    must be non-empty. Tightness is tracked for the simplex facets too, but
    only the user faces are reported in :attr:`DDResult.tight`.
    """
    faces = np.array([np.asarray(c, dtype=float) for c in faces])
    d = faces.shape[1]
    dim = d - 1  # affine dimension
    n_faces = faces.shape[0]
    # constraints 0..d-1 are lambda_i >= 0, then the user faces
    C = np.vstack([np.eye(d), faces])
    n_con = C.shape[0]
    V = np.eye(d)
    T = np.zeros((d, n_con), dtype=bool)
    T[:, :d] = ~np.eye(d, dtype=bool)
    for m in range(d, n_con):
        s = V @ C[m] / max(1.0, np.abs(C[m]).max())
        neg = s < -tol
        if not neg.any():
            T[np.abs(s) <= tol, m] = True
            continue
        pos = s > tol
        zero = ~neg & ~pos
        pi, ni = np.flatnonzero(pos), np.flatnonzero(neg)
        counts = T[pi].astype(np.float32) @ T[ni].astype(np.float32).T
        new_v, new_t = [], []
        for a, b in zip(*np.nonzero(counts >= dim - 1)):
            p, n = pi[a], ni[b]
            if not _adjacent(T, p, n, dim):
                continue
            w = s[p] / (s[p] - s[n])
            new_v.append(V[p] + w * (V[n] - V[p]))
            t = T[p] & T[n]
            t = t.copy()
            t[m] = True
            new_t.append(t)
        keep = ~neg
        T[zero, m] = True
        V = np.vstack([V[keep]] + ([np.array(new_v)] if new_v else []))
        T = np.vstack([T[keep]] + ([np.array(new_t)] if new_t else []))
        if V.shape[0] == 0:
            raise ValueError("polytope is empty")
    edges = [(i, j) for i, j in itertools.combinations(range(V.shape[0]), 2) if _adjacent(T, i, j, dim)]
    return DDResult(V, T[:, d:], edges)
