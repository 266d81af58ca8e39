import numpy as np
import pytest
from scipy.spatial import HalfspaceIntersection

from sas_witness import su2
from sas_witness import witnesses as W
from sas_witness.polytope import dedupe_points, distinct_permutations, simplex_cut_vertices


def test_distinct_permutations_collapse():
    assert len(distinct_permutations((1, -3, 3))) == 6
    assert len(distinct_permutations(su2.kernel_eigenvalues(3).deltas)) == 12


def test_redundant_face_keeps_simplex():
    res = simplex_cut_vertices([np.ones(3)])
    np.testing.assert_allclose(res.vertices, np.eye(3))
    assert len(res.edges) == 3


def test_cut_in_half():
    # lambda_0 >= lambda_1 keeps half of the triangle
    res = simplex_cut_vertices([[1.0, -1.0, 0.0]])
    pts = sorted(tuple(np.round(v, 12)) for v in res.vertices)
    assert pts == [(0.0, 0.0, 1.0), (0.5, 0.5, 0.0), (1.0, 0.0, 0.0)]
    assert res.tight.sum() == 2


def _scipy_vertices(faces, d):
    # affine chart lambda_0..lambda_{d-2}, lambda_{d-1} = 1 - sum
    rows = []
    for c in list(np.eye(d)) + [np.asarray(f, float) for f in faces]:
        a = c[:-1] - c[-1]
        rows.append(np.append(-a, -c[-1]))  # -(a.x + c_last) <= 0
    hs = np.array(rows)
    interior = np.full(d - 1, 1.0 / d)
    pts = HalfspaceIntersection(hs, interior).intersections
    full = np.hstack([pts, 1 - pts.sum(axis=1, keepdims=True)])
    return dedupe_points(full, 1e-8)


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_dd_matches_scipy(N):
    faces = distinct_permutations(su2.kernel_eigenvalues(N).deltas)
    ours = simplex_cut_vertices(faces).vertices
    ref = _scipy_vertices(faces, N + 1)
    assert len(ours) == len(ref)
    for v in ref:
        assert np.abs(ours - v).max(axis=1).min() < 1e-8


@pytest.mark.parametrize(
    "N, n_faces, n_vertices, n_mid",
    [(2, 6, 6, 0), (3, 12, 14, 6), (4, 120, 30, 0), (5, 180, 62, 15)],
)
def test_polytope_counts(N, n_faces, n_vertices, n_mid):
    geo = W.s1_polytope(N)
    assert len(geo.face_normals) == n_faces
    assert len(geo.vertices) == n_vertices == 2 * (2**N - 1)
    assert len(geo.edge_midpoints) == n_mid
    # every extreme point is among the reported vertices
    for e in geo.extreme_points:
        assert np.abs(geo.vertices - e).max(axis=1).min() < 1e-9


def test_midpoints_lie_on_edges():
    geo = W.s1_polytope(3)
    dd = simplex_cut_vertices(geo.face_normals)
    mids = [(dd.vertices[i] + dd.vertices[j]) / 2 for i, j in dd.edges]
    for m in geo.edge_midpoints:
        assert min(np.abs(m - x).max() for x in mids) < 1e-9


def test_polytope_radii_vs_candidates():
    for N in range(2, 6):
        geo = W.s1_polytope(N)
        row = W.radii_row(N, ghz_max=0, use_enumeration=False)
        assert geo.r_max == pytest.approx(row["r_max_S1"], abs=1e-12)
        assert geo.r_vmin == pytest.approx(row["r_vmin_S1"], abs=1e-12)
        assert float(geo.r_inner) <= geo.r_vmin


def test_polytope_range():
    with pytest.raises(W.UnsupportedError):
        W.s1_polytope(7)
    with pytest.raises(W.UnsupportedError):
        W.s1_polytope(1)
