import itertools
from fractions import Fraction

import numpy as np
import pytest
from helpers import random_admissible_y, random_birkhoff, random_spectrum_unsorted

from sas_witness import qp, su2
from sas_witness.states import Spectrum
from sas_witness.witnesses import YParams, extremal_y

Y2 = YParams(2, {2: Fraction(455, 12)})


def test_plb_uniform_identity():
    obj = qp.build_plb(Spectrum(2, [1 / 3] * 3), Y2)
    assert obj.f == pytest.approx(1 / 3)
    assert qp.evaluate(obj, np.eye(3)) == pytest.approx(1 / 3)


def test_plb_h_coefficients_n2():
    obj = qp.build_plb(Spectrum(2, [0.5, 0.3, 0.2]), Y2)
    y2 = 455 / 12
    f20, f21 = 18 / 35, -24 / 35
    np.testing.assert_allclose(obj.h, [-y2 * f21 / 2, y2 * f20 - y2 * f21 / 2])


def test_plb_dimension_mismatch():
    with pytest.raises(ValueError):
        qp.build_plb(Spectrum(2, [0.5, 0.3, 0.2]), extremal_y(3))


def test_zero_y_matches_p0():
    rng = np.random.default_rng(0)
    for N in (2, 3, 4):
        s = random_spectrum_unsorted(N, rng)
        obj = qp.build_plb(s, YParams.zero(N))
        B = random_birkhoff(N + 1, rng)
        diag = np.asarray(s.lambdas) @ B
        assert qp.evaluate(obj, B) == pytest.approx(diag @ su2.kernel_diag_dicke(N), abs=1e-12)


def test_gradient_finite_differences():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(100):
        N = int(rng.integers(2, 6))
        obj = qp.build_plb(random_spectrum_unsorted(N, rng), random_admissible_y(N, rng))
        B = random_birkhoff(N + 1, rng)
        G = qp.gradient(obj, B)
        eps = 1e-6
        num = np.zeros_like(G)
        for i, j in itertools.product(range(N + 1), repeat=2):
            E = np.zeros_like(B)
            E[i, j] = eps
            num[i, j] = (qp.evaluate(obj, B + E) - qp.evaluate(obj, B - E)) / (2 * eps)
        worst = max(worst, np.abs(num - G).max() / max(np.abs(G).max(), 1e-12))
    assert worst < 1e-6


def test_bprime_roundtrip():
    rng = np.random.default_rng(2)
    B = random_birkhoff(4, rng)
    bp = qp.matrix_to_bprime(B)
    np.testing.assert_allclose(qp.bprime_to_matrix(bp, 4), B, atol=1e-14)
    obj = qp.build_plb(random_spectrum_unsorted(3, rng), extremal_y(3))
    assert qp.evaluate_bprime(obj, bp) == pytest.approx(qp.evaluate(obj, B), abs=1e-12)
    # quadratic form in b' reproduces the value
    val = obj.f + 2 * obj.q @ bp + bp @ obj.hessian @ bp
    assert val == pytest.approx(qp.evaluate(obj, B), abs=1e-12)


def test_value_depends_on_lambda_b_only():
    rng = np.random.default_rng(3)
    s = Spectrum(2, [0.5, 0.3, 0.2])
    obj = qp.build_plb(s, Y2)
    lam = np.asarray(s.lambdas)
    for _ in range(20):
        B = random_birkhoff(3, rng)
        # move along a direction that keeps lambda B fixed and rows/columns summing to 0
        D = np.zeros((3, 3))
        D[:, 0] = [lam[1] - lam[2], lam[2] - lam[0], lam[0] - lam[1]]
        D[:, 1] = -D[:, 0]
        Bp = B + 1e-3 * D
        np.testing.assert_allclose(lam @ Bp, lam @ B, atol=1e-15)
        assert qp.evaluate(obj, Bp) == pytest.approx(qp.evaluate(obj, B), abs=1e-12)


def test_assignment_lmo():
    perm = qp.assignment_lmo(-np.eye(4))
    np.testing.assert_array_equal(perm, np.arange(4))
    assert (-np.eye(4))[np.arange(4), perm].sum() == -4
    perm0 = qp.assignment_lmo(np.zeros((3, 3)))
    assert sorted(perm0) == [0, 1, 2]
    rng = np.random.default_rng(4)
    for _ in range(20):
        C = rng.normal(size=(5, 5))
        best = min(C[np.arange(5), p].sum() for p in itertools.permutations(range(5)))
        assert C[np.arange(5), qp.assignment_lmo(C)].sum() == pytest.approx(best)


def test_is_birkhoff():
    assert qp.is_birkhoff(np.full((3, 3), 1 / 3))
    assert not qp.is_birkhoff(np.eye(3) * 0.9)
    assert qp.is_birkhoff(qp.permutation_matrix([2, 0, 1]))


def test_unconstrained_min_uniform_n2():
    obj = qp.build_plb(Spectrum(2, [1 / 3] * 3), Y2)
    g = [float(su2.g_coeff(2, L)) for L in (1, 2)]
    expected = 1 / 3 - 0.25 * (g[0] ** 2 / obj.h[0] + g[1] ** 2 / obj.h[1])
    assert qp.unconstrained_min(obj) == pytest.approx(expected)


def test_unconstrained_min_requires_positive_h():
    obj = qp.build_plb(Spectrum(2, [0.5, 0.3, 0.2]), YParams.zero(2))
    with pytest.raises(ValueError):
        qp.unconstrained_min(obj)


def test_fw_against_grid():
    obj = qp.build_plb(Spectrum(2, [0.45, 0.35, 0.20]), Y2)
    res = qp.fw_minimize(obj)
    assert res.status == "converged"
    assert abs(res.value - qp.grid_min_b3(obj, 0.01)) < 1e-3


def test_grid_requires_d3():
    obj = qp.build_plb(Spectrum(3, [0.4, 0.3, 0.2, 0.1]), extremal_y(3))
    with pytest.raises(ValueError):
        qp.grid_min_b3(obj)


def test_relaxation_chain_and_convergence():
    rng = np.random.default_rng(5)
    for _ in range(100):
        N = int(rng.integers(2, 6))
        obj = qp.build_plb(random_spectrum_unsorted(N, rng), random_admissible_y(N, rng, convex=True))
        res = qp.fw_minimize(obj)
        assert res.status == "converged"
        assert res.gap <= 1e-9
        assert qp.is_birkhoff(res.B, 1e-9)
        pmin, _ = qp.min_over_permutations(obj)
        assert res.value <= pmin + 1e-12
        if np.all(obj.h > 0):
            assert res.value >= qp.unconstrained_min(obj) - 1e-10


def test_fw_nonconvex_is_heuristic():
    rng = np.random.default_rng(6)
    # y_3 well below its lower admissible-convex range makes h_3 negative
    obj = qp.build_plb(random_spectrum_unsorted(4, rng), {3: -50.0, 4: 1.0})
    assert not obj.convex
    res = qp.fw_minimize(obj, restarts=3)
    assert res.status == "heuristic"
    assert res.lower_bound == -np.inf


def test_fw_budget_exhaustion_is_inconclusive():
    obj = qp.build_plb(Spectrum(3, [0.4, 0.3, 0.2, 0.1]), extremal_y(3))
    res = qp.fw_minimize(obj, tol=0.0, max_iter=2)
    assert res.status == "inconclusive"


def test_fw_trace(tmp_path):
    obj = qp.build_plb(Spectrum(2, [0.45, 0.35, 0.20]), Y2)
    res = qp.fw_minimize(obj, record_trace=True)
    path = tmp_path / "trace.csv"
    qp.write_trace(res, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "iteration,value,gap"
    assert len(lines) == len(res.trace) + 1 > 1


def test_unistochastic_check_examples():
    F = Fraction
    ok, area, uni = qp.unistochastic_check_d3((1, 0, 0, 1))
    assert ok and area == 0 and uni
    ok, area, uni = qp.unistochastic_check_d3((F(1, 3),) * 4)
    assert ok and area == F(1, 27) and uni
    ok, area, uni = qp.unistochastic_check_d3((F(1, 2), F(1, 2), F(1, 2), 0))
    assert ok and area == F(-1, 16) and not uni


def test_unistochastic_preimage_of_minimizers():
    rng = np.random.default_rng(8)
    for _ in range(1000):
        s = random_spectrum_unsorted(2, rng)
        obj = qp.build_plb(s, random_admissible_y(2, rng, convex=True))
        res = qp.fw_minimize(obj)
        b = qp.unistochastic_preimage_d3(s.lambdas, res.B)
        assert b is not None
        ok, area, uni = qp.unistochastic_check_d3(b)
        assert ok and area >= -1e-10
        Bp = qp.b3_matrix(b)
        np.testing.assert_allclose(np.asarray(s.lambdas) @ Bp, np.asarray(s.lambdas) @ res.B, atol=1e-9)
        assert qp.evaluate(obj, Bp) == pytest.approx(res.value, abs=1e-10)


def test_unistochastic_preimage_any_dim():
    rng = np.random.default_rng(9)
    for d in range(2, 8):
        for _ in range(20):
            lam = np.sort(rng.dirichlet(np.ones(d)))[::-1]
            B = qp.random_birkhoff_point(d, rng)
            Bp = qp.unistochastic_preimage(lam, B)
            assert Bp is not None
            assert qp.is_birkhoff(Bp, 1e-9)
            np.testing.assert_allclose(lam @ Bp, lam @ B, atol=1e-9)
