import math

import numpy as np
import pytest

from diracgap import geometry, pencil, rbf
from diracgap.bessel import disk_e1
from diracgap.errors import NoEigenvalueFound

E1 = disk_e1().e1_disk


@pytest.fixture(scope="module")
def disk():
    return geometry.disk()


@pytest.fixture(scope="module")
def setup(disk):
    disc = rbf.build_discretization(disk, 140, 5.0, 0.105, 140, seed=0)
    cm = rbf.collocation_matrices(disc)
    ps = pencil.assemble_pencil(cm, disc.interior_wts, disc.boundary_wts)
    return disc, cm, ps


@pytest.fixture(scope="module")
def solved(disk, setup):
    disc, _, ps = setup
    return pencil.find_eigenvalues(ps, 1.3, 1.6, 0.02, accept_tol=1e-4,
                                   domain=disk, disc=disc)


class TestAssembly:
    def test_block_layout(self, setup):
        disc, cm, ps = setup
        m_int, n = cm.mint.shape
        m_bnd = cm.mbnd.shape[0]
        assert ps.a.shape == (4 * m_int + 2 * m_bnd, 4 * n)
        ri = np.sqrt(disc.interior_wts)[:, None]
        # first interior equation block: columns (alpha2, beta2) = (-M2, M1)
        np.testing.assert_array_equal(ps.a[:m_int, 2 * n:3 * n], -ri * cm.m2int)
        np.testing.assert_array_equal(ps.a[:m_int, 3 * n:], ri * cm.m1int)
        np.testing.assert_array_equal(ps.a[:m_int, :2 * n], np.zeros((m_int, 2 * n)))
        # fifth block row encodes v2 = -n1 w1 - n2 v1
        rb = math.sqrt(m_int / m_bnd) * np.sqrt(disc.boundary_wts)[:, None]
        r0 = 4 * m_int
        np.testing.assert_array_equal(ps.a[r0:r0 + m_bnd, :n], rb * cm.m2bnd)
        np.testing.assert_array_equal(ps.a[r0:r0 + m_bnd, n:2 * n], rb * cm.m1bnd)
        np.testing.assert_array_equal(ps.a[r0:r0 + m_bnd, 2 * n:3 * n], rb * cm.mbnd)

    def test_b_matrix_structure(self, setup):
        disc, cm, ps = setup
        m_int, n = cm.mint.shape
        ri = np.sqrt(disc.interior_wts)[:, None]
        for k in range(4):
            np.testing.assert_array_equal(
                ps.b[k * m_int:(k + 1) * m_int, k * n:(k + 1) * n], ri * cm.mint)
        assert not ps.b[4 * m_int:].any()

    def test_residual_matches_direct_equations(self, setup):
        disc, cm, ps = setup
        rng = np.random.Generator(np.random.Philox(key=5))
        x = rng.standard_normal(4 * ps.n)
        a1, b1, a2, b2 = np.split(x, 4)
        e = 1.3
        ri = np.sqrt(disc.interior_wts)
        rb = math.sqrt(ps.m_int / ps.m_bnd) * np.sqrt(disc.boundary_wts)
        direct = np.concatenate([
            ri * (-cm.m2int @ a2 + cm.m1int @ b2 - e * (cm.mint @ a1)),
            ri * (-cm.m1int @ a2 - cm.m2int @ b2 - e * (cm.mint @ b1)),
            ri * (cm.m2int @ a1 + cm.m1int @ b1 - e * (cm.mint @ a2)),
            ri * (-cm.m1int @ a1 + cm.m2int @ b1 - e * (cm.mint @ b2)),
            rb * (cm.m2bnd @ a1 + cm.m1bnd @ b1 + cm.mbnd @ a2),
            rb * (-cm.m1bnd @ a1 + cm.m2bnd @ b1 + cm.mbnd @ b2),
        ])
        assert np.abs((ps.a - e * ps.b) @ x - direct).max() < 1e-12


class TestSigma:
    def test_large_away_from_spectrum(self, setup):
        _, _, ps = setup
        assert pencil.sigma_min_at(ps, 0.1) > 1e-3

    def test_dip_at_disk_eigenvalue(self, setup):
        _, _, ps = setup
        at = pencil.sigma_min_at(ps, E1)
        assert at < pencil.sigma_min_at(ps, E1 - 0.05)
        assert at < pencil.sigma_min_at(ps, E1 + 0.05)

    def test_fast_path_matches_svd(self, setup):
        _, _, ps = setup
        work = pencil._SigmaWork(ps)
        for e in (0.9, E1, 1.8):
            assert work.sigma_rel(e) == pytest.approx(pencil.sigma_min_at(ps, e),
                                                      rel=1e-7)


class TestFindEigenvalues:
    def test_disk_value(self, solved):
        assert abs(solved[0].e - E1) < 1e-4

    def test_result_contract(self, solved):
        first = solved[0]
        assert first.sigma_min < 1e-4
        assert np.linalg.norm(first.coeffs) == pytest.approx(1.0, abs=1e-12)
        assert first.bc_residual < 1e-3

    def test_lower_bound_invariant(self, disk, solved):
        assert solved[0].e >= math.sqrt(2 * math.pi / disk.area) - 1e-6

    def test_scaled_disk(self):
        d = geometry.disk(2.0)
        disc = rbf.build_discretization(d, 140, 2.5, 0.21, 140, seed=0)
        cm = rbf.collocation_matrices(disc)
        ps = pencil.assemble_pencil(cm, disc.interior_wts, disc.boundary_wts)
        res = pencil.find_eigenvalues(ps, 0.6, 0.85, 0.01, accept_tol=1e-4)
        assert abs(res[0].e - E1 / 2.0) < 1e-5

    def test_no_eigenvalue_in_window(self, setup):
        _, _, ps = setup
        with pytest.raises(NoEigenvalueFound):
            pencil.find_eigenvalues(ps, 0.3, 0.5, 0.02, accept_tol=1e-4)

    def test_scan_step_validated(self, setup):
        _, _, ps = setup
        with pytest.raises(ValueError):
            pencil.find_eigenvalues(ps, 1.0, 2.0, 0.1)

    def test_spectral_symmetry(self, setup):
        _, _, ps = setup
        e_neg = pencil.refine_minimum(ps, -1.6, -1.3, 0.02)
        e_pos = pencil.refine_minimum(ps, 1.3, 1.6, 0.02)
        assert abs(e_pos + e_neg) < 1e-5


class TestReconstruction:
    def test_radial_symmetry_and_peak(self, solved, setup):
        disc, _, _ = setup
        first = solved[0]
        theta = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        for radius in (0.0, 0.3, 0.6, 0.9):
            ring = np.stack([radius * np.cos(theta), radius * np.sin(theta)], axis=-1)
            _, a1, _, _, _ = pencil.reconstruct_field(first, disc, ring)
            assert a1.max() - a1.min() < 1e-4
        pts = np.array([[0.0, 0.0], [0.5, 0.0], [0.0, 0.9]])
        _, a1, _, _, _ = pencil.reconstruct_field(first, disc, pts)
        assert a1[0] > a1[1] > a1[2]

    def test_l2_normalization(self, solved, setup):
        disc, _, _ = setup
        first = solved[0]
        _, a1, _, a2, _ = pencil.reconstruct_field(first, disc, disc.interior_pts)
        norm2 = float(disc.interior_wts @ (a1 ** 2 + a2 ** 2))
        assert norm2 == pytest.approx(1.0, abs=1e-6)

    def test_boundary_condition_on_fresh_nodes(self, disk, solved, setup):
        disc, _, _ = setup
        assert pencil.boundary_residual(disk, disc, solved[0].coeffs) < 1e-3


def test_golden_minimize_vshape():
    # V-shaped like a sigma dip; resolvable down to the bracket tolerance
    f = lambda x: abs(x - 0.7) + 3.0
    assert pencil.golden_minimize(f, 0.0, 2.0, 1e-12) == pytest.approx(0.7, abs=1e-10)
