import math

import numpy as np
import pytest
import scipy.linalg as sla

from diracgap import geometry, pencil, rbf, varform
from diracgap.bessel import disk_e1
from diracgap.errors import BadBracket, MassDegenerate

E1 = disk_e1().e1_disk


@pytest.fixture(scope="module")
def disk():
    return geometry.disk()


@pytest.fixture(scope="module")
def disk_disc(disk):
    return rbf.build_discretization(disk, 150, 5.0, 0.08, 150, seed=3)


@pytest.fixture(scope="module")
def fm(disk, disk_disc):
    return varform.assemble_forms(disk, disk_disc)


class TestFormMatrices:
    def test_symmetry(self, fm):
        for mat in (fm.d, fm.m, fm.bd):
            assert np.abs(mat - mat.T).max() < 1e-13

    def test_stiffness_psd(self, fm):
        evals = sla.eigvalsh(fm.d)
        assert evals[0] >= -1e-10 * abs(evals[-1])

    def test_mass_psd(self, fm):
        evals = sla.eigvalsh(fm.m)
        assert evals[0] >= -1e-12 * abs(evals[-1])

    def test_holomorphic_function_has_tiny_stiffness(self, fm, disk_disc):
        # u = z: v = x1, w = x2 has zero zbar-derivative
        phi = rbf.mq_value_matrix(disk_disc.eps, disk_disc.interior_pts,
                                  disk_disc.centers)
        alpha = sla.lstsq(phi, disk_disc.interior_pts[:, 0])[0]
        beta = sla.lstsq(phi, disk_disc.interior_pts[:, 1])[0]
        x = np.concatenate([alpha, beta])
        assert x @ (fm.d @ x) < 1e-6 * (x @ (fm.m @ x))

    def test_constant_function_quotient(self, fm, disk, disk_disc):
        # q_E(1)/||1||^2 = E(P/A - E); at E=1 on the unit disk this is 1
        phi = rbf.mq_value_matrix(disk_disc.eps, disk_disc.interior_pts,
                                  disk_disc.centers)
        alpha = sla.lstsq(phi, np.ones(len(disk_disc.interior_pts)))[0]
        x = np.concatenate([alpha, np.zeros_like(alpha)])
        e = 1.0
        a_e = fm.d - e * e * fm.m + e * fm.bd
        quotient = (x @ (a_e @ x)) / (x @ (fm.m @ x))
        expected = e * (disk.perimeter / disk.area - e)
        assert abs(quotient - expected) < 1e-3


class TestMuOfE:
    def test_zero_at_origin(self, fm):
        mu, n_modes = varform.mu_of_e(fm, 0.0)
        assert abs(mu) < 5e-3
        assert n_modes >= 10

    def test_zero_at_disk_eigenvalue(self, fm):
        mu, _ = varform.mu_of_e(fm, E1)
        assert abs(mu) < 5e-3

    def test_positive_below_spectrum(self, fm):
        assert varform.mu_of_e(fm, 0.7)[0] > 0.0

    def test_mass_degenerate(self, disk, disk_disc):
        bad = varform.assemble_forms(disk, disk_disc, trunc_tol=2.0)
        with pytest.raises(MassDegenerate):
            varform.mu_of_e(bad, 1.0)


class TestMuCurve:
    def test_sign_structure(self, fm):
        grid = np.linspace(0.0, 2.5, 11)
        curve = varform.mu_curve(fm, grid)
        mus = np.array([s[1] for s in curve.samples])
        assert abs(mus[0]) < 5e-3
        interior = mus[1:-1]
        before = grid[1:-1] < E1
        assert (interior[before] > 0).all()
        assert (interior[~before] < 0).all()

    def test_discrete_concavity(self, fm):
        grid = np.linspace(0.0, 2.5, 11)
        mus = np.array([s[1] for s in varform.mu_curve(fm, grid).samples])
        second = mus[2:] - 2 * mus[1:-1] + mus[:-2]
        assert second.max() <= 1e-3 * np.abs(mus).max()

    def test_secant_inequality(self, fm):
        e_lo, e_hi = 0.5, 1.0
        mu_lo = varform.mu_of_e(fm, e_lo)[0]
        mu_hi = varform.mu_of_e(fm, e_hi)[0]
        assert mu_hi <= (e_hi / e_lo) * mu_lo - e_hi * (e_hi - e_lo) + 1e-3

    def test_grid_validation(self, fm):
        with pytest.raises(ValueError):
            varform.mu_curve(fm, [1.0, 0.5])


class TestE1FromMu:
    def test_disk_reference(self, fm):
        root = varform.e1_from_mu(fm, (0.7, 2.0))
        assert abs(root - E1) < 1e-3

    def test_bad_bracket(self, fm):
        with pytest.raises(BadBracket):
            varform.e1_from_mu(fm, (1.8, 2.2))

    def test_scaling_law(self):
        # mu_{rho D}(E) = rho^-2 mu_D(rho E), so the root scales as 1/rho
        rho = 1.3
        scaled = geometry.disk(rho)
        disc = rbf.build_discretization(scaled, 150, 5.0 / rho, 0.08 * rho,
                                        150, seed=3)
        fm_scaled = varform.assemble_forms(scaled, disc)
        root = varform.e1_from_mu(fm_scaled, (0.5, 1.8))
        assert abs(root - E1 / rho) < 1e-3

    def test_cross_validation_against_direct_solver(self, disk, disk_disc, fm):
        cm = rbf.collocation_matrices(disk_disc)
        ps = pencil.assemble_pencil(cm, disk_disc.interior_wts,
                                    disk_disc.boundary_wts)
        direct = pencil.find_eigenvalues(ps, 1.3, 1.6, 0.02, accept_tol=1e-4)[0].e
        root = varform.e1_from_mu(fm, (0.7, 2.0))
        assert abs(root - direct) < 5e-3


class TestScalingConsistency:
    def test_mu_scaling_identity(self, fm):
        rho = 1.3
        scaled = geometry.disk(rho)
        disc = rbf.build_discretization(scaled, 150, 5.0 / rho, 0.08 * rho,
                                        150, seed=3)
        fm_scaled = varform.assemble_forms(scaled, disc)
        for e in (0.6, 1.0, 1.4):
            lhs = varform.mu_of_e(fm_scaled, e)[0]
            rhs = varform.mu_of_e(fm, rho * e)[0] / rho ** 2
            assert abs(lhs - rhs) < 1e-3


class TestTransplantBound:
    def test_disk_saturates_at_eigenvalue(self, disk):
        assert abs(varform.transplant_bound(disk, E1)) < 1e-10

    def test_disk_critical_value_consistency(self, disk):
        from diracgap.bounds import evaluate_bounds
        e_crit = evaluate_bounds(disk).upper_ecrit
        assert varform.transplant_bound(disk, e_crit) >= -1e-8

    def test_dominates_mu_on_conformal_domain(self):
        dom = geometry.make_conformal_domain([1.0, 0.1])
        disc = rbf.build_discretization(dom, 150, 5.0, 0.08, 150, seed=3)
        fm_dom = varform.assemble_forms(dom, disc)
        for e in np.linspace(0.4, 2.0, 9):
            mu = varform.mu_of_e(fm_dom, float(e))[0]
            assert mu <= varform.transplant_bound(dom, float(e)) + 1e-3

    def test_rejects_radial_domains(self):
        dom = geometry.make_radial_domain([(0.0, 0.0), (0.1, 0.0)])
        with pytest.raises(ValueError):
            varform.transplant_bound(dom, 1.0)


class TestRobinComparison:
    def test_real_restriction_dominates(self, fm):
        for e in (0.5, 1.0, 1.5, 2.0):
            rob = varform.lambda_rob_minus_e2(fm, e)
            mu = varform.mu_of_e(fm, e)[0]
            assert rob >= mu - 1e-3


class TestRefinement:
    def test_mu_never_increases_under_refinement(self, disk):
        values = []
        for n in (150, 250, 350):
            disc = rbf.build_discretization(disk, n, 5.0, 0.08, n, seed=3)
            fm_n = varform.assemble_forms(disk, disc)
            values.append(varform.mu_of_e(fm_n, 1.0)[0])
        assert values[1] <= values[0] + 1e-3
        assert values[2] <= values[1] + 1e-3


class TestGradientDescentPath:
    def test_agrees_with_eigensolver(self, disk):
        disc = rbf.build_discretization(disk, 60, 5.0, 0.16, 48, seed=3)
        fm_small = varform.assemble_forms(disk, disc)
        mu_eig = varform.mu_of_e(fm_small, 1.0)[0]
        mu_gd, _ = varform.minimize_quotient_gradient(fm_small, 1.0)
        assert mu_gd >= mu_eig - 1e-10
        assert abs(mu_gd - mu_eig) < 1e-3
