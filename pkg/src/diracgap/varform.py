"""Variational route: discretize the spectral quadratic form, evaluate its
first min-max level mu(E) as a generalized eigenvalue, and root-find
mu(E) = 0 to recover the principal eigenvalue.

The complex trial function u = v + i*w is expanded in the same multiquadric
basis as the direct solver, giving a real coefficient space of dimension 2N.
The three E-independent matrices are

    D  — quadrature of (d1 v - d2 w)^2 + (d2 v + d1 w)^2   (stiffness),
    M  — interior mass of v^2 + w^2,
    Bd — boundary mass of v^2 + w^2,

and the form matrix is A(E) = D - E^2 M + E Bd. Ill-conditioned mass modes
are projected out before the pencil solve.
"""

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from . import geometry, rbf
from .bessel import bessel_moment, disk_e1, j1_squared_radial_integral
from .errors import BadBracket, MassDegenerate

DEFAULT_TRUNC_TOL = 1e-10


class FormMatrices:
    """Symmetric stiffness/mass/boundary-mass triple with cached mass modes."""

    def __init__(self, d, m, bd, trunc_tol=DEFAULT_TRUNC_TOL):
        self.d = 0.5 * (d + d.T)
        self.m = 0.5 * (m + m.T)
        self.bd = 0.5 * (bd + bd.T)
        self.trunc_tol = trunc_tol

    @cached_property
    def _reduced(self):
        evals, vecs = sla.eigh(self.m)
        keep = evals > self.trunc_tol * evals[-1]
        if keep.sum() < 10:
            raise MassDegenerate(f"only {int(keep.sum())} mass modes above truncation")
        basis = vecs[:, keep] / np.sqrt(evals[keep])
        return basis.T @ self.d @ basis, basis.T @ self.bd @ basis, int(keep.sum())

    @cached_property
    def _reduced_real(self):
        # v-only restriction (w = 0): the leading N x N blocks
        n = self.d.shape[0] // 2
        evals, vecs = sla.eigh(self.m[:n, :n])
        keep = evals > self.trunc_tol * evals[-1]
        if keep.sum() < 10:
            raise MassDegenerate(f"only {int(keep.sum())} real mass modes above truncation")
        basis = vecs[:, keep] / np.sqrt(evals[keep])
        return (basis.T @ self.d[:n, :n] @ basis,
                basis.T @ self.bd[:n, :n] @ basis, int(keep.sum()))


@dataclass(frozen=True)
class MuCurve:
    samples: tuple          # of (E, mu, n_modes)
    e1_root: float = None


def assemble_forms(domain, disc, trunc_tol=DEFAULT_TRUNC_TOL, refine=2):
    """Build (D, M, Bd) by interior/boundary quadrature of the split
    integrands.

    The interior quadrature is a boundary-clipped cell rule at `refine`x the
    discretization's grid resolution: the collocation spacing and its raw h^2
    weights are too crude for the form integrals near the boundary, and
    upgrading only the quadrature keeps the trial space identical to the
    direct solver's.
    """
    if refine > 1:
        h = math.sqrt(float(np.median(disc.interior_wts)))
        pts, wts = geometry.interior_quadrature(domain, h / refine)
        # residual first-moment correction (already ~1e-5 relative)
        wts = wts * (domain.area / wts.sum())
    else:
        pts, wts = disc.interior_pts, disc.interior_wts
    phi, d1, d2 = rbf.mq_all_matrices(disc.eps, pts, disc.centers)
    # rows of the two gradient combinations over the (alpha, beta) stacking
    g1 = np.hstack([d1, -d2])
    g2 = np.hstack([d2, d1])
    d = (g1 * wts[:, None]).T @ g1 + (g2 * wts[:, None]).T @ g2
    zeros = np.zeros_like(phi)
    val = np.hstack([phi, zeros])
    val2 = np.hstack([zeros, phi])
    m = (val * wts[:, None]).T @ val + (val2 * wts[:, None]).T @ val2
    phib = rbf.mq_value_matrix(disc.eps, disc.boundary_pts, disc.centers)
    zb = np.zeros_like(phib)
    bval = np.hstack([phib, zb])
    bval2 = np.hstack([zb, phib])
    bw = disc.boundary_wts[:, None]
    bd = (bval * bw).T @ bval + (bval2 * bw).T @ bval2
    return FormMatrices(d, m, bd, trunc_tol=trunc_tol)


def mu_of_e(fm, e):
    """Smallest eigenvalue of (D - E^2 M + E Bd, M) on the retained modes."""
    dr, bdr, n_modes = fm._reduced
    a = dr - (e * e) * np.eye(n_modes) + e * bdr
    mu = float(sla.eigh(a, eigvals_only=True, subset_by_index=[0, 0])[0])
    return mu, n_modes


def lambda_rob_minus_e2(fm, e):
    """Same minimization restricted to real trial functions (w = 0); equals
    the Robin eigenvalue shifted by -E^2."""
    dr, bdr, n_modes = fm._reduced_real
    a = dr - (e * e) * np.eye(n_modes) + e * bdr
    return float(sla.eigh(a, eigvals_only=True, subset_by_index=[0, 0])[0])


def mu_curve(fm, e_grid):
    """Sample mu over an ascending nonnegative grid."""
    e_grid = np.asarray(e_grid, dtype=float)
    if np.any(np.diff(e_grid) <= 0) or e_grid[0] < 0:
        raise ValueError("grid must be ascending and nonnegative")
    samples = []
    for e in e_grid:
        mu, n_modes = mu_of_e(fm, float(e))
        samples.append((float(e), mu, n_modes))
    return MuCurve(samples=tuple(samples))


def e1_from_mu(fm, bracket, tol=1e-8):
    """First positive root of mu(E): bisection to a small bracket, then a
    secant polish. Requires mu(lo) > 0 > mu(hi)."""
    lo, hi = bracket
    mu_lo = mu_of_e(fm, lo)[0]
    mu_hi = mu_of_e(fm, hi)[0]
    if not (mu_lo > 0.0 > mu_hi):
        raise BadBracket(f"mu({lo})={mu_lo:.3e}, mu({hi})={mu_hi:.3e}")
    for _ in range(40):
        if hi - lo < 64.0 * tol:
            break
        mid = 0.5 * (lo + hi)
        mu_mid = mu_of_e(fm, mid)[0]
        if mu_mid > 0.0:
            lo, mu_lo = mid, mu_mid
        else:
            hi, mu_hi = mid, mu_mid
    for _ in range(60):
        e_new = lo - mu_lo * (hi - lo) / (mu_hi - mu_lo)
        e_new = min(max(e_new, lo), hi)
        mu_new = mu_of_e(fm, e_new)[0]
        if mu_new > 0.0:
            lo, mu_lo = e_new, mu_new
        else:
            hi, mu_hi = e_new, mu_new
        if hi - lo < tol:
            break
    return lo - mu_lo * (hi - lo) / (mu_hi - mu_lo)


def transplant_bound(domain, e):
    """Explicit upper bound on mu(E) for conformal domains, obtained by
    transplanting the disk eigenfunction through the conformal map."""
    if domain.kind == geometry.DISK:
        coeffs = (complex(domain.r0),)
    elif domain.kind == geometry.CONFORMAL_POLY:
        coeffs = domain.conformal_coeffs
    else:
        raise ValueError("transplant bound needs a conformal-polynomial domain")
    ref = disk_e1()
    e1, j0 = ref.e1_disk, ref.j0_at_e1
    denom = 2.0 * math.pi * sum(
        n * abs(c) ** 2 * bessel_moment(n, e1)
        for n, c in enumerate(coeffs, start=1))
    num = 2.0 * math.pi * e1 * e1 * j1_squared_radial_integral(e1)
    return num / denom - e * e + e * j0 * j0 * domain.perimeter / denom


def minimize_quotient_gradient(fm, e, x0=None, max_iter=5000, tol=1e-10):
    """Slow validation path: gradient descent on the Rayleigh quotient of
    A(E) against M with an exact line search (the optimal step along the
    gradient is the smaller eigenvalue of the 2x2 pencil on span{x, g}),
    stopping on relative quotient stagnation. Returns (quotient, coeffs)."""
    a = fm.d - (e * e) * fm.m + e * fm.bd
    n = a.shape[0]
    rng = np.random.Generator(np.random.Philox(key=7))
    x = np.ones(n) + 0.01 * rng.standard_normal(n) if x0 is None else np.asarray(x0, float)
    x = x / math.sqrt(float(x @ (fm.m @ x)))
    q = float(x @ (a @ x))
    for _ in range(max_iter):
        grad = 2.0 * ((a @ x) - q * (fm.m @ x))
        gnorm = np.linalg.norm(grad)
        if gnorm < 1e-300:
            break
        g = grad / gnorm
        basis = np.stack([x, g], axis=1)
        a2 = basis.T @ (a @ basis)
        m2 = basis.T @ (fm.m @ basis)
        try:
            evals, vecs = sla.eigh(a2, m2)
        except (sla.LinAlgError, ValueError):
            break
        y = basis @ vecs[:, 0]
        norm2 = float(y @ (fm.m @ y))
        if norm2 <= 0:
            break
        y = y / math.sqrt(norm2)
        q_new = float(evals[0])
        rel_change = abs(q - q_new) / max(abs(q_new), 1e-30)
        x, q = y, q_new
        if rel_change < tol:
            break
    return q, x
