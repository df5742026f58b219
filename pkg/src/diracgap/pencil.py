"""Direct solver: the rectangular block pencil whose rank drops locate the
Dirac eigenvalues.

The four interior equation blocks couple the real/imaginary parts of the two
spinor components through first derivatives; the two boundary blocks encode
the infinite-mass condition u2 = i*n*u1 split into real and imaginary parts.

Eigenvalue estimates minimize the smallest singular value of the pencil in
the function-normalized (whitened) coordinates: the raw coefficient-relative
sigma_min is floored by multiquadric basis redundancy (coefficient vectors of
near-zero functions) at every E and never dips, so the residual is measured
per unit of the discrete L2 norm of the four components instead. This is the
subspace-angle normalization standard for particular-solution methods; it is
realized by a one-time column transform of (A, B) with the inverse R-factor
of the interior value block.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from . import geometry, rbf
from .errors import NoEigenvalueFound

_INVPHI = 0.5 * (math.sqrt(5.0) - 1.0)


@dataclass(frozen=True, eq=False)
class PencilSystem:
    a: np.ndarray            # raw block pencil, rows = equations
    b: np.ndarray            # E-coefficient matrix, boundary rows zero
    wa: np.ndarray           # whitened a (columns divided by the value R-factor)
    wb: np.ndarray           # whitened b: orthonormal interior value blocks
    r_val: np.ndarray        # R-factor of the weighted interior value block
    n: int
    m_int: int
    m_bnd: int


@dataclass(frozen=True)
class DiracEigenResult:
    e: float
    coeffs: np.ndarray       # unit-norm (alpha1, beta1, alpha2, beta2)
    sigma_min: float         # relative smallest singular value at e
    bc_residual: float       # sup-norm boundary-condition violation (relative)


def assemble_pencil(cm, interior_wts, boundary_wts, balance=None):
    """Stack the six scaled block rows of the overdetermined system.

    Interior rows carry sqrt(interior weight); boundary rows carry
    sqrt(boundary weight) times a balance factor (default sqrt(M_int/M_bnd))
    so neither block dominates the singular-value landscape. The whitened
    copies wa, wb carry the function-norm column transform used by the
    sigma evaluations.
    """
    m_int, n = cm.mint.shape
    m_bnd = cm.mbnd.shape[0]
    if balance is None:
        balance = math.sqrt(m_int / m_bnd)
    ri = np.sqrt(interior_wts)[:, None]
    rb = balance * np.sqrt(boundary_wts)[:, None]
    mi, m1, m2 = ri * cm.mint, ri * cm.m1int, ri * cm.m2int
    mb, b1, b2 = rb * cm.mbnd, rb * cm.m1bnd, rb * cm.m2bnd
    zi = np.zeros((m_int, n))
    zb = np.zeros((m_bnd, n))
    a = np.block([
        [zi, zi, -m2, m1],
        [zi, zi, -m1, -m2],
        [m2, m1, zi, zi],
        [-m1, m2, zi, zi],
        [b2, b1, mb, zb],
        [-b1, b2, zb, mb],
    ])
    b = np.block([
        [mi, zi, zi, zi],
        [zi, mi, zi, zi],
        [zi, zi, mi, zi],
        [zi, zi, zi, mi],
        [zb, zb, zb, zb],
        [zb, zb, zb, zb],
    ])
    r_val = sla.qr(mi, mode="r", check_finite=False)[0][:n, :]
    wa = _solve_right_blocks(a, r_val)
    wb = _solve_right_blocks(b, r_val)
    return PencilSystem(a=a, b=b, wa=wa, wb=wb, r_val=r_val,
                        n=n, m_int=m_int, m_bnd=m_bnd)


def _solve_right_blocks(mat, r_val):
    # apply R^{-1} from the right to each of the four coefficient blocks
    out = [
        sla.solve_triangular(r_val, blk.T, trans="T", lower=False,
                             check_finite=False).T
        for blk in np.split(mat, 4, axis=1)
    ]
    return np.ascontiguousarray(np.hstack(out))


def sigma_min_at(ps, e):
    """Smallest singular value of the function-normalized pencil at E,
    relative to its largest singular value (exact SVD)."""
    sv = sla.svdvals(ps.wa - e * ps.wb)
    return float(sv[-1] / sv[0])


class _SigmaWork:
    """Fast exact-quality sigma evaluator: QR of A - E*B, then power iteration
    for sigma_max and inverse iteration on the triangular factor for
    sigma_min. Returns the relative value and caches the last right singular
    vector for coefficient extraction."""

    def __init__(self, ps):
        self.ps = ps
        n = ps.n * 4
        rng = np.random.Generator(np.random.Philox(key=20240601))
        self.z0 = rng.standard_normal(n)
        self.z0 /= np.linalg.norm(self.z0)
        self.last_vector = None

    def _triangular(self, e):
        m = self.ps.wa - e * self.ps.wb
        r = sla.qr(m, mode="r", check_finite=False)[0]
        return r[: m.shape[1], :]

    def sigma_rel(self, e, iters=40, tol=1e-11):
        r = self._triangular(e)
        z = self.z0.copy()
        smax = 0.0
        for _ in range(25):
            z = r.T @ (r @ z)
            nz = np.linalg.norm(z)
            if nz == 0:
                break
            z /= nz
            new = math.sqrt(nz)
            if abs(new - smax) <= 1e-9 * new:
                smax = new
                break
            smax = new
        smax = float(np.linalg.norm(r @ z)) if smax == 0 else smax
        z = self.z0.copy()
        smin = np.inf
        try:
            with np.errstate(over="raise", divide="raise", invalid="raise"):
                for _ in range(iters):
                    w = sla.solve_triangular(r, z, trans="T", check_finite=False)
                    y = sla.solve_triangular(r, w, check_finite=False)
                    ny = np.linalg.norm(y)
                    if not np.isfinite(ny) or ny == 0:
                        raise FloatingPointError
                    z = y / ny
                    new = float(np.linalg.norm(r @ z))
                    if abs(new - smin) <= tol * max(new, 1e-300):
                        smin = new
                        break
                    smin = new
        except FloatingPointError:
            # numerically singular triangular factor: deepest possible dip
            self.last_vector = None
            return 0.0
        self.last_vector = z
        return smin / smax

    def right_vector(self, e, iters=80):
        """Coefficient-space right singular vector at e: the whitened vector
        mapped back through the value R-factor."""
        self.sigma_rel(e, iters=iters, tol=1e-14)
        if self.last_vector is None:
            # singular factor; fall back to the exact SVD for the vector
            _, _, vt = sla.svd(self.ps.wa - e * self.ps.wb, full_matrices=False)
            z = vt[-1]
        else:
            z = self.last_vector
        coeffs = np.concatenate([
            sla.solve_triangular(self.ps.r_val, blk, check_finite=False)
            for blk in np.split(z, 4)
        ])
        return coeffs / np.linalg.norm(coeffs)


def golden_minimize(f, lo, hi, tol):
    """Golden-section search for the minimizer of f on [lo, hi]."""
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    while (hi - lo) > tol:
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def refine_minimum(ps, lo, hi, scan_step, refine_tol=1e-10, work=None):
    """Scan sigma(E) on [lo, hi] and golden-refine the deepest local minimum.
    No sign restriction on E; used for the symmetric negative branch too."""
    work = work or _SigmaWork(ps)
    grid = np.arange(lo, hi + 0.5 * scan_step, scan_step)
    vals = np.array([work.sigma_rel(e) for e in grid])
    i = int(np.argmin(vals))
    i = min(max(i, 1), len(grid) - 2)
    return golden_minimize(work.sigma_rel, grid[i - 1], grid[i + 1], refine_tol)


def boundary_residual(domain, disc, coeffs, n_points=None):
    """Sup-norm violation of u2 = i*n*u1 at fresh boundary nodes, relative to
    the sup of |u| there. Fresh nodes are the odd half-offset points of an
    8x refined equispaced family, so none coincides with collocation nodes."""
    m_bnd = len(disc.boundary_pts)
    n_points = n_points or 4 * m_bnd
    pts, normals, _ = geometry.boundary_nodes(domain, 2 * n_points)
    pts, normals = pts[1::2], normals[1::2]
    phi = rbf.mq_value_matrix(disc.eps, pts, disc.centers)
    a1, b1, a2, b2 = np.split(np.asarray(coeffs), 4)
    u1 = phi @ (a1 + 1j * b1)
    u2 = phi @ (a2 + 1j * b2)
    nc = normals[:, 0] + 1j * normals[:, 1]
    scale = np.sqrt(np.abs(u1) ** 2 + np.abs(u2) ** 2).max()
    return float(np.abs(u2 - 1j * nc * u1).max() / scale)


def find_eigenvalues(ps, e_lo, e_hi, scan_step=0.02, accept_tol=1e-6,
                     refine_tol=1e-10, domain=None, disc=None):
    """Locate eigenvalues on [e_lo, e_hi]: scan the relative sigma_min,
    golden-refine each deep local minimum, verify with an exact SVD, and
    reconstruct the coefficient vector from the smallest right singular vector.

    A minimum qualifies when it is below 10x the global scan minimum and at
    least 10x deeper than the scan median (spurious-dip rejection). Raises
    NoEigenvalueFound if nothing passes accept_tol.
    """
    if not (0.0 < e_lo < e_hi):
        raise ValueError("need 0 < e_lo < e_hi")
    if scan_step > 0.02:
        raise ValueError("scan_step must be <= 0.02")
    work = _SigmaWork(ps)
    grid = np.arange(e_lo, e_hi + 0.5 * scan_step, scan_step)
    vals = np.array([work.sigma_rel(e) for e in grid])
    gmin = vals.min()
    median = float(np.median(vals))
    cut = min(10.0 * max(gmin, 1e-300), 0.1 * median)
    candidate = [i for i in range(1, len(grid) - 1)
                 if vals[i] <= vals[i - 1] and vals[i] <= vals[i + 1]
                 and vals[i] <= cut]
    # collapse plateau runs to their deepest sample
    groups = []
    for i in candidate:
        if groups and i - groups[-1][-1] <= 1:
            groups[-1].append(i)
        else:
            groups.append([i])
    results = []
    for group in groups:
        i = min(group, key=lambda j: vals[j])
        e_star = golden_minimize(work.sigma_rel, grid[i - 1], grid[i + 1], refine_tol)
        sigma = sigma_min_at(ps, e_star)
        if sigma >= accept_tol:
            continue
        coeffs = work.right_vector(e_star)
        bc = (boundary_residual(domain, disc, coeffs)
              if domain is not None and disc is not None else float("nan"))
        results.append(DiracEigenResult(e=float(e_star), coeffs=coeffs,
                                        sigma_min=sigma, bc_residual=bc))
    if not results:
        raise NoEigenvalueFound(
            f"no sigma minimum below {accept_tol} in [{e_lo}, {e_hi}]")
    return sorted(results, key=lambda r: r.e)


def reconstruct_field(res, disc, grid_pts):
    """Evaluate the eigenfunction on the given points, L2(domain)-normalized
    through the interior quadrature weights.

    Returns (points, |u1|, arg u1, |u2|, arg u2)."""
    a1, b1, a2, b2 = np.split(res.coeffs, 4)
    c1, c2 = a1 + 1j * b1, a2 + 1j * b2
    phi_int = rbf.mq_value_matrix(disc.eps, disc.interior_pts, disc.centers)
    v1, v2 = phi_int @ c1, phi_int @ c2
    norm2 = float(disc.interior_wts @ (np.abs(v1) ** 2 + np.abs(v2) ** 2))
    scale = 1.0 / math.sqrt(norm2)
    grid_pts = np.atleast_2d(np.asarray(grid_pts, dtype=float))
    phi = rbf.mq_value_matrix(disc.eps, grid_pts, disc.centers)
    u1 = scale * (phi @ c1)
    u2 = scale * (phi @ c2)
    return grid_pts, np.abs(u1), np.angle(u1), np.abs(u2), np.angle(u2)
