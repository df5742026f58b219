"""Smooth simply connected planar domains and their geometric measurements.

Two parametric families plus the unit disk:

* radial-Fourier: r(theta) = r0 + sum_k (a_k cos(k theta) + b_k sin(k theta)),
  star-shaped by the positivity check, hence simply connected;
* conformal-polynomial: the image of the unit disk under f(z) = sum c_n z^n,
  accepted only under the certifiable univalence condition
  |c1| > sum_{n>=2} n |c_n|.

Boundary quadrature is periodic trapezoid throughout (spectrally accurate for
smooth closed curves); the interior uses a uniform Cartesian grid kept a half
spacing away from the boundary.
"""

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError, GridTooCoarse, NonPositiveRadius, UnivalenceViolation

DISK = "disk"
RADIAL_FOURIER = "radial_fourier"
CONFORMAL_POLY = "conformal_poly"

_POSITIVITY_SAMPLES = 4096
_DENSE_SAMPLES = 8192
_POLYGON_SAMPLES = 4096


@dataclass(frozen=True)
class DomainSpec:
    """Immutable domain description with cached geometric scalars."""

    kind: str
    r0: float = 1.0
    radial_coeffs: tuple = ()
    conformal_coeffs: tuple = ()
    area: float = 0.0
    perimeter: float = 0.0
    inradius: float = 0.0
    incenter: tuple = (0.0, 0.0)


def _radial_r(d, theta):
    r = np.full_like(theta, d.r0, dtype=float)
    for k, (a, b) in enumerate(d.radial_coeffs, start=1):
        r += a * np.cos(k * theta) + b * np.sin(k * theta)
    return r


def _radial_dr(d, theta):
    dr = np.zeros_like(theta, dtype=float)
    for k, (a, b) in enumerate(d.radial_coeffs, start=1):
        dr += k * (-a * np.sin(k * theta) + b * np.cos(k * theta))
    return dr


def _conformal_f(d, z):
    # f(z) = sum_{n>=1} c_n z^n, Horner in z
    acc = np.zeros_like(z)
    for c in reversed(d.conformal_coeffs):
        acc = (acc + c) * z
    return acc


def _conformal_df(d, z):
    acc = np.zeros_like(z)
    for n in range(len(d.conformal_coeffs), 0, -1):
        acc = acc * z + n * d.conformal_coeffs[n - 1]
    return acc


def boundary_point(d, theta):
    """Boundary point gamma(theta), theta in [0, 2pi), as an (n, 2) array."""
    theta = np.asarray(theta, dtype=float)
    if d.kind == CONFORMAL_POLY:
        w = _conformal_f(d, np.exp(1j * theta))
        return np.stack([w.real, w.imag], axis=-1)
    r = d.r0 if d.kind == DISK else _radial_r(d, theta)
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)


def boundary_tangent(d, theta):
    """Unnormalized tangent dgamma/dtheta; |tangent| is the arclength speed."""
    theta = np.asarray(theta, dtype=float)
    if d.kind == CONFORMAL_POLY:
        z = np.exp(1j * theta)
        t = 1j * z * _conformal_df(d, z)
        return np.stack([t.real, t.imag], axis=-1)
    if d.kind == DISK:
        return np.stack([-d.r0 * np.sin(theta), d.r0 * np.cos(theta)], axis=-1)
    r = _radial_r(d, theta)
    dr = _radial_dr(d, theta)
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([dr * c - r * s, dr * s + r * c], axis=-1)


@lru_cache(maxsize=32)
def _dense_boundary(d):
    theta = np.linspace(0.0, 2.0 * np.pi, _DENSE_SAMPLES, endpoint=False)
    pts = boundary_point(d, theta)
    speed = np.linalg.norm(boundary_tangent(d, theta), axis=1)
    dtheta = 2.0 * np.pi / _DENSE_SAMPLES
    # cumulative arclength at the sample points, s[0] = 0
    mids = 0.5 * (speed + np.roll(speed, -1)) * dtheta
    s = np.concatenate([[0.0], np.cumsum(mids)])
    return theta, pts, speed, s


def _measure_area(kind, r0, radial, conformal):
    if kind == DISK:
        return math.pi * r0 * r0
    if kind == CONFORMAL_POLY:
        return math.pi * sum(n * abs(c) ** 2 for n, c in enumerate(conformal, start=1))
    theta = np.linspace(0.0, 2.0 * np.pi, _POSITIVITY_SAMPLES, endpoint=False)
    probe = DomainSpec(kind=kind, r0=r0, radial_coeffs=radial)
    r = _radial_r(probe, theta)
    return 0.5 * float(np.mean(r * r)) * 2.0 * np.pi


def _measure_perimeter(kind, r0, radial, conformal):
    if kind == DISK:
        return 2.0 * math.pi * r0
    probe = DomainSpec(kind=kind, r0=r0, radial_coeffs=radial, conformal_coeffs=conformal)
    theta = np.linspace(0.0, 2.0 * np.pi, _DENSE_SAMPLES, endpoint=False)
    speed = np.linalg.norm(boundary_tangent(probe, theta), axis=1)
    return float(np.mean(speed)) * 2.0 * np.pi


def distance_to_boundary(d, pts):
    """Distance from point(s) to the sampled boundary polyline (segments)."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    _, bpts, _, _ = _dense_boundary(d)
    seg_a = bpts
    seg_v = np.roll(bpts, -1, axis=0) - bpts
    seg_len2 = np.einsum("ij,ij->i", seg_v, seg_v)
    out = np.empty(len(pts))
    # chunk to bound the (chunk x segments) temporary
    step = max(1, int(2e6 / len(seg_a)))
    for i0 in range(0, len(pts), step):
        chunk = pts[i0 : i0 + step]
        diff = chunk[:, None, :] - seg_a[None, :, :]
        t = np.einsum("psj,sj->ps", diff, seg_v) / seg_len2
        np.clip(t, 0.0, 1.0, out=t)
        proj = diff - t[:, :, None] * seg_v[None, :, :]
        out[i0 : i0 + step] = np.sqrt(np.einsum("psj,psj->ps", proj, proj).min(axis=1))
    return out if len(out) > 1 else float(out[0])


def contains(d, x):
    """True when the point lies strictly inside the domain."""
    return bool(contains_many(d, np.asarray(x, dtype=float)[None, :])[0])


def contains_many(d, pts):
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if d.kind == DISK:
        return np.hypot(pts[:, 0], pts[:, 1]) < d.r0
    if d.kind == RADIAL_FOURIER:
        theta = np.arctan2(pts[:, 1], pts[:, 0])
        return np.hypot(pts[:, 0], pts[:, 1]) < _radial_r(d, theta)
    # conformal: even-odd ray crossing against the sampled boundary polygon
    theta = np.linspace(0.0, 2.0 * np.pi, _POLYGON_SAMPLES, endpoint=False)
    poly = boundary_point(d, theta)
    x1, y1 = poly[:, 0], poly[:, 1]
    x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
    px = pts[:, 0][:, None]
    py = pts[:, 1][:, None]
    straddle = (y1[None, :] > py) != (y2[None, :] > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xcross = x1[None, :] + (py - y1[None, :]) * (x2 - x1)[None, :] / (y2 - y1)[None, :]
    hits = straddle & (px < xcross)
    return (hits.sum(axis=1) % 2) == 1


def _bounding_box(d):
    _, bpts, _, _ = _dense_boundary(d)
    return bpts[:, 0].min(), bpts[:, 0].max(), bpts[:, 1].min(), bpts[:, 1].max()


def _compute_inradius(kind, r0, radial, conformal):
    if kind == DISK:
        return r0, (0.0, 0.0)
    probe = DomainSpec(kind=kind, r0=r0, radial_coeffs=radial, conformal_coeffs=conformal)
    xmin, xmax, ymin, ymax = _bounding_box(probe)
    gx = np.linspace(xmin, xmax, 48)
    gy = np.linspace(ymin, ymax, 48)
    grid = np.stack(np.meshgrid(gx, gy, indexing="ij"), axis=-1).reshape(-1, 2)
    inside = contains_many(probe, grid)
    cand = grid[inside]
    dists = distance_to_boundary(probe, cand)
    x0 = cand[int(np.argmax(dists))]

    def neg_depth(x):
        # continuous across the boundary: -dist inside, +dist outside
        dist = distance_to_boundary(probe, x[None, :])
        return -dist if contains(probe, x) else dist

    res = minimize(neg_depth, x0, method="Nelder-Mead",
                   options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 400})
    return float(-res.fun), (float(res.x[0]), float(res.x[1]))


def _finalize(kind, r0=1.0, radial=(), conformal=()):
    area = _measure_area(kind, r0, radial, conformal)
    perim = _measure_perimeter(kind, r0, radial, conformal)
    if area <= 0 or perim <= 0:
        raise DomainError(f"degenerate domain: area={area}, perimeter={perim}")
    if perim * perim < 4.0 * math.pi * area * (1.0 - 1e-9):
        raise DomainError("isoperimetric sanity check failed")
    ri, center = _compute_inradius(kind, r0, radial, conformal)
    if not 0.0 < ri <= math.sqrt(area / math.pi) + 1e-8:
        raise DomainError(f"inradius {ri} incompatible with area {area}")
    return DomainSpec(kind=kind, r0=r0, radial_coeffs=radial, conformal_coeffs=conformal,
                      area=area, perimeter=perim, inradius=ri, incenter=center)


def disk(radius=1.0):
    """Disk of the given radius centered at the origin."""
    if radius <= 0:
        raise DomainError("disk radius must be positive")
    return _finalize(DISK, r0=float(radius))


def make_radial_domain(coeffs, r0=1.0):
    """Radial-Fourier domain from (a_k, b_k) pairs; rejects r(theta) <= 0."""
    radial = tuple((float(a), float(b)) for a, b in coeffs)
    probe = DomainSpec(kind=RADIAL_FOURIER, r0=float(r0), radial_coeffs=radial)
    theta = np.linspace(0.0, 2.0 * np.pi, _POSITIVITY_SAMPLES, endpoint=False)
    rmin = _radial_r(probe, theta).min()
    if rmin <= 0.0:
        raise NonPositiveRadius(f"min r(theta) = {rmin:.6g} <= 0")
    return _finalize(RADIAL_FOURIER, r0=float(r0), radial=radial)


def make_conformal_domain(c):
    """Domain f(D) for f(z) = sum c_n z^n; rejects non-certified maps.

    The area is computed both from the coefficient formula pi*sum(n|c_n|^2)
    and by quadrature of the Jacobian |f'|^2 over the disk; construction fails
    if the two disagree beyond 1e-8 relative.
    """
    conformal = tuple(complex(v) for v in c)
    if not conformal:
        raise UnivalenceViolation("empty coefficient list")
    margin = abs(conformal[0]) - sum(n * abs(cn) for n, cn in enumerate(conformal[1:], start=2))
    if margin <= 0.0:
        raise UnivalenceViolation(f"|c1| - sum(n|c_n|) = {margin:.6g} <= 0")
    spec = _finalize(CONFORMAL_POLY, conformal=conformal)
    quad_area = _jacobian_area(spec)
    if abs(quad_area - spec.area) > 1e-8 * abs(spec.area):
        raise DomainError(
            f"area formula {spec.area!r} vs Jacobian quadrature {quad_area!r} disagree")
    return spec


def _jacobian_area(d):
    nodes, wts = np.polynomial.legendre.leggauss(64)
    r = 0.5 * (nodes + 1.0)
    wr = 0.5 * wts
    theta = np.linspace(0.0, 2.0 * np.pi, 512, endpoint=False)
    z = r[:, None] * np.exp(1j * theta)[None, :]
    jac = np.abs(_conformal_df(d, z)) ** 2
    return float((wr * r) @ jac.mean(axis=1)) * 2.0 * np.pi


def area(d):
    return d.area


def perimeter(d):
    return d.perimeter


def inradius(d):
    return d.inradius, d.incenter


def boundary_nodes(d, m):
    """m boundary nodes equispaced in arclength.

    Returns (points (m,2), outward unit normals (m,2), weights (m,)); the
    weights are the periodic-trapezoid values |boundary|/m.
    """
    if m < 16:
        raise ValueError("need at least 16 boundary nodes")
    if d.kind == DISK:
        theta = 2.0 * np.pi * np.arange(m) / m
    else:
        theta_dense, _, speed, s = _dense_boundary(d)
        total = s[-1]
        targets = total * np.arange(m) / m
        grid = np.concatenate([theta_dense, [2.0 * np.pi]])
        theta = np.interp(targets, s, grid)
        # one Newton step against the linearly interpolated arclength
        sp = np.interp(theta, theta_dense, speed, period=2.0 * np.pi)
        stheta = np.interp(theta, grid, s)
        theta = theta - (stheta - targets) / sp
    pts = boundary_point(d, theta)
    tang = boundary_tangent(d, theta)
    tang /= np.linalg.norm(tang, axis=1)[:, None]
    normals = np.stack([tang[:, 1], -tang[:, 0]], axis=-1)
    if contains(d, pts[0] + 1e-6 * normals[0]):
        raise DomainError("boundary orientation produced inward normals")
    weights = np.full(m, d.perimeter / m)
    return pts, normals, weights


def interior_grid(d, h, margin_frac=0.5):
    """Cell-centered Cartesian points inside the domain, margin_frac*h off the
    boundary; each carries weight h^2. Raises GridTooCoarse below 50 points.

    The default half-spacing margin is the conservative choice for generic
    sampling; the solvers pass margin_frac=0 because excluding a boundary
    strip measurably biases both the collocation eigenvalue and the form
    quadrature (the strip carries no equations/weight)."""
    if h <= 0:
        raise ValueError("grid spacing must be positive")
    xmin, xmax, ymin, ymax = _bounding_box(d)
    xs = np.arange(xmin + 0.5 * h, xmax, h)
    ys = np.arange(ymin + 0.5 * h, ymax, h)
    pts = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)
    inside = contains_many(d, pts)
    pts = pts[inside]
    if len(pts) and margin_frac > 0:
        pts = pts[distance_to_boundary(d, pts) > margin_frac * h]
    if len(pts) < 50:
        raise GridTooCoarse(f"{len(pts)} interior points at h={h}")
    return pts, np.full(len(pts), h * h)


def interior_quadrature(d, h, subdiv=8):
    """Boundary-clipped cell quadrature: every grid cell overlapping the
    domain contributes weight h^2 times its inside fraction (resolved on a
    subdiv x subdiv subgrid near the boundary), evaluated at the cell center.

    Unlike interior_grid this is a genuine O(h^2) quadrature up to the
    boundary; centers of partially covered cells may fall slightly outside
    the domain, which is harmless for entire integrands."""
    if h <= 0:
        raise ValueError("grid spacing must be positive")
    xmin, xmax, ymin, ymax = _bounding_box(d)
    xs = np.arange(xmin - 0.5 * h, xmax + h, h)
    ys = np.arange(ymin - 0.5 * h, ymax + h, h)
    pts = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)
    dist = distance_to_boundary(d, pts)
    inside = contains_many(d, pts)
    core = inside & (dist > 0.75 * h)
    near = dist <= 0.75 * h
    wts = np.zeros(len(pts))
    wts[core] = h * h
    if near.any():
        offs = (np.arange(subdiv) + 0.5) / subdiv - 0.5
        sub = np.stack(np.meshgrid(offs, offs, indexing="ij"), axis=-1).reshape(-1, 2)
        near_idx = np.nonzero(near)[0]
        sub_pts = (pts[near_idx][:, None, :] + h * sub[None, :, :]).reshape(-1, 2)
        frac = contains_many(d, sub_pts).reshape(len(near_idx), -1).mean(axis=1)
        wts[near_idx] = h * h * frac
    keep = wts > 0
    return pts[keep], wts[keep]


def scale_to_area(d, target):
    """Rescale all coefficients so the area becomes the target value."""
    if target <= 0:
        raise ValueError("target area must be positive")
    s = math.sqrt(target / d.area)
    if d.kind == DISK:
        return disk(d.r0 * s)
    if d.kind == RADIAL_FOURIER:
        coeffs = tuple((a * s, b * s) for a, b in d.radial_coeffs)
        return make_radial_domain(coeffs, r0=d.r0 * s)
    return make_conformal_domain(tuple(c * s for c in d.conformal_coeffs))


def to_json_dict(d):
    return {
        "kind": d.kind,
        "r0": d.r0,
        "radial_coeffs": [[a, b] for a, b in d.radial_coeffs],
        "conformal_coeffs": [[c.real, c.imag] for c in d.conformal_coeffs],
    }


def from_json_dict(obj):
    kind = obj.get("kind")
    if kind == DISK:
        return disk(obj.get("r0", 1.0))
    if kind == RADIAL_FOURIER:
        return make_radial_domain(obj.get("radial_coeffs", []), r0=obj.get("r0", 1.0))
    if kind == CONFORMAL_POLY:
        return make_conformal_domain([complex(re, im) for re, im in obj["conformal_coeffs"]])
    raise DomainError(f"unknown domain kind: {kind!r}")


def save_domain(d, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json_dict(d), fh, indent=2)
        fh.write("\n")


def load_domain(path):
    with open(path, encoding="utf-8") as fh:
        return from_json_dict(json.load(fh))
