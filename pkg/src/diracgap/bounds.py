"""Closed-form geometric bounds on the principal eigenvalue and the
scale-invariant conjecture comparisons.

For a domain with area A, perimeter P and inradius r_i:

    lower_area   = sqrt(2*pi/A)                                (proven lower bound)
    upper_simple = P/A                                         (constant test function)
    upper_ecrit  = (P + sqrt(P^2 + 8*pi*e1*(e1-1)*(pi*r_i^2+A))) / (2*(pi*r_i^2+A))
    upper_thm12  = P*e1 / (pi*r_i^2 + A)

with e1 the unit-disk eigenvalue; the last two are sharp exactly on disks.
The Faber-Krahn reference sqrt(pi/A)*e1 is conjectural, so its check is
reported rather than asserted.
"""

import math
from dataclasses import dataclass

from .bessel import disk_e1


@dataclass(frozen=True)
class BoundsReport:
    lower_area: float
    upper_simple: float
    upper_thm12: float
    upper_ecrit: float
    fk_reference: float


@dataclass(frozen=True)
class BoundFlags:
    lower_ok: bool
    upper_simple_ok: bool
    upper_thm12_ok: bool
    upper_ecrit_ok: bool
    fk_ok: bool


def evaluate_bounds(domain):
    a, p, ri = domain.area, domain.perimeter, domain.inradius
    e1d = disk_e1().e1_disk
    denom = math.pi * ri * ri + a
    disc = p * p + 8.0 * math.pi * e1d * (e1d - 1.0) * denom
    return BoundsReport(
        lower_area=math.sqrt(2.0 * math.pi / a),
        upper_simple=p / a,
        upper_thm12=p * e1d / denom,
        upper_ecrit=(p + math.sqrt(disc)) / (2.0 * denom),
        fk_reference=math.sqrt(math.pi / a) * e1d,
    )


def check_e1_against_bounds(report, e1, tol):
    """Pass flags for a measured eigenvalue. The proven bounds are meant to be
    asserted by callers; the Faber-Krahn flag records conjecture support."""
    if e1 <= 0:
        raise ValueError("eigenvalue must be positive")
    return BoundFlags(
        lower_ok=e1 >= report.lower_area - tol,
        upper_simple_ok=e1 <= report.upper_simple + tol,
        upper_thm12_ok=e1 <= report.upper_thm12 + tol,
        upper_ecrit_ok=e1 <= report.upper_ecrit + tol,
        fk_ok=e1 >= report.fk_reference - tol,
    )


def conjecture_mu_check(domain_area, domain_curve, disk_mu, tol=5e-3):
    """Scale-invariant curve comparison: mu_domain(E) against
    (pi/A) * mu_disk(sqrt(A/pi) * E) at every sampled E.

    disk_mu is a callable E -> mu on the unit disk. Returns a list of
    (E, lhs, rhs, ok) rows; violations are reported, never raised, since the
    inequality is conjectural.
    """
    ratio = math.pi / domain_area
    stretch = math.sqrt(domain_area / math.pi)
    rows = []
    for e, mu, _ in domain_curve.samples:
        rhs = ratio * disk_mu(stretch * e)
        rows.append((e, mu, rhs, mu >= rhs - tol))
    return rows
