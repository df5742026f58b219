import json
import math

import numpy as np
import pytest

from diracgap import geometry as g
from diracgap.errors import (DomainError, GridTooCoarse, NonPositiveRadius,
                             UnivalenceViolation)


def random_domains(count, amplitude=0.25, seed=0):
    rng = np.random.Generator(np.random.Philox(key=seed))
    out = []
    while len(out) < count:
        coeffs = [(rng.uniform(-amplitude / k**2, amplitude / k**2),
                   rng.uniform(-amplitude / k**2, amplitude / k**2))
                  for k in range(1, 6)]
        try:
            out.append(g.make_radial_domain(coeffs, r0=1.0))
        except NonPositiveRadius:
            continue
    return out


class TestConstruction:
    def test_unit_disk(self):
        d = g.disk()
        assert d.area == pytest.approx(math.pi, abs=1e-14)
        assert d.perimeter == pytest.approx(2 * math.pi, abs=1e-14)
        assert d.inradius == pytest.approx(1.0, abs=1e-12)
        assert d.incenter == (0.0, 0.0)

    def test_disk_scaling(self):
        d = g.disk(2.5)
        assert d.area == pytest.approx(math.pi * 6.25, rel=1e-15)

    def test_radial_parseval_area(self):
        d = g.make_radial_domain([(0.0, 0.0), (0.1, 0.0)], r0=1.0)
        assert d.area == pytest.approx(math.pi * 1.005, rel=1e-12)
        # independent trapezoid oracle for (1/2) int r(theta)^2
        theta = np.linspace(0.0, 2 * np.pi, 8192, endpoint=False)
        r = 1.0 + 0.1 * np.cos(2 * theta)
        assert d.area == pytest.approx(0.5 * np.mean(r * r) * 2 * np.pi, rel=1e-12)

    def test_nonpositive_radius_rejected(self):
        with pytest.raises(NonPositiveRadius):
            g.make_radial_domain([(-1.1, 0.0)], r0=1.0)

    def test_conformal_identity_is_disk(self):
        d = g.make_conformal_domain([1.0])
        assert d.area == pytest.approx(math.pi, rel=1e-14)
        assert d.perimeter == pytest.approx(2 * math.pi, rel=1e-12)

    def test_conformal_area_formula(self):
        d = g.make_conformal_domain([1.0, 0.1])
        assert d.area == pytest.approx(1.02 * math.pi, rel=1e-14)

    def test_conformal_perimeter_oracle(self):
        d = g.make_conformal_domain([1.0, 0.1])
        # high-resolution trapezoid of |f'(e^{i theta})| = |1 + 0.2 e^{i theta}|
        theta = np.linspace(0.0, 2 * np.pi, 2 ** 16, endpoint=False)
        oracle = np.abs(1.0 + 0.2 * np.exp(1j * theta)).mean() * 2 * np.pi
        assert d.perimeter == pytest.approx(oracle, rel=1e-10)

    def test_univalence_rejected(self):
        with pytest.raises(UnivalenceViolation):
            g.make_conformal_domain([1.0, 0.6])


class TestInvariants:
    def test_isoperimetric_chain(self):
        for d in random_domains(25):
            assert d.perimeter ** 2 >= 4 * math.pi * d.area * (1 - 1e-9)
            assert d.inradius <= math.sqrt(d.area / math.pi) + 1e-8
            assert math.sqrt(d.area / math.pi) <= d.perimeter / (2 * math.pi) + 1e-8

    def test_disk_saturates_isoperimetric(self):
        d = g.disk(1.7)
        assert d.perimeter ** 2 == pytest.approx(4 * math.pi * d.area, rel=1e-12)

    def test_koebe_estimate(self):
        for coeffs in ([1.0], [1.0, 0.1], [1.0, 0.05, 0.02], [1.0, 0.0, 0.1]):
            d = g.make_conformal_domain(coeffs)
            assert abs(d.conformal_coeffs[0]) >= d.inradius - 1e-6


class TestInradius:
    def test_disk_values(self):
        ri, center = g.inradius(g.disk(1.5))
        assert ri == pytest.approx(1.5, abs=1e-9)
        assert center == (0.0, 0.0)

    def test_perturbed_domain_against_brute_force(self):
        d = g.make_radial_domain([(0.0, 0.0), (0.2, 0.0)], r0=1.0)
        # brute force: max over a 512x512 grid of distance to dense boundary
        xs = np.linspace(-1.3, 1.3, 512)
        grid = np.stack(np.meshgrid(xs, xs, indexing="ij"), axis=-1).reshape(-1, 2)
        inside = g.contains_many(d, grid)
        dists = g.distance_to_boundary(d, grid[inside])
        oracle = dists.max()
        ri, _ = g.inradius(d)
        cell = xs[1] - xs[0]
        assert ri >= oracle - 1e-9
        assert ri <= oracle + 2 * cell
        rmin = 0.8  # min over theta of r(theta) = 1 + 0.2 cos(2 theta)
        assert ri <= rmin + 1e-9
        assert ri >= 0.9 * rmin


class TestBoundaryNodes:
    def test_disk_positions_and_weights(self):
        d = g.disk()
        pts, normals, wts = g.boundary_nodes(d, 16)
        # every fourth node hits the axes
        np.testing.assert_allclose(pts[0], [1.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(pts[4], [0.0, 1.0], atol=1e-12)
        np.testing.assert_allclose(pts[8], [-1.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(normals, pts, atol=1e-12)
        assert abs(math.fsum(wts) - d.perimeter) < 1e-12

    def test_minimum_count_enforced(self):
        with pytest.raises(ValueError):
            g.boundary_nodes(g.disk(), 4)

    def test_weights_sum_and_outwardness(self):
        for d in random_domains(5, seed=3):
            pts, normals, wts = g.boundary_nodes(d, 48)
            assert abs(math.fsum(wts) - d.perimeter) < 1e-12
            np.testing.assert_allclose(np.linalg.norm(normals, axis=1), 1.0,
                                       atol=1e-12)
            for p, n in zip(pts, normals):
                assert not g.contains(d, p + 1e-6 * n)

    def test_equispaced_in_arclength(self):
        d = random_domains(1, seed=9)[0]
        pts, _, _ = g.boundary_nodes(d, 64)
        seg = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
        assert seg.std() / seg.mean() < 5e-3


class TestInteriorGrid:
    def test_disk_weight_budget(self):
        d = g.disk()
        pts, wts = g.interior_grid(d, 0.05)
        assert math.pi - 0.35 <= wts.sum() <= math.pi
        assert g.contains_many(d, pts).all()

    def test_zero_margin_keeps_more(self):
        d = g.disk()
        base = g.interior_grid(d, 0.05)[0]
        full = g.interior_grid(d, 0.05, margin_frac=0.0)[0]
        assert len(full) > len(base)
        assert g.contains_many(d, full).all()

    def test_too_coarse(self):
        with pytest.raises(GridTooCoarse):
            g.interior_grid(g.disk(), 0.8)


class TestContains:
    def test_disk_points(self):
        d = g.disk()
        assert g.contains(d, (0.0, 0.0))
        assert not g.contains(d, (2.0, 0.0))

    def test_conformal_image_point(self):
        d = g.make_conformal_domain([1.0, 0.1])
        w = 0.5 + 0.1 * 0.25  # f(0.5)
        assert g.contains(d, (w, 0.0))


class TestScaling:
    def test_disk_to_unit(self):
        assert g.scale_to_area(g.disk(2.0), math.pi).r0 == pytest.approx(1.0)

    def test_area_is_exact(self):
        for d in random_domains(5, seed=11):
            scaled = g.scale_to_area(d, math.pi)
            assert abs(scaled.area - math.pi) <= 1e-10 * math.pi

    def test_conformal_scaling(self):
        d = g.make_conformal_domain([1.0, 0.1])
        scaled = g.scale_to_area(d, math.pi)
        assert scaled.area == pytest.approx(math.pi, rel=1e-12)


class TestSerialization:
    def test_roundtrip_bit_exact(self):
        d = g.make_radial_domain([(0.017371852, -0.00321), (0.1, 0.05)], r0=1.03)
        blob = json.dumps(g.to_json_dict(d))
        back = g.from_json_dict(json.loads(blob))
        assert back.radial_coeffs == d.radial_coeffs
        assert back.r0 == d.r0
        assert json.dumps(g.to_json_dict(back)) == blob

    def test_conformal_roundtrip(self):
        d = g.make_conformal_domain([1.0, 0.1 + 0.02j])
        back = g.from_json_dict(g.to_json_dict(d))
        assert back.conformal_coeffs == d.conformal_coeffs

    def test_file_roundtrip(self, tmp_path):
        d = g.disk(1.25)
        path = tmp_path / "d.json"
        g.save_domain(d, path)
        assert g.load_domain(path).r0 == d.r0

    def test_unknown_kind_rejected(self):
        with pytest.raises(DomainError):
            g.from_json_dict({"kind": "triangle"})
