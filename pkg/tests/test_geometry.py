"""Grids, quadrature, interpolation and field serialization."""

import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import glvortex as gl


def test_ball_quadrature_volume():
    b = gl.GridBall3D(1.0, 0.1)
    vol = gl.integrate(np.ones(b.shape), b)
    assert abs(vol - 4 * np.pi / 3) < 0.01 * 4 * np.pi / 3


def test_sphere_quadrature_area():
    s = gl.GridSphere(2.0, 96, 49)
    assert abs(s.weights.sum() - 16 * np.pi) < 1e-2


def test_cylinder_quadrature_volume():
    base = gl.GridDisc2D(1.0, 0.05)
    cyl = gl.GridCylinder(base, 2.0, 0.125)
    vol = gl.integrate(np.ones(cyl.shape), cyl)
    assert abs(vol - 2 * np.pi) < 0.02 * 2 * np.pi


def test_gradient_exact_on_affine():
    b = gl.GridBall3D(1.0, 0.2)
    vals = np.stack([2.0 * b.x - b.y, 0.5 * b.z + 1.0], axis=-1)
    g = gl.gradient(gl.VectorField(b, vals))
    inner = b.interior_mask
    assert np.allclose(g[..., 0, 0][inner], 2.0)
    assert np.allclose(g[..., 0, 1][inner], -1.0)
    assert np.allclose(g[..., 0, 2][inner], 0.0)
    assert np.allclose(g[..., 1, 2][inner], 0.5)


def test_trilinear_reproduces_affine():
    b = gl.GridBall3D(1.0, 0.25)
    vals = 1.0 + b.x - 2 * b.y + 3 * b.z
    rng = np.random.default_rng(3)
    pts = rng.uniform(-0.5, 0.5, size=(40, 3))
    got = gl.trilinear(vals, b.coords1d, pts)
    want = 1.0 + pts[:, 0] - 2 * pts[:, 1] + 3 * pts[:, 2]
    assert np.allclose(got, want, atol=1e-12)


def test_sphere_interp_matches_nodes():
    s = gl.GridSphere(1.0, 48, 25)
    grid_vals = np.cos(s.phi)[:, None] * np.sin(s.theta)[None, :]
    pphi, ttheta = np.meshgrid(s.phi, s.theta, indexing="ij")
    got = gl.sphere_interp(grid_vals, s, pphi.ravel(), ttheta.ravel())
    assert np.allclose(got, grid_vals.ravel(), atol=1e-12)


def test_geodesic_distance_antipodal():
    a = np.array([0.0, 0.0, 3.0])
    b = np.array([0.0, 0.0, -3.0])
    assert abs(gl.geodesic_distance(a, b, R=3.0) - 3.0 * np.pi) < 1e-12


def test_circle_points_on_disc_boundary():
    disc = gl.SphericalDisc(np.array([0.0, 1.0, 0.0]), 0.4)
    pts = gl.circle_points(disc, 64)
    assert np.allclose(np.linalg.norm(pts, axis=-1), 1.0, atol=1e-12)
    d = [gl.geodesic_distance(p, disc.center, R=1.0) for p in pts]
    assert np.allclose(d, 0.4, atol=1e-10)


def test_restrict_to_sphere_radial_field():
    b = gl.GridBall3D(4.0, 0.25)
    r = np.sqrt(b.x**2 + b.y**2 + b.z**2)
    vals = np.stack([r, np.zeros_like(r)], axis=-1)
    u = gl.VectorField(b, vals)
    s = gl.restrict_to_sphere(u, 2.0)
    assert np.allclose(s.values[..., 0], 2.0, atol=0.05)


def test_field_save_load_roundtrip(tmp_path):
    b = gl.GridBall3D(1.0, 0.25)
    rng = np.random.default_rng(0)
    vals = rng.standard_normal(b.shape + (2,))
    u = gl.VectorField(b, vals)
    path = tmp_path / "u.glf"
    gl.save_field(path, u)
    v = gl.load_field(path)
    assert np.array_equal(v.values, vals)
    assert v.grid.shape == b.shape
    assert v.grid.radius == b.radius


def test_field_to_csv_header_and_rows():
    b = gl.GridBall3D(0.5, 0.25)
    u = gl.VectorField(b, np.zeros(b.shape + (2,)))
    text = gl.field_to_csv(u)
    lines = text.strip().splitlines()
    assert lines[0].split(",")[:3] == ["x1", "x2", "x3"]
    assert len(lines) > 1


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 1.5), st.floats(0.0, 2 * np.pi), st.floats(0.2, 2.9))
def test_geodesic_distance_symmetric_and_bounded(phi, theta, R):
    a = R * np.array([np.sin(phi) * np.cos(theta),
                      np.sin(phi) * np.sin(theta), np.cos(phi)])
    b = np.array([0.0, 0.0, R])
    d1 = gl.geodesic_distance(a, b, R=R)
    d2 = gl.geodesic_distance(b, a, R=R)
    assert abs(d1 - d2) < 1e-10
    assert -1e-12 <= d1 <= np.pi * R + 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_trilinear_bounded_by_data_range(seed):
    rng = np.random.default_rng(seed)
    b = gl.GridBall3D(1.0, 0.5)
    vals = rng.uniform(-1.0, 1.0, size=b.shape)
    pts = rng.uniform(-0.9, 0.9, size=(20, 3))
    got = gl.trilinear(vals, b.coords1d, pts)
    assert np.all(got <= vals.max() + 1e-12)
    assert np.all(got >= vals.min() - 1e-12)
