"""Energy functionals, shell traces and integral identities on balls."""

import numpy as np
import pytest

import glvortex as gl


def constant_field(grid):
    vals = np.zeros(grid.shape + (2,))
    vals[..., 0] = 1.0
    return gl.VectorField(grid, vals)


def test_constant_unimodular_field_has_zero_energy():
    b = gl.GridBall3D(1.0, 0.1)
    e = gl.gl_energy(constant_field(b), eps=0.5)
    assert e.total == 0.0
    assert e.dirichlet == 0.0 and e.potential == 0.0


def test_zero_field_pure_potential():
    b = gl.GridBall3D(1.0, 0.1)
    u = gl.VectorField(b, np.zeros(b.shape + (2,)))
    eps = 0.5
    e = gl.gl_energy(u, eps=eps)
    vol = gl.integrate(np.ones(b.shape), b)
    assert e.dirichlet == 0.0
    assert abs(e.potential - vol / (4 * eps**2)) < 1e-12 * vol / eps**2


def test_linear_field_dirichlet_energy():
    # u = (x, 0): |grad u|^2 = 1, so the Dirichlet part is |B_R| / 2.
    b = gl.GridBall3D(1.0, 0.05)
    vals = np.stack([b.x, np.zeros_like(b.x)], axis=-1)
    e = gl.gl_energy(gl.VectorField(b, vals), eps=1.0)
    vol = gl.integrate(np.ones(b.shape), b)
    assert abs(e.dirichlet - vol / 2) < 0.02 * vol


def test_weighted_energy_reduces_to_plain_for_unit_weight():
    g2 = gl.GridDisc2D(1.0, 0.05)
    vals = np.stack([g2.x * g2.y, g2.x], axis=-1)
    u = gl.VectorField(g2, vals)
    plain = gl.gl_energy(u, eps=0.7).total
    weighted = gl.weighted_energy(u, 0.7, np.ones(g2.shape))
    assert abs(weighted - plain) < 1e-10 * max(1.0, plain)


def test_tangential_energy_of_rotation_field():
    # u = (y1 + i y2)/R on the sphere of radius R has |grad_T u|^2 = 2/R^2
    # where the field is unimodular scaled by sin(phi); analytic total is
    # integral of (1 + cos^2 phi)/R^2 over the sphere = (4pi + 4pi/3).
    R = 2.0
    s = gl.GridSphere(R, 256, 129)
    vals = np.empty(s.shape + (2,))
    vals[..., 0] = s.points[..., 0] / R
    vals[..., 1] = s.points[..., 1] / R
    u = gl.VectorField(s, vals)
    e = gl.tangential_energy(u, eps=1.0)
    exact_dirichlet = 0.5 * (4 * np.pi + 4 * np.pi / 3)
    assert abs(e.dirichlet - exact_dirichlet) < 0.01 * exact_dirichlet


def test_shell_trace_linear_growth_for_vortex_line():
    # For u = (x + iy)/|x + iy| on a ball, E(B_r) = pi * r * ln(r/core) + O(r),
    # so dE/dr and E^T both grow and E(r)/r is nondecreasing.
    b = gl.GridBall3D(8.0, 0.125)
    w = b.x + 1j * b.y
    m = np.abs(w)
    m[m == 0] = 1.0
    vals = np.stack([(w / m).real, (w / m).imag], axis=-1)
    u = gl.VectorField(b, vals)
    trace = gl.shell_trace(u, 1.0, np.linspace(1.0, 7.0, 25))
    violations = gl.monotonicity_check(trace, N=3, slack=1e-3)
    assert violations == []
    assert np.all(np.diff(trace.E) > 0)


def test_harmonic_identity_equality_for_coordinate_function():
    h = 1 / 32
    b = gl.GridBall3D(1.0, h)
    report = gl.harmonic_identities(b.x, b, r=0.75)
    assert abs(report.lhs - report.rhs) <= 0.02 * abs(report.rhs)


def test_harmonic_identity_inequality_random_polynomials():
    rng = np.random.default_rng(11)
    b = gl.GridBall3D(1.0, 1 / 24)
    for _ in range(5):
        w, _ = gl.random_harmonic_polynomial(rng, max_degree=4)
        vals = w(np.stack([b.x, b.y, b.z], axis=-1))
        report = gl.harmonic_identities(vals, b, r=0.75)
        assert report.lhs <= report.rhs * (1 + 0.05)


def test_pohozaev_defect_shrinks_with_resolution():
    defects = []
    for h in (1 / 16, 1 / 32):
        b = gl.GridBall3D(1.0, h)
        w = b.x * b.y
        defects.append(abs(gl.harmonic_identities(w, b, r=0.75).pohozaev_defect))
    assert defects[1] < defects[0]


def test_gl_residual_zero_for_constant_minimizer():
    b = gl.GridBall3D(1.0, 0.125)
    res = gl.gl_residual(constant_field(b), eps=0.5)
    assert np.max(np.abs(res[b.interior_mask])) < 1e-12
