"""Growing covers of low-modulus regions on spheres."""

import numpy as np
import pytest

import glvortex as gl

R = float(np.e**4)


@pytest.fixture(scope="module")
def dipole():
    s = gl.GridSphere(R, 768, 385)
    u, centers = gl.make_dipole(s, 1.0, float(R**0.7))
    return u, centers


@pytest.fixture(scope="module")
def pipeline(dipole):
    u, _ = dipole
    return gl.bad_disc_pipeline(u, gamma=5.0, Lambda=1.0)


def test_merge_conserves_radius_sum_exactly():
    a = gl.SphericalDisc(np.array([0.0, 0.0, 1.0]), 0.125)
    c = np.array([np.sin(0.2), 0.0, np.cos(0.2)])
    b = gl.SphericalDisc(c, 0.0625)
    m = gl.merge_discs(a, b)
    assert m.geodesic_radius == a.geodesic_radius + b.geodesic_radius
    assert abs(np.linalg.norm(m.center) - 1.0) < 1e-12


def test_three_collinear_discs_merge_chain():
    # Three discs on one meridian whose pairwise gaps close one by one as
    # the family grows: radius sum is conserved through every merge.
    phis = [0.5, 0.62, 0.80]
    radii = [0.04, 0.03, 0.05]
    discs = [gl.SphericalDisc(np.array([np.sin(p), 0.0, np.cos(p)]), r)
             for p, r in zip(phis, radii)]
    fam = gl.DiscFamily(discs)
    total = sum(radii)
    merges = 0
    prev = len(fam.discs)
    for t in np.linspace(0.0, 1.5, 60):
        grown = gl.grow(fam, t)
        rsum = sum(d.geodesic_radius for d in grown.discs)
        assert abs(rsum - total * np.e**t) < 1e-12 * max(1.0, rsum)
        merges += prev - len(grown.discs)
        prev = len(grown.discs)
    assert prev == 1
    assert merges == 2


def test_grow_containment_on_boundary_samples():
    disc = gl.SphericalDisc(np.array([0.0, 1.0, 0.0]), 0.05)
    fam = gl.DiscFamily([disc])
    inner = gl.grow(fam, 0.3).discs[0]
    outer = gl.grow(fam, 0.7).discs[0]
    pts = gl.circle_points(inner, 128)
    d = [gl.geodesic_distance(p, outer.center, R=1.0) for p in pts]
    assert max(d) <= outer.geodesic_radius + 1e-12


def test_initial_cover_covers_sublevel_set(dipole):
    u, _ = dipole
    v = gl.VectorField(gl.GridSphere(1.0, u.grid.n_phi, u.grid.n_theta),
                       u.values)
    eps = 1.0 / R
    delta = gl.default_delta(5.0)
    fam = gl.initial_cover(v, eps, delta, 1.0)
    mod = np.linalg.norm(v.values, axis=-1)
    low = mod <= 1.0 - delta
    pts = v.grid.points[low]
    covered = np.zeros(len(pts), dtype=bool)
    for d in fam.discs:
        dist = np.arccos(np.clip(pts @ d.center, -1.0, 1.0))
        covered |= dist <= d.geodesic_radius + 1e-9
    assert covered.all()
    assert all(d.geodesic_radius >= 1.0 * eps - 1e-15 for d in fam.discs)


def test_select_time_is_earliest_admissible(dipole):
    u, _ = dipole
    v = gl.VectorField(gl.GridSphere(1.0, u.grid.n_phi, u.grid.n_theta),
                       u.values)
    eps = 1.0 / R
    fam = gl.initial_cover(v, eps, gl.default_delta(5.0), 1.0)
    t_star, chosen, trace = gl.select_time(v, fam, eps, 5.0)
    assert trace.times[0] < t_star <= trace.times[-1]
    idx = int(np.searchsorted(trace.times, t_star))
    bound = 2 * np.pi * 2 * 5.0 / (5.0 + 2 * np.pi) * 1.1
    assert trace.functionals[idx] <= bound
    assert np.all(np.asarray(trace.functionals[:idx]) > bound)


def test_pipeline_certificate_on_dipole(pipeline):
    fam, cert, info = pipeline
    assert cert.all_pass
    assert cert.modulus_floor > 7.0 / 8.0
    assert cert.radius_sum <= R**cert.alpha
    assert cert.degrees_zero
    assert sum(d**2 for d in fam.degrees) < 2
    assert all(d.geodesic_radius >= 1.0 for d in fam.discs)


def test_pipeline_radius_sum_conserved(pipeline):
    fam, cert, info = pipeline
    trace = info["trace"]
    sums = [sum(d.geodesic_radius for d in f.discs) for f in trace.families]
    want = [sums[0] * np.e**(t - trace.times[0]) for t in trace.times]
    assert np.allclose(sums, want, rtol=1e-12)


def test_circle_energy_bound_at_selected_time(pipeline):
    fam, cert, info = pipeline
    gamma = 5.0
    bound = 2 * np.pi * 2 * gamma / (gamma + 2 * np.pi) * 1.1
    assert cert.circle_energy <= bound


def test_pole_contact_raises():
    s = gl.GridSphere(20.0, 128, 65)
    u, _ = gl.make_single_vortex(s, 1.0, center_phi=np.pi - 0.02)
    with pytest.raises((gl.PoleContactError, gl.CoverageError)):
        gl.bad_disc_pipeline(u, gamma=5.0, Lambda=1.0)
