"""Winding numbers on loops and degrees on spherical circles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import glvortex as gl


def unit_loop(k, n, phase0=0.0):
    t = np.linspace(0.0, 2 * np.pi, n + 1)
    z = np.exp(1j * (k * t + phase0))
    return np.stack([z.real, z.imag], axis=-1)


@pytest.mark.parametrize("k", [-3, -1, 0, 1, 2, 5])
def test_winding_number_of_pure_phase_loop(k):
    loop = gl.Loop(unit_loop(k, 256))
    assert gl.winding_number(loop) == k


def test_phase_increments_sum_to_winding():
    loop = unit_loop(2, 128, phase0=0.4)
    inc = gl.phase_increments(loop)
    assert abs(inc.sum() - 4 * np.pi) < 1e-10


def test_under_resolved_loop_raises():
    # Two samples per turn put the phase jump at exactly pi.
    with pytest.raises(gl.UnderResolvedLoopError):
        gl.winding_number(gl.Loop(unit_loop(8, 16)))


def test_degree_undefined_on_vanishing_loop():
    samples = unit_loop(1, 64)
    samples[5] = 0.0
    with pytest.raises(gl.DegreeUndefinedError):
        gl.winding_number(gl.Loop(samples))


def test_degree_on_sphere_dipole_circles():
    s = gl.GridSphere(np.e**4, 512, 257)
    sep = float(s.radius**0.7)
    u, centers = gl.make_dipole(s, 1.0, sep)
    for c, want in zip(centers, (1, -1)):
        disc = gl.SphericalDisc(c, sep / 3)
        assert gl.degree_on_sphere(u, disc) == want
    both = gl.SphericalDisc(centers.mean(axis=0) /
                            np.linalg.norm(centers.mean(axis=0)) * s.radius,
                            2 * sep)
    assert gl.degree_on_sphere(u, both) == 0


@settings(max_examples=20, deadline=None)
@given(st.integers(-4, 4), st.floats(0.0, 2 * np.pi))
def test_winding_invariant_under_phase_shift(k, phase0):
    a = gl.winding_number(gl.Loop(unit_loop(k, 200)))
    b = gl.winding_number(gl.Loop(unit_loop(k, 200, phase0=phase0)))
    assert a == b == k
