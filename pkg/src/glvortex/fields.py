"""Constructed sphere fields with known vortex content, used as test data.

The dipole is built from the stereographic coordinate zeta = tan(phi/2) e^{i
theta}: the phase arg((zeta - zeta_1)/(zeta - zeta_2)) winds +1 around the
first marked point and -1 around the second, and is smooth elsewhere
(including the poles).  The modulus dips to zero at the marked points over a
core of size eps, mimicking the radial vortex profile.
"""

from __future__ import annotations

import numpy as np

from .geometry import GridSphere, VectorField


def _zeta(phi, theta):
    return np.tan(phi / 2) * np.exp(1j * theta)


def _sphere_point(R, phi, theta):
    return R * np.array([np.sin(phi) * np.cos(theta),
                         np.sin(phi) * np.sin(theta),
                         np.cos(phi)])


def make_dipole(grid: GridSphere, eps: float, separation: float,
                center_phi: float = np.pi / 2) -> tuple[VectorField, np.ndarray]:
    """Vortex/antivortex pair on the sphere, geodesic separation `separation`,
    core size eps, both placed on the equator-parallel at colatitude
    center_phi.  Returns the field and the two Cartesian vortex positions
    (shape (2, 3))."""
    R = grid.radius
    half = separation / (2 * R * np.sin(center_phi))
    th1, th2 = np.pi - half, np.pi + half
    z1 = _zeta(center_phi, th1)
    z2 = _zeta(center_phi, th2)
    ph = grid.phi[:, None] * np.ones((1, grid.n_theta))
    th = grid.theta[None, :] * np.ones((grid.n_phi, 1))
    z = _zeta(ph, th)
    phase = np.angle(z - z1) - np.angle(z - z2)
    pts = grid.points
    p1 = _sphere_point(R, center_phi, th1)
    p2 = _sphere_point(R, center_phi, th2)
    d1 = R * np.arccos(np.clip(pts @ p1 / R**2, -1, 1))
    d2 = R * np.arccos(np.clip(pts @ p2 / R**2, -1, 1))
    mod = (d1 / np.hypot(d1, eps)) * (d2 / np.hypot(d2, eps))
    vals = np.stack([mod * np.cos(phase), mod * np.sin(phase)], axis=-1)
    return VectorField(grid, vals), np.stack([p1, p2])


def make_single_vortex(grid: GridSphere, eps: float,
                       center_phi: float = np.pi / 2,
                       center_theta: float = np.pi) -> tuple[VectorField, np.ndarray]:
    """Single +1 vortex (no partner): total sphere degree bookkeeping fails on
    purpose; useful as a constructed-failure input."""
    R = grid.radius
    z1 = _zeta(center_phi, center_theta)
    ph = grid.phi[:, None] * np.ones((1, grid.n_theta))
    th = grid.theta[None, :] * np.ones((grid.n_phi, 1))
    z = _zeta(ph, th)
    phase = np.angle(z - z1)
    p1 = _sphere_point(R, center_phi, center_theta)
    pts = grid.points
    d1 = R * np.arccos(np.clip(pts @ p1 / R**2, -1, 1))
    mod = d1 / np.hypot(d1, eps)
    vals = np.stack([mod * np.cos(phase), mod * np.sin(phase)], axis=-1)
    return VectorField(grid, vals), p1


def make_degree_zero(grid: GridSphere, amplitude: float = 0.5) -> VectorField:
    """Smooth unimodular degree-0 data: a phase bump, no zeros anywhere."""
    pts = grid.points / grid.radius
    phase = amplitude * np.sin(np.pi * pts[..., 0]) * pts[..., 2]
    return VectorField(grid, np.stack([np.cos(phase), np.sin(phase)], axis=-1))


# ---------------------------------------------------------------------------
# boundary data for the unit-ball solver experiments
# ---------------------------------------------------------------------------

def boundary_constant(pts: np.ndarray) -> np.ndarray:
    out = np.zeros(pts.shape[:-1] + (2,))
    out[..., 0] = 1.0
    return out


def boundary_degree_zero(pts: np.ndarray) -> np.ndarray:
    """Unimodular data with a phase bump and no winding on any equator."""
    a = 1.2 * np.sin(np.pi * pts[..., 0]) * pts[..., 2]
    return np.stack([np.cos(a), np.sin(a)], axis=-1)


def boundary_vortex_line(pts: np.ndarray) -> np.ndarray:
    """x + iy normalized: the trace of a straight vortex line along the axis."""
    r = np.maximum(np.hypot(pts[..., 0], pts[..., 1]), 1e-12)
    return np.stack([pts[..., 0] / r, pts[..., 1] / r], axis=-1)


# ---------------------------------------------------------------------------
# harmonic polynomial samples
# ---------------------------------------------------------------------------

def _harmonic_basis():
    """Hand-coded real harmonic polynomials through degree 4."""
    return [
        lambda x, y, z: x,
        lambda x, y, z: y,
        lambda x, y, z: z,
        lambda x, y, z: x * y,
        lambda x, y, z: y * z,
        lambda x, y, z: x * z,
        lambda x, y, z: x**2 - y**2,
        lambda x, y, z: 2 * z**2 - x**2 - y**2,
        lambda x, y, z: x**3 - 3 * x * y**2,
        lambda x, y, z: 3 * x**2 * y - y**3,
        lambda x, y, z: (x**2 - y**2) * z,
        lambda x, y, z: 2 * x * y * z,
        lambda x, y, z: x * (4 * z**2 - x**2 - y**2),
        lambda x, y, z: y * (4 * z**2 - x**2 - y**2),
        lambda x, y, z: z * (2 * z**2 - 3 * x**2 - 3 * y**2),
        lambda x, y, z: x**4 - 6 * x**2 * y**2 + y**4,
        lambda x, y, z: 4 * x**3 * y - 4 * x * y**3,
        lambda x, y, z: (x**3 - 3 * x * y**2) * z,
        lambda x, y, z: (3 * x**2 * y - y**3) * z,
        lambda x, y, z: (x**2 - y**2) * (6 * z**2 - x**2 - y**2),
        lambda x, y, z: 2 * x * y * (6 * z**2 - x**2 - y**2),
        lambda x, y, z: x * z * (4 * z**2 - 3 * x**2 - 3 * y**2),
        lambda x, y, z: y * z * (4 * z**2 - 3 * x**2 - 3 * y**2),
        lambda x, y, z: 8 * z**4 - 24 * z**2 * (x**2 + y**2)
        + 3 * (x**2 + y**2) ** 2,
    ]


_BASIS_DEGREES = [1, 1, 1, 2, 2, 2, 2, 2, 3, 3, 3, 3, 3, 3, 3,
                  4, 4, 4, 4, 4, 4, 4, 4, 4]


def random_harmonic_polynomial(rng: np.random.Generator, max_degree: int = 4):
    """Random combination of the harmonic basis up to max_degree.

    Returns (w, coeffs) with w mapping points (..., 3) -> scalar values.
    """
    basis = _harmonic_basis()
    keep = [i for i, d in enumerate(_BASIS_DEGREES) if d <= max_degree]
    coeffs = rng.normal(size=len(keep))

    def w(pts: np.ndarray) -> np.ndarray:
        x, y, z = pts[..., 0], pts[..., 1], pts[..., 2]
        out = np.zeros(pts.shape[:-1])
        for c, i in zip(coeffs, keep):
            out += c * basis[i](x, y, z)
        return out

    return w, coeffs
