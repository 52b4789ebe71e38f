"""Winding numbers of R^2-valued data on closed loops and spherical circles.

The degree is the integer (1/2pi) * sum of principal-value phase increments
between consecutive samples; it only sees phases, never moduli.  A loop is
under-resolved when some increment reaches pi in absolute value; on spheres
the trace is automatically refined (up to 4 doublings) before giving up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import GridSphere, SphericalDisc, VectorField, circle_trace


class DegreeUndefinedError(ValueError):
    """Raised when a loop sample has zero modulus."""


class UnderResolvedLoopError(ValueError):
    """Raised when an adjacent-sample phase jump reaches pi."""


@dataclass
class Loop:
    """Ordered closed loop of R^2 samples (last row equals the first)."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[1] != 2 or s.shape[0] < 8:
            raise ValueError("loop needs >= 8 samples of shape (n, 2)")
        if not np.allclose(s[0], s[-1]):
            s = np.vstack([s, s[0]])
        self.samples = s

    @property
    def min_modulus(self) -> float:
        return float(np.min(np.hypot(self.samples[:, 0], self.samples[:, 1])))


def phase_increments(samples: np.ndarray) -> np.ndarray:
    """Principal-branch phase differences between consecutive samples."""
    z = samples[:, 0] + 1j * samples[:, 1]
    if np.any(z == 0):
        raise DegreeUndefinedError("loop passes through zero; degree undefined")
    return np.angle(z[1:] / z[:-1])


def winding_number(loop) -> int:
    """Integer degree of a closed loop of nonvanishing R^2 samples."""
    if not isinstance(loop, Loop):
        loop = Loop(np.asarray(loop))
    if loop.min_modulus <= 0:
        raise DegreeUndefinedError("zero-modulus sample; degree undefined")
    inc = phase_increments(loop.samples)
    if np.any(np.abs(inc) >= np.pi - 1e-12):
        raise UnderResolvedLoopError("phase jump >= pi; refine the loop")
    total = float(np.sum(inc))
    return int(np.rint(total / (2 * np.pi)))


def degree_on_sphere(u: VectorField, disc: SphericalDisc,
                     n: int | None = None, max_refine: int = 4) -> int:
    """Degree of u along the boundary circle of a spherical disc.

    Re-traces the circle with doubled sampling when a jump >= pi is detected,
    so under-resolution is explicit rather than silently wrong.
    """
    if not isinstance(u.grid, GridSphere):
        raise TypeError("degree_on_sphere requires a sphere field")
    if n is None:
        g = u.grid
        perim = 2 * np.pi * g.radius * np.sin(disc.geodesic_radius / g.radius)
        n = max(32, int(np.ceil(perim / (g.radius * g.dphi))))
    last_err = None
    for _ in range(max_refine + 1):
        samples = circle_trace(u, disc, n)
        try:
            return winding_number(Loop(samples))
        except UnderResolvedLoopError as err:
            last_err = err
            n *= 2
    raise last_err
