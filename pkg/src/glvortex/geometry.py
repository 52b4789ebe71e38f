"""Grids, discrete fields and discrete calculus on discs, balls, spheres and cylinders.

All lattices are masked Cartesian grids except the sphere, which uses a
latitude-longitude grid with metric area weights R^2 sin(phi) dphi dtheta.
Pole nodes are excluded (colatitude samples sit at cell centers); polar caps
inherit the value of the nearest ring during interpolation.

Lengths are in grid units throughout.
"""

from __future__ import annotations

import csv
import io
import struct
from dataclasses import dataclass, field

import numpy as np


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

def _centered_coords(radius: float, h: float) -> np.ndarray:
    n = int(np.floor(radius / h + 1e-12))
    return np.arange(-n, n + 1) * h


@dataclass(frozen=True)
class GridDisc2D:
    """Masked Cartesian lattice covering the disc |x| <= R in the plane.

    Cell weights are h^2 for every lattice node inside the disc.  The boundary
    circle C_R is stored as an ordered ring of angle samples so Dirichlet data
    and boundary integrals are unambiguous.
    """

    radius: float
    spacing: float
    x: np.ndarray = field(init=False, repr=False)
    y: np.ndarray = field(init=False, repr=False)
    mask: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    boundary_theta: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        coords = _centered_coords(self.radius, self.spacing)
        X, Y = np.meshgrid(coords, coords, indexing="ij")
        mask = X**2 + Y**2 <= self.radius**2 * (1 + 1e-12)
        m = max(32, int(np.ceil(2 * np.pi * self.radius / self.spacing)))
        theta = np.arange(m) * (2 * np.pi / m)
        object.__setattr__(self, "x", X)
        object.__setattr__(self, "y", Y)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "weights", np.where(mask, self.spacing**2, 0.0))
        object.__setattr__(self, "boundary_theta", theta)

    @property
    def ndim(self) -> int:
        return 2

    @property
    def shape(self):
        return self.mask.shape

    @property
    def points(self) -> np.ndarray:
        return np.stack([self.x, self.y], axis=-1)

    @property
    def boundary_points(self) -> np.ndarray:
        t = self.boundary_theta
        return self.radius * np.stack([np.cos(t), np.sin(t)], axis=-1)

    @property
    def coords1d(self) -> np.ndarray:
        return self.x[:, 0]

    @property
    def interior_mask(self) -> np.ndarray:
        """Nodes of the mask all of whose 4 neighbors are in the mask."""
        return _erode(self.mask)

    @property
    def boundary_band(self) -> np.ndarray:
        """Mask nodes with at least one neighbor off the mask."""
        return self.mask & ~_erode(self.mask)

    def axes_spacing(self):
        return (self.spacing, self.spacing)


@dataclass(frozen=True)
class GridBall3D:
    """Masked Cartesian lattice covering the ball |x| <= R, with a
    latitude-longitude parametrization of the boundary sphere S_R."""

    radius: float
    spacing: float
    x: np.ndarray = field(init=False, repr=False)
    y: np.ndarray = field(init=False, repr=False)
    z: np.ndarray = field(init=False, repr=False)
    mask: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        coords = _centered_coords(self.radius, self.spacing)
        X, Y, Z = np.meshgrid(coords, coords, coords, indexing="ij")
        mask = X**2 + Y**2 + Z**2 <= self.radius**2 * (1 + 1e-12)
        object.__setattr__(self, "x", X)
        object.__setattr__(self, "y", Y)
        object.__setattr__(self, "z", Z)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "weights", np.where(mask, self.spacing**3, 0.0))

    @property
    def ndim(self) -> int:
        return 3

    @property
    def shape(self):
        return self.mask.shape

    @property
    def points(self) -> np.ndarray:
        return np.stack([self.x, self.y, self.z], axis=-1)

    @property
    def coords1d(self) -> np.ndarray:
        return self.x[:, 0, 0]

    @property
    def interior_mask(self) -> np.ndarray:
        return _erode(self.mask)

    @property
    def boundary_band(self) -> np.ndarray:
        return self.mask & ~_erode(self.mask)

    def boundary_shell(self, n_phi: int | None = None) -> "GridSphere":
        """Ordered parametrization of S_R with node gaps <= 2h."""
        if n_phi is None:
            n_phi = max(16, int(np.ceil(np.pi * self.radius / self.spacing)))
        return GridSphere(self.radius, n_phi, 2 * n_phi)

    def axes_spacing(self):
        return (self.spacing, self.spacing, self.spacing)


@dataclass(frozen=True)
class GridSphere:
    """Latitude-longitude grid on the sphere S_R.

    Colatitude samples phi_i = (i + 1/2) * pi / n_phi (no node at the exact
    poles), longitude theta_j = j * 2pi / n_theta, weight R^2 sin(phi) dphi dtheta.
    """

    radius: float
    n_phi: int
    n_theta: int
    phi: np.ndarray = field(init=False, repr=False)
    theta: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        dphi = np.pi / self.n_phi
        dtheta = 2 * np.pi / self.n_theta
        phi = (np.arange(self.n_phi) + 0.5) * dphi
        theta = np.arange(self.n_theta) * dtheta
        w = (self.radius**2 * np.sin(phi) * dphi * dtheta)[:, None] * np.ones(
            (1, self.n_theta)
        )
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "weights", w)

    @property
    def shape(self):
        return (self.n_phi, self.n_theta)

    @property
    def dphi(self) -> float:
        return np.pi / self.n_phi

    @property
    def dtheta(self) -> float:
        return 2 * np.pi / self.n_theta

    @property
    def mask(self) -> np.ndarray:
        return np.ones(self.shape, dtype=bool)

    @property
    def points(self) -> np.ndarray:
        """Cartesian node positions, shape (n_phi, n_theta, 3)."""
        ph = self.phi[:, None]
        th = self.theta[None, :]
        return self.radius * np.stack(
            [
                np.sin(ph) * np.cos(th) * np.ones_like(th),
                np.sin(ph) * np.sin(th) * np.ones_like(th),
                np.cos(ph) * np.ones_like(th),
            ],
            axis=-1,
        )

    def resolution(self) -> float:
        """Largest geodesic node gap away from the poles."""
        return max(self.radius * self.dphi, self.radius * self.dtheta)


@dataclass(frozen=True)
class GridCylinder:
    """Product grid D_R x (0, H): a disc lattice times uniform z levels."""

    base: GridDisc2D
    height: float
    spacing_z: float
    z: np.ndarray = field(init=False, repr=False)
    mask: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        nz = int(np.round(self.height / self.spacing_z)) + 1
        z = np.linspace(0.0, self.height, nz)
        mask = np.broadcast_to(self.base.mask[:, :, None], self.base.shape + (nz,))
        # trapezoid weight in z so the column sums to H exactly
        wz = np.full(nz, self.height / (nz - 1))
        wz[0] *= 0.5
        wz[-1] *= 0.5
        w = self.base.weights[:, :, None] * wz[None, None, :]
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "mask", np.ascontiguousarray(mask))
        object.__setattr__(self, "weights", w)

    @property
    def ndim(self) -> int:
        return 3

    @property
    def shape(self):
        return self.mask.shape

    @property
    def points(self) -> np.ndarray:
        nz = len(self.z)
        X = np.broadcast_to(self.base.x[:, :, None], self.shape)
        Y = np.broadcast_to(self.base.y[:, :, None], self.shape)
        Z = np.broadcast_to(self.z[None, None, :], self.shape)
        return np.stack([X, Y, Z], axis=-1)

    def axes_spacing(self):
        return (self.base.spacing, self.base.spacing, self.z[1] - self.z[0])


@dataclass(frozen=True)
class SphericalDisc:
    """Geodesic disc on a sphere of radius R: center (unit vector * R) and
    geodesic radius rho measured along the surface, 0 < rho < pi*R."""

    center: np.ndarray
    geodesic_radius: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        object.__setattr__(self, "center", c)
        R = float(np.linalg.norm(c))
        if not (0.0 < self.geodesic_radius < np.pi * R):
            raise ValueError(
                f"geodesic radius {self.geodesic_radius} outside (0, pi*R={np.pi * R})"
            )

    @property
    def sphere_radius(self) -> float:
        return float(np.linalg.norm(self.center))

    @property
    def unit_center(self) -> np.ndarray:
        return self.center / self.sphere_radius


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

@dataclass
class VectorField:
    """A discrete R^2-valued map over a grid (the order parameter u).

    values has shape grid.shape + (2,).  For analytic data use
    VectorField.from_function so values are defined at every lattice node,
    including nodes outside the mask (interpolation near the mask edge then
    stays well defined).
    """

    grid: object
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        expected = tuple(self.grid.shape) + (2,)
        if self.values.shape != expected:
            raise ValueError(f"values shape {self.values.shape} != {expected}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field contains non-finite entries")

    @classmethod
    def from_function(cls, grid, fn) -> "VectorField":
        """fn maps points (..., dim) -> values (..., 2); on the sphere it
        receives Cartesian surface points."""
        return cls(grid, np.asarray(fn(grid.points), dtype=float))

    @classmethod
    def constant(cls, grid, value=(1.0, 0.0)) -> "VectorField":
        v = np.empty(tuple(grid.shape) + (2,))
        v[..., 0], v[..., 1] = value
        return cls(grid, v)

    def copy(self) -> "VectorField":
        return VectorField(self.grid, self.values.copy())

    @property
    def modulus(self) -> np.ndarray:
        return np.sqrt(self.values[..., 0] ** 2 + self.values[..., 1] ** 2)

    def as_complex(self) -> np.ndarray:
        return self.values[..., 0] + 1j * self.values[..., 1]


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

def _erode(mask: np.ndarray) -> np.ndarray:
    out = mask.copy()
    for ax in range(mask.ndim):
        m_p = np.zeros_like(mask)
        m_m = np.zeros_like(mask)
        sl_all = [slice(None)] * mask.ndim
        sl_a, sl_b = list(sl_all), list(sl_all)
        sl_a[ax], sl_b[ax] = slice(None, -1), slice(1, None)
        m_p[tuple(sl_a)] = mask[tuple(sl_b)]
        m_m[tuple(sl_b)] = mask[tuple(sl_a)]
        out &= m_p & m_m
    return out


def _shift(a: np.ndarray, step: int, axis: int, fill=0.0) -> np.ndarray:
    out = np.full_like(a, fill)
    sl_src = [slice(None)] * a.ndim
    sl_dst = [slice(None)] * a.ndim
    if step > 0:
        sl_src[axis] = slice(step, None)
        sl_dst[axis] = slice(None, -step)
    else:
        sl_src[axis] = slice(None, step)
        sl_dst[axis] = slice(-step, None)
    out[tuple(sl_dst)] = a[tuple(sl_src)]
    return out


def masked_gradient(values: np.ndarray, mask: np.ndarray, spacings) -> np.ndarray:
    """Central differences on the mask, one-sided at mask edges.

    values: mask.shape + trailing component axes.  Returns an array of shape
    values.shape + (ndim,) with partial derivatives; zero off the mask and at
    isolated nodes.
    """
    ndim = mask.ndim
    trail = values.ndim - ndim
    out = np.zeros(values.shape + (ndim,))
    for ax in range(ndim):
        h = spacings[ax]
        mshape = mask.shape + (1,) * trail
        has_p = _shift(mask, +1, ax, fill=False).reshape(mshape)
        has_m = _shift(mask, -1, ax, fill=False).reshape(mshape)
        vp = _shift(values, +1, ax)
        vm = _shift(values, -1, ax)
        g = np.zeros_like(values)
        both = has_p & has_m
        g = np.where(both, (vp - vm) / (2 * h), g)
        g = np.where(has_p & ~has_m, (vp - values) / h, g)
        g = np.where(~has_p & has_m, (values - vm) / h, g)
        out[..., ax] = g
    out *= mask.reshape(mask.shape + (1,) * (trail + 1))
    return out


def gradient(f: VectorField) -> np.ndarray:
    """Per-node array of partial derivatives, shape grid.shape + (2, ndim)."""
    g = f.grid
    if isinstance(g, GridSphere):
        return tangential_gradient(f)
    return masked_gradient(f.values, g.mask, g.axes_spacing())


def sphere_tangential_gradient(values: np.ndarray, grid: GridSphere) -> np.ndarray:
    """Tangential derivative pair (d/dphi / R, d/dtheta / (R sin phi)).

    theta is periodic; phi uses one-sided stencils at the first/last rings.
    Trailing component axes of values are preserved; output gains a final
    axis of length 2.
    """
    trail = values.ndim - 2
    dphi, dtheta = grid.dphi, grid.dtheta
    # phi direction: central interior, one-sided at the cap rings
    g_phi = np.empty_like(values)
    g_phi[1:-1] = (values[2:] - values[:-2]) / (2 * dphi)
    g_phi[0] = (values[1] - values[0]) / dphi
    g_phi[-1] = (values[-1] - values[-2]) / dphi
    # theta direction: periodic central
    g_theta = (np.roll(values, -1, axis=1) - np.roll(values, 1, axis=1)) / (2 * dtheta)
    sinphi = np.sin(grid.phi).reshape((-1, 1) + (1,) * trail)
    out = np.stack(
        [g_phi / grid.radius, g_theta / (grid.radius * sinphi)], axis=-1
    )
    return out


def tangential_gradient(f: VectorField) -> np.ndarray:
    if not isinstance(f.grid, GridSphere):
        raise TypeError("tangential_gradient requires a GridSphere field")
    return sphere_tangential_gradient(f.values, f.grid)


def integrate(density: np.ndarray, grid, region: np.ndarray | None = None) -> float:
    """Weighted quadrature of a per-node scalar density over the grid (or a
    sub-mask).  Uses numpy pairwise summation for deterministic reductions."""
    w = grid.weights
    if region is not None:
        w = np.where(region, w, 0.0)
    return float(np.sum(density * w))


# ---------------------------------------------------------------------------
# interpolation and traces
# ---------------------------------------------------------------------------

def multilinear(values: np.ndarray, coords1d: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Multilinear interpolation of values on a uniform cube/square lattice
    with shared 1D coordinates; pts has shape (..., d) with d = 2 or 3.
    Trailing component axes of values are preserved."""
    pts = np.asarray(pts, dtype=float)
    d = pts.shape[-1]
    h = coords1d[1] - coords1d[0]
    n = len(coords1d)
    t = (pts - coords1d[0]) / h
    i0 = np.clip(np.floor(t).astype(int), 0, n - 2)
    f = np.clip(t - i0, 0.0, 1.0)
    trail = values.ndim - d
    fk = [f[..., k].reshape(f.shape[:-1] + (1,) * trail) for k in range(d)]
    out = 0.0
    for corner in range(2**d):
        w = 1.0
        idx = []
        for k in range(d):
            bit = (corner >> k) & 1
            w = w * (fk[k] if bit else (1 - fk[k]))
            idx.append(i0[..., k] + bit)
        out = out + w * values[tuple(idx)]
    return out


def trilinear(values: np.ndarray, coords1d: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Trilinear interpolation (3D specialization of multilinear)."""
    return multilinear(values, coords1d, pts)


def sphere_interp(values: np.ndarray, grid: GridSphere, phi: np.ndarray,
                  theta: np.ndarray) -> np.ndarray:
    """Bilinear interpolation on the lat-long grid; theta wraps, phi clamps to
    the nearest cap ring (pole-cap handling)."""
    trail = values.ndim - 2
    tp = phi / grid.dphi - 0.5
    i0 = np.clip(np.floor(tp).astype(int), 0, grid.n_phi - 2)
    fp = np.clip(tp - i0, 0.0, 1.0)
    tt = (np.mod(theta, 2 * np.pi)) / grid.dtheta
    j0 = np.floor(tt).astype(int) % grid.n_theta
    ft = tt - np.floor(tt)
    j1 = (j0 + 1) % grid.n_theta
    fp = fp.reshape(fp.shape + (1,) * trail)
    ft = ft.reshape(ft.shape + (1,) * trail)
    v00 = values[i0, j0]
    v01 = values[i0, j1]
    v10 = values[i0 + 1, j0]
    v11 = values[i0 + 1, j1]
    return (1 - fp) * ((1 - ft) * v00 + ft * v01) + fp * ((1 - ft) * v10 + ft * v11)


def sphere_interp_xyz(values: np.ndarray, grid: GridSphere, pts: np.ndarray) -> np.ndarray:
    """Interpolate sphere-grid values at Cartesian points (projected to S_R)."""
    p = np.asarray(pts, dtype=float)
    r = np.linalg.norm(p, axis=-1)
    phi = np.arccos(np.clip(p[..., 2] / np.maximum(r, 1e-300), -1.0, 1.0))
    theta = np.arctan2(p[..., 1], p[..., 0])
    return sphere_interp(values, grid, phi, theta)


def restrict_to_sphere(u: VectorField, r: float, n_phi: int | None = None) -> VectorField:
    """Trilinear restriction of a ball field to the concentric sphere S_r."""
    g = u.grid
    if not isinstance(g, GridBall3D):
        raise TypeError("restrict_to_sphere requires a GridBall3D field")
    if not (2 * g.spacing < r < g.radius - 2 * g.spacing):
        raise ValueError(
            f"radius {r} out of range (2h, R-2h) = "
            f"({2 * g.spacing}, {g.radius - 2 * g.spacing})"
        )
    if n_phi is None:
        n_phi = max(16, int(np.ceil(np.pi * r / g.spacing)))
    sph = GridSphere(r, n_phi, 2 * n_phi)
    vals = trilinear(u.values, g.coords1d, sph.points)
    return VectorField(sph, vals)


def disc_frame(disc: SphericalDisc):
    """Orthonormal tangent frame (e1, e2) at the disc center."""
    n = disc.unit_center
    a = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(n, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2


def circle_points(disc: SphericalDisc, n: int) -> np.ndarray:
    """Closed ordered loop of n+1 Cartesian samples along the boundary circle
    of a geodesic disc (first == last)."""
    R = disc.sphere_radius
    ang = disc.geodesic_radius / R
    e1, e2 = disc_frame(disc)
    s = np.linspace(0.0, 2 * np.pi, n + 1)
    pts = R * (
        np.cos(ang) * disc.unit_center[None, :]
        + np.sin(ang) * (np.cos(s)[:, None] * e1[None, :] + np.sin(s)[:, None] * e2[None, :])
    )
    return pts


def circle_trace(u: VectorField, disc: SphericalDisc, n: int | None = None) -> np.ndarray:
    """Ordered closed loop of R^2 samples of u along the boundary of a
    spherical disc, shape (n+1, 2) with row 0 == row n."""
    g = u.grid
    if not isinstance(g, GridSphere):
        raise TypeError("circle_trace requires a GridSphere field")
    if abs(disc.sphere_radius - g.radius) > 1e-9 * g.radius:
        raise ValueError("disc lives on a different sphere than the field")
    perimeter = 2 * np.pi * g.radius * np.sin(disc.geodesic_radius / g.radius)
    if n is None:
        n = max(32, int(np.ceil(perimeter / min(g.radius * g.dphi, g.radius * g.dtheta))))
    pts = circle_points(disc, n)
    vals = sphere_interp_xyz(u.values, g, pts)
    vals[-1] = vals[0]
    return vals


def geodesic_distance(a: np.ndarray, b: np.ndarray, R: float = 1.0) -> float:
    """Geodesic distance between points given as unit vectors * R."""
    ua = np.asarray(a) / R
    ub = np.asarray(b) / R
    return float(R * np.arccos(np.clip(np.dot(ua, ub), -1.0, 1.0)))


# ---------------------------------------------------------------------------
# serialization: flat binary container and CSV
# ---------------------------------------------------------------------------

_MAGIC = b"GLF1"
_KINDS = {"disc": 1, "ball": 2, "sphere": 3, "cylinder": 4}
_KINDS_INV = {v: k for k, v in _KINDS.items()}


def _grid_kind(grid) -> str:
    return {
        GridDisc2D: "disc",
        GridBall3D: "ball",
        GridSphere: "sphere",
        GridCylinder: "cylinder",
    }[type(grid)]


def save_field(path, f: VectorField) -> None:
    """Flat binary container: magic, grid kind, dims, grid parameters, then
    row-major float64 values."""
    g = f.grid
    kind = _grid_kind(g)
    if kind == "disc":
        params = (g.radius, g.spacing, 0.0)
    elif kind == "ball":
        params = (g.radius, g.spacing, 0.0)
    elif kind == "sphere":
        params = (g.radius, float(g.n_phi), float(g.n_theta))
    else:
        params = (g.base.radius, g.base.spacing, g.height)
    shape = tuple(f.values.shape)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", _KINDS[kind], len(shape)))
        fh.write(struct.pack(f"<{len(shape)}Q", *shape))
        fh.write(struct.pack("<4d", *params, 0.0))
        fh.write(np.ascontiguousarray(f.values, dtype="<f8").tobytes())


def load_field(path) -> VectorField:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError("not a glvortex field container")
        kind_id, ndim = struct.unpack("<II", fh.read(8))
        shape = struct.unpack(f"<{ndim}Q", fh.read(8 * ndim))
        p0, p1, p2, _ = struct.unpack("<4d", fh.read(32))
        kind = _KINDS_INV[kind_id]
        if kind == "disc":
            grid = GridDisc2D(p0, p1)
        elif kind == "ball":
            grid = GridBall3D(p0, p1)
        elif kind == "sphere":
            grid = GridSphere(p0, int(p1), int(p2))
        else:
            nz = shape[2]
            grid = GridCylinder(GridDisc2D(p0, p1), p2, p2 / (nz - 1))
        vals = np.frombuffer(fh.read(), dtype="<f8").reshape(shape)
        return VectorField(grid, vals.copy())


def field_to_csv(f: VectorField) -> str:
    """CSV dump (small grids): one row per node with coordinates and value."""
    g = f.grid
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    pts = g.points.reshape(-1, g.points.shape[-1])
    vals = f.values.reshape(-1, 2)
    dim = pts.shape[-1]
    w.writerow([f"x{k + 1}" for k in range(dim)] + ["u1", "u2"])
    for p, v in zip(pts, vals):
        w.writerow([f"{c:.17g}" for c in p] + [f"{v[0]:.17g}", f"{v[1]:.17g}"])
    return buf.getvalue()
