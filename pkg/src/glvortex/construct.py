"""Upper-bound competitor constructions.

Everything needed to build an explicit field on the ball that matches given
sphere data and whose energy can be audited region by region: conformal
transplant of a spherical cap onto the unit disc, energy-minimizing fill of
a cap with degree-zero boundary data, cone-type extension between two disc
fields inside a cylinder, the change of variables carrying that cylinder
into a spherical shell sector, linear modulus interpolation across a thin
annulus, and the harmonic extension of the phase into the core.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from .geometry import (
    GridBall3D,
    GridCylinder,
    GridDisc2D,
    GridSphere,
    SphericalDisc,
    VectorField,
    gradient,
    integrate,
    masked_gradient,
    multilinear,
    sphere_interp,
    sphere_interp_xyz,
    sphere_tangential_gradient,
)
from .energy import gl_energy, potential_density, tangential_energy, weighted_energy
from .topology import degree_on_sphere
from .relax import SolveOptions, minimize_dirichlet, minimize_weighted
from .bad_discs import bad_disc_pipeline


class LiftingError(RuntimeError):
    """A single-valued phase could not be extracted."""


# ---------------------------------------------------------------------------
# stereographic transplant: spherical cap <-> weighted unit disc
# ---------------------------------------------------------------------------

def _rotation_to_south(center_unit: np.ndarray) -> np.ndarray:
    """Rotation Q with Q @ (0,0,-1) = center_unit (local -> global)."""
    c = np.asarray(center_unit, dtype=float)
    s = np.array([0.0, 0.0, -1.0])
    v = np.cross(s, c)
    d = float(np.dot(s, c))
    if np.linalg.norm(v) < 1e-14:
        return np.eye(3) if d > 0 else np.diag([1.0, -1.0, -1.0])
    vx = np.array([[0, -v[2], v[1]], [v[2], 0, -v[0]], [-v[1], v[0], 0]])
    return np.eye(3) + vx + vx @ vx / (1.0 + d)


@dataclass(frozen=True)
class TransplantChart:
    """Bookkeeping for the cap -> unit-disc change of variables.

    The cap of geodesic radius rho on the sphere of radius R is carried onto
    the unit disc by stereographic projection from the antipode of its
    center followed by a dilation.  Tangential energy of the cap field turns
    into the weighted planar energy with potential weight p(y) and effective
    core length eps = 1/(2 R tan(rho/2R)); the Dirichlet part is conformally
    invariant, so the identity is exact up to interpolation.
    """

    disc: SphericalDisc
    grid: GridDisc2D
    eps: float
    weight: np.ndarray
    rotation: np.ndarray
    tan_half: float
    flagged: bool = False

    def disc_to_sphere(self, y: np.ndarray) -> np.ndarray:
        """Map unit-disc points (..., 2) to Cartesian sphere points."""
        R = self.disc.sphere_radius
        w = self.tan_half * np.asarray(y, dtype=float)
        s2 = np.sum(w**2, axis=-1)
        den = 1.0 + s2
        local = np.empty(w.shape[:-1] + (3,))
        local[..., 0] = 2.0 * w[..., 0] / den
        local[..., 1] = 2.0 * w[..., 1] / den
        local[..., 2] = (s2 - 1.0) / den
        return R * (local @ self.rotation.T)

    def sphere_to_disc(self, pts: np.ndarray) -> np.ndarray:
        """Inverse map, Cartesian sphere points (..., 3) -> unit-disc points."""
        R = self.disc.sphere_radius
        local = np.asarray(pts, dtype=float) @ self.rotation
        den = R - local[..., 2]
        w = local[..., :2] / np.maximum(den, 1e-300)[..., None]
        return w / self.tan_half


def transplant_chart(disc: SphericalDisc, n: int = 129,
                     strict: bool = True) -> TransplantChart:
    R = disc.sphere_radius
    ratio = disc.geodesic_radius / R
    flagged = ratio >= 0.1
    if flagged and strict:
        raise ValueError(f"cap too large for the flat chart: rho/R = {ratio:.3f} >= 0.1")
    grid = GridDisc2D(1.0, 2.0 / (n - 1))
    t = np.tan(0.5 * ratio)
    eps = 1.0 / (2.0 * R * t)
    r2 = grid.x**2 + grid.y**2
    p = 1.0 / (1.0 + t**2 * r2) ** 2
    Q = _rotation_to_south(disc.unit_center)
    return TransplantChart(disc, grid, eps, p, Q, t, flagged)


def stereographic_transplant(u: VectorField, disc: SphericalDisc, n: int = 129,
                             strict: bool = True):
    """Pull a cap of sphere data back to the unit disc.

    Returns (U, chart) where U is a VectorField on the chart's disc grid and
    the weighted energy of U equals the tangential energy of u over the cap
    up to interpolation error.
    """
    if not isinstance(u.grid, GridSphere):
        raise TypeError("transplant expects sphere data")
    chart = transplant_chart(disc, n, strict=strict)
    pts = np.stack([chart.grid.x, chart.grid.y], axis=-1)
    vals = sphere_interp_xyz(u.values, u.grid, chart.disc_to_sphere(pts))
    return VectorField(chart.grid, vals), chart


def transplant_inverse(U: VectorField, chart: TransplantChart,
                       sphere: GridSphere):
    """Push unit-disc values back onto the sphere lattice.

    Returns (vals, inside) where inside flags the sphere nodes covered by
    the cap and vals holds interpolated values at those nodes.
    """
    pts = sphere.points
    y = chart.sphere_to_disc(pts)
    inside = np.sum(y**2, axis=-1) <= 1.0
    yc = np.clip(y[inside], -1.0, 1.0)
    vals = multilinear(U.values, chart.grid.coords1d, yc)
    return vals, inside


# ---------------------------------------------------------------------------
# filling a cap with degree-zero boundary data
# ---------------------------------------------------------------------------

@dataclass
class FillReport:
    energy_in: float          # weighted planar energy of the original data
    energy_out: float         # same functional for the minimizer
    min_modulus: float
    eps: float
    converged: bool


def fill_spherical_disc(u: VectorField, disc: SphericalDisc, n: int = 161,
                        opts: SolveOptions | None = None, strict: bool = False):
    """Replace u inside a cap by an energy minimizer with the same boundary.

    The boundary trace must have winding zero; a vortex cannot be removed and
    the construction refuses it.  Returns (v, planar, chart, report): v is a
    full sphere field equal to u outside the cap, planar holds the pair of
    unit-disc fields (data, minimizer) for reuse downstream.
    """
    deg = degree_on_sphere(u, disc)
    if deg != 0:
        raise ValueError(f"cap boundary carries winding {deg}; cannot fill")
    U, chart = stereographic_transplant(u, disc, n=n, strict=strict)

    def bc(pts):
        return multilinear(U.values, chart.grid.coords1d, pts)

    opts = opts or SolveOptions(tol=5e-4)
    V, rep = minimize_weighted(chart.weight, bc, chart.eps,
                               opts=opts, grid=chart.grid, u0=U)
    vals, inside = transplant_inverse(V, chart, u.grid)
    out = u.copy()
    out.values[inside] = vals
    report = FillReport(
        energy_in=weighted_energy(U, chart.eps, chart.weight),
        energy_out=weighted_energy(V, chart.eps, chart.weight),
        min_modulus=rep.min_modulus,
        eps=chart.eps,
        converged=rep.converged,
    )
    return out, (U, V), chart, report


# ---------------------------------------------------------------------------
# cone extension inside a planar cylinder
# ---------------------------------------------------------------------------

@dataclass
class ConeReport:
    energy: float
    energy_top: float          # planar energy of the top data u
    energy_bottom: float       # planar energy of the bottom data v
    bound: float               # (H + R^2/H) (E(u) + E(v))
    c_measured: float
    potential: float
    potential_bound: float
    trace_defect: float        # worst nodal mismatch on top/bottom/side
    height: float


def cone_extension(u: VectorField, v: VectorField, H: float,
                   n_z: int = 33, eps: float = 1.0):
    """Bridge two disc fields sharing boundary values through a cylinder.

    The bottom face carries v, the top carries u, and the lateral boundary
    the common trace.  Writing w = u/v, the interpolant is v(x) * w(H x / z)
    inside the cone (H/R)|x| < z and plain v(x) outside it, so the modulus
    of v must stay away from zero.  Returns (U, report) with U living on a
    GridCylinder over the same base disc.
    """
    g = u.grid
    if v.grid is not g and (v.grid.radius != g.radius or v.grid.spacing != g.spacing):
        raise ValueError("u and v must share one disc grid")
    if H <= 0:
        raise ValueError("height must be positive")
    vm = np.where(g.mask, VectorField(g, v.values).modulus, 1.0)
    if vm.min() < 1e-8:
        raise ValueError("v vanishes somewhere; quotient w = u/v undefined")
    band = g.boundary_band
    defect_side = float(np.max(np.abs(u.values[band] - v.values[band]))) if band.any() else 0.0

    wc = u.as_complex() / v.as_complex()
    wv = np.stack([wc.real, wc.imag], axis=-1)
    cyl = GridCylinder(g, H, H / (n_z - 1))
    vals = np.empty(cyl.shape + (2,), dtype=float)
    pts2 = np.stack([g.x, g.y], axis=-1)
    rr = np.hypot(g.x, g.y)
    vz = v.values
    for k, z in enumerate(cyl.z):
        if z <= 0:
            vals[:, :, k] = vz
            continue
        cone = (H / g.radius) * rr < z
        level = vz.copy()
        if cone.any():
            scaled = (H / z) * pts2[cone]
            wk = multilinear(wv, g.coords1d, scaled)
            a, b = vz[cone, 0], vz[cone, 1]
            level[cone, 0] = a * wk[:, 0] - b * wk[:, 1]
            level[cone, 1] = a * wk[:, 1] + b * wk[:, 0]
        vals[:, :, k] = level
    U = VectorField(cyl, vals)

    eb = gl_energy(U, eps)
    eu = gl_energy(u, eps)
    ev = gl_energy(v, eps)
    geom = H + g.radius**2 / H
    bound = geom * (eu.total + ev.total)
    defect = max(
        defect_side,
        float(np.max(np.abs(vals[:, :, -1] - u.values)[g.mask])),
        float(np.max(np.abs(vals[:, :, 0] - v.values)[g.mask])),
    )
    rep = ConeReport(
        energy=eb.total, energy_top=eu.total, energy_bottom=ev.total,
        bound=bound, c_measured=eb.total / bound if bound > 0 else 0.0,
        potential=eb.potential,
        potential_bound=H * (eu.potential + ev.potential),
        trace_defect=defect, height=H,
    )
    return U, rep


# ---------------------------------------------------------------------------
# cylinder -> spherical shell sector change of variables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphericalCylinderMap:
    """The map (y1,y2,y3) -> ((y3+R-H)/R) (y1, y2, sqrt(R^2-y1^2-y2^2)).

    Carries the cylinder D_rho x (0,H) onto the radial sector of the shell
    B_R \\ B_{R-H} sitting over a polar cap; the top face lands on the outer
    sphere.  Near-isometric when rho/R and H/R are small, which is checked.
    """

    R: float
    H: float
    rho: float
    strict: bool = True

    def __post_init__(self):
        if self.strict and (self.rho / self.R > 0.2 or self.H / self.R > 0.2):
            raise ValueError("cap or height too large relative to the sphere")

    def forward(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        q = np.sqrt(np.maximum(self.R**2 - y[..., 0] ** 2 - y[..., 1] ** 2, 0.0))
        s = (y[..., 2] + self.R - self.H) / self.R
        out = np.empty_like(y)
        out[..., 0] = s * y[..., 0]
        out[..., 1] = s * y[..., 1]
        out[..., 2] = s * q
        return out

    def inverse(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        s = np.linalg.norm(x, axis=-1) / self.R
        out = np.empty_like(x)
        out[..., 0] = x[..., 0] / s
        out[..., 1] = x[..., 1] / s
        out[..., 2] = self.R * (s - 1.0) + self.H
        return out

    def jacobian(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        q = np.sqrt(np.maximum(self.R**2 - y[..., 0] ** 2 - y[..., 1] ** 2, 1e-300))
        s = (y[..., 2] + self.R - self.H) / self.R
        J = np.zeros(y.shape[:-1] + (3, 3))
        J[..., 0, 0] = s
        J[..., 1, 1] = s
        J[..., 2, 0] = -s * y[..., 0] / q
        J[..., 2, 1] = -s * y[..., 1] / q
        J[..., 0, 2] = y[..., 0] / self.R
        J[..., 1, 2] = y[..., 1] / self.R
        J[..., 2, 2] = q / self.R
        return J

    def mapped_energy(self, f: VectorField, eps: float):
        """Energy of f composed with the inverse map, over the image region.

        Evaluated entirely on the cylinder lattice by pulling the integrand
        back through the analytic Jacobian (no resampling).
        """
        cyl = f.grid
        if not isinstance(cyl, GridCylinder):
            raise TypeError("expected a cylinder field")
        pts = cyl.points
        J = self.jacobian(pts)
        A = np.linalg.inv(J)                       # d y / d x at mapped points
        det = np.abs(np.linalg.det(J))
        gy = gradient(f)                           # (..., 2, 3)
        gx = np.einsum("...ca,...ab->...cb", gy, A)
        dens = 0.5 * np.sum(gx**2, axis=(-2, -1)) * det
        pot = potential_density(f, eps) * det
        from .energy import EnergyBreakdown
        return EnergyBreakdown(integrate(dens, cyl), integrate(pot, cyl), eps)


# ---------------------------------------------------------------------------
# phase lifting on the sphere
# ---------------------------------------------------------------------------

def unwrap_sphere_phase(V: VectorField, floor: float = 7.0 / 8.0,
                        slack: float = 0.05) -> np.ndarray:
    """Single-valued phase of a nowhere-small sphere field.

    Unwraps along the first meridian and then along every parallel, then
    audits all lattice edges (including the seam) for jumps of pi or more.
    On a simply connected surface this succeeds exactly when every winding
    vanishes.
    """
    if not isinstance(V.grid, GridSphere):
        raise TypeError("phase unwrapping expects a sphere field")
    mod = V.modulus
    if mod.min() < floor - slack:
        raise LiftingError(f"modulus dips to {mod.min():.4f} below {floor - slack:.4f}")
    ang = np.arctan2(V.values[..., 1], V.values[..., 0])
    phi = ang.copy()
    phi[:, 0] = np.unwrap(ang[:, 0])
    phi = phi[:, 0][:, None] + np.unwrap(ang - ang[:, 0][:, None], axis=1)
    # audit: every grid edge must carry the principal-branch increment
    def princ(d):
        return (d + np.pi) % (2 * np.pi) - np.pi
    bad = 0.0
    d_theta = phi[:, 1:] - phi[:, :-1]
    bad = max(bad, float(np.max(np.abs(d_theta - princ(d_theta)), initial=0.0)))
    seam = phi[:, 0] - phi[:, -1]
    bad = max(bad, float(np.max(np.abs(seam - princ(seam)), initial=0.0)))
    d_phi = phi[1:, :] - phi[:-1, :]
    bad = max(bad, float(np.max(np.abs(d_phi - princ(d_phi)), initial=0.0)))
    if bad >= np.pi:
        raise LiftingError(f"lifting inconsistent: edge defect {bad:.3f} >= pi")
    return phi


# ---------------------------------------------------------------------------
# annulus interpolation
# ---------------------------------------------------------------------------

@dataclass
class AnnulusReport:
    radial_modulus: float
    tangential_modulus: float
    phase: float
    potential: float
    r_inner: float
    r_outer: float
    thickness: float
    c_measured: float          # total / (thickness * ln R)

    @property
    def total(self) -> float:
        return (self.radial_modulus + self.tangential_modulus
                + self.phase + self.potential)


def annulus_interpolation(rho_t: np.ndarray, phi_t: np.ndarray,
                          sphere: GridSphere, thickness: float,
                          eps: float = 1.0, n_r: int = 33,
                          R_ref: float | None = None):
    """Interpolate modulus to one across a thin annulus, phase held radially.

    rho_t and phi_t live on the sphere of the annulus' outer radius; the
    field is rho(r) e^{i phi} with rho linear in r from 1 at the inner
    radius to rho_t at the outer.  Energy is integrated as (radial grid) x
    (sphere quadrature) and split into four pieces.  Returns (report,
    evaluate) where evaluate(pts) materializes the field at 3D points.
    """
    if np.min(rho_t) < 7.0 / 8.0 - 0.05:
        raise ValueError("outer modulus below 7/8; interpolation contract broken")
    r_out = sphere.radius
    r_in = r_out - thickness
    if r_in <= 0:
        raise ValueError("annulus thicker than the ball")
    gr = sphere_tangential_gradient(rho_t[..., None], sphere)[..., 0, :]
    gp = sphere_tangential_gradient(phi_t[..., None], sphere)[..., 0, :]
    g_rho2 = np.sum(gr**2, axis=-1)
    g_phi2 = np.sum(gp**2, axis=-1)
    drho = (rho_t - 1.0) / thickness

    radii = np.linspace(r_in, r_out, n_r)
    pieces = np.zeros((4, n_r))
    for k, r in enumerate(radii):
        lam = (r - r_in) / thickness
        rho_r = 1.0 + lam * (rho_t - 1.0)
        scale_area = (r / r_out) ** 2          # dA on S_r vs quadrature on S_out
        # tangential gradients pick up (r_out/r)^2 which cancels the area scale
        pieces[0, k] = integrate(0.5 * drho**2, sphere) * scale_area
        pieces[1, k] = integrate(0.5 * lam**2 * g_rho2, sphere)
        pieces[2, k] = integrate(0.5 * rho_r**2 * g_phi2, sphere)
        pieces[3, k] = integrate((1.0 - rho_r**2) ** 2, sphere) * scale_area / (4 * eps**2)
    vals = np.trapezoid(pieces, radii, axis=1)
    R_ref = R_ref if R_ref is not None else r_out
    rep = AnnulusReport(*vals, r_inner=r_in, r_outer=r_out, thickness=thickness,
                        c_measured=float(np.sum(vals)) / (thickness * np.log(R_ref)))

    stacked = np.stack([rho_t, phi_t], axis=-1)

    def evaluate(pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        r = np.linalg.norm(pts, axis=-1)
        both = sphere_interp_xyz(stacked, sphere, pts * (r_out / np.maximum(r, 1e-300))[..., None])
        lam = np.clip((r - r_in) / thickness, 0.0, 1.0)
        rho = 1.0 + lam * (both[..., 0] - 1.0)
        return np.stack([rho * np.cos(both[..., 1]), rho * np.sin(both[..., 1])], axis=-1)

    return rep, evaluate


# ---------------------------------------------------------------------------
# harmonic extension of the phase
# ---------------------------------------------------------------------------

def sphere_harmonic_coeffs(f: np.ndarray, grid: GridSphere, l_max: int) -> np.ndarray:
    """Coefficients c[l,m] (m >= 0) of f against orthonormal Y_lm.

    FFT in longitude, stable normalized associated-Legendre recurrence in
    latitude; for real f the m < 0 content is the conjugate mirror.
    """
    n_phi, n_theta = f.shape
    if l_max >= n_theta // 2:
        raise ValueError("l_max too large for the longitudinal resolution")
    fm = np.fft.fft(f, axis=1) * grid.dtheta
    x = np.cos(grid.phi)
    sx = np.sin(grid.phi)
    w = sx * grid.dphi
    c = np.zeros((l_max + 1, l_max + 1), dtype=complex)
    pmm = np.full_like(x, np.sqrt(1.0 / (4 * np.pi)))
    for m in range(0, l_max + 1):
        if m > 0:
            pmm = -np.sqrt((2 * m + 1.0) / (2 * m)) * sx * pmm
        p_prev, p = np.zeros_like(x), pmm
        c[m, m] = np.sum(w * p * fm[:, m])
        for l in range(m + 1, l_max + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((2.0 * l + 1.0) * (l - 1 + m) * (l - 1 - m))
                        / ((2.0 * l - 3.0) * (l * l - m * m)))
            p, p_prev = a * (x * p - (b / a if l > m + 1 else 0.0) * p_prev), p
            c[l, m] = np.sum(w * p * fm[:, m])
    return c


def _spectral_power(c: np.ndarray) -> np.ndarray:
    """Per-degree power sum |c_l0|^2 + 2 sum_{m>0} |c_lm|^2 of a real field."""
    p = np.abs(c) ** 2
    out = p[:, 0] + 2.0 * np.sum(p[:, 1:], axis=1)
    return out


@dataclass
class HarmonicExtensionReport:
    energy: float              # (1/2) int_B |grad Phi|^2
    boundary_gradient: float   # int_S |grad_T phi|^2
    bound: float               # (R'/4) * boundary_gradient
    ratio: float
    residual: float            # Laplace / truncation residual, relative
    method: str


def harmonic_phase_extension(phi: np.ndarray, sphere: GridSphere,
                             method: str = "auto", h: float | None = None,
                             l_max: int | None = None):
    """Extend a sphere phase harmonically into the ball and price it.

    Returns (report, evaluate).  Two routes: a lattice Laplace solve (exact
    geometry, costs a 3D grid) and a spherical-harmonic expansion where the
    interior Dirichlet energy is the exact weighted coefficient sum; both
    verify the interior energy against (R'/4) times the boundary tangential
    gradient, with equality forced at degree one.
    """
    R = sphere.radius
    if method == "auto":
        method = "grid" if (h is not None or R <= 24.0) else "spectral"
    gt = sphere_tangential_gradient(phi[..., None], sphere)[..., 0, :]
    bnd = integrate(np.sum(gt**2, axis=-1), sphere)

    if method == "spectral":
        lm = l_max or min(sphere.n_phi - 2, sphere.n_theta // 2 - 1, 256)
        c = sphere_harmonic_coeffs(phi, sphere, lm)
        power = _spectral_power(c)
        l = np.arange(lm + 1)
        energy = 0.5 * R * float(np.sum(l * power))
        bnd_spec = float(np.sum(l * (l + 1) * power))
        residual = abs(bnd_spec - bnd) / max(bnd, 1e-300)
        rep = HarmonicExtensionReport(energy, bnd, 0.25 * R * bnd,
                                      energy / max(0.25 * R * bnd, 1e-300),
                                      residual, "spectral")
        # the spectral route prices the energy without materializing Phi
        return rep, None

    grid_h = h if h is not None else max(R / 24.0, 2.0 * R / 97)
    ball = GridBall3D(R, grid_h)
    vals = _solve_laplace(ball, phi, sphere)
    g = masked_gradient(vals[..., None], ball.mask, ball.axes_spacing())[..., 0, :]
    energy = 0.5 * integrate(np.sum(g**2, axis=-1), ball)
    res = _laplace_residual(vals, ball)
    rep = HarmonicExtensionReport(energy, bnd, 0.25 * R * bnd,
                                  energy / max(0.25 * R * bnd, 1e-300),
                                  res, "grid")

    def evaluate(pts: np.ndarray) -> np.ndarray:
        return multilinear(vals[..., None], ball.coords1d, pts)[..., 0]

    return rep, evaluate


def _solve_laplace(ball: GridBall3D, phi: np.ndarray, sphere: GridSphere) -> np.ndarray:
    """Lattice Dirichlet problem: harmonic inside, phi on the boundary band."""
    pts = ball.points
    r = np.linalg.norm(pts, axis=-1)
    proj = pts * (ball.radius / np.maximum(r, 1e-12))[..., None]
    bc = sphere_interp_xyz(phi[..., None], sphere, proj)[..., 0]
    inner = ball.interior_mask
    fixed = ball.mask & ~inner
    h2 = ball.spacing**2
    idx = np.full(ball.shape, -1, dtype=np.int64)
    idx[inner] = np.arange(int(inner.sum()))

    base = np.zeros(ball.shape)
    base[fixed] = bc[fixed]

    def lap(vec):
        full = base.copy() * 0.0
        full[inner] = vec
        out = np.zeros_like(full)
        s = full
        out[1:-1, 1:-1, 1:-1] = (
            s[2:, 1:-1, 1:-1] + s[:-2, 1:-1, 1:-1]
            + s[1:-1, 2:, 1:-1] + s[1:-1, :-2, 1:-1]
            + s[1:-1, 1:-1, 2:] + s[1:-1, 1:-1, :-2]
            - 6.0 * s[1:-1, 1:-1, 1:-1]
        ) / h2
        return -out[inner]

    rhs_full = np.zeros(ball.shape)
    s = base
    rhs_full[1:-1, 1:-1, 1:-1] = (
        s[2:, 1:-1, 1:-1] + s[:-2, 1:-1, 1:-1]
        + s[1:-1, 2:, 1:-1] + s[1:-1, :-2, 1:-1]
        + s[1:-1, 1:-1, 2:] + s[1:-1, 1:-1, :-2]
        - 6.0 * s[1:-1, 1:-1, 1:-1]
    ) / h2
    rhs = rhs_full[inner]

    n = int(inner.sum())
    A = LinearOperator((n, n), matvec=lap, dtype=float)
    x0 = base[inner] * 0.0 + bc[inner]
    sol, info = cg(A, rhs, x0=x0, rtol=1e-12, atol=0.0, maxiter=8000)
    if info != 0:
        raise RuntimeError(f"Laplace solve stalled (cg info {info})")
    out = base.copy()
    out[inner] = sol
    return out


def _laplace_residual(vals: np.ndarray, ball: GridBall3D) -> float:
    inner = ball.interior_mask
    h2 = ball.spacing**2
    s = vals
    lap = np.zeros_like(s)
    lap[1:-1, 1:-1, 1:-1] = (
        s[2:, 1:-1, 1:-1] + s[:-2, 1:-1, 1:-1]
        + s[1:-1, 2:, 1:-1] + s[1:-1, :-2, 1:-1]
        + s[1:-1, 1:-1, 2:] + s[1:-1, 1:-1, :-2]
        - 6.0 * s[1:-1, 1:-1, 1:-1]
    ) / h2
    scale = max(float(np.max(np.abs(vals[inner]))), 1e-300) / h2
    return float(np.max(np.abs(lap[inner]))) / scale


# ---------------------------------------------------------------------------
# the assembled competitor
# ---------------------------------------------------------------------------

@dataclass
class CompetitorReport:
    total: float
    shell: float
    annulus: float
    core: float
    boundary_energy: float     # tangential energy of the data on the sphere
    R: float
    alpha: float
    thickness: float
    core_prefactor: float      # core / (R * boundary_energy)
    shell_cylinders: list = field(default_factory=list)
    shell_outside: float = 0.0
    map_distortions: list = field(default_factory=list)
    inner_boundary_energy: float = 0.0
    phase_gradient: float = 0.0     # int_S |grad_T phi|^2 on the core sphere
    flags: list = field(default_factory=list)
    annulus_pieces: dict = field(default_factory=dict)
    ball_energy: float | None = None   # quadrature total of the materialized field

    def to_json(self) -> str:
        d = {k: v for k, v in self.__dict__.items()}
        return json.dumps(d, indent=2, sort_keys=True)


def competitor(u: VectorField, gamma: float, Lambda: float,
               alpha: float | None = None, ball_grid: GridBall3D | None = None,
               fill_n: int = 161, cone_h: float | None = None,
               opts: SolveOptions | None = None):
    """Build an explicit field on the ball matching u on the sphere.

    Three regions: an outer shell of thickness R^alpha where the data is
    propagated radially except over the certified small discs, which are
    bridged by cone extensions through near-isometric cylinder charts; a
    thin annulus where the modulus is interpolated to one; and the core,
    where the now unimodular field is the harmonic extension of its phase.

    With the default alpha the core region is empty unless R is
    astronomically large, so callers pick a working alpha; anything with
    R - 2 R^alpha comfortably positive and above the disc radii is fine.
    Returns (U_or_None, report): the field is materialized on ball_grid when
    one is supplied, otherwise only the priced report is produced.
    """
    g = u.grid
    if not isinstance(g, GridSphere):
        raise TypeError("competitor expects sphere data")
    R = g.radius
    flags = []
    e_bnd = tangential_energy(u, 1.0).total
    if e_bnd > gamma * np.log(R):
        flags.append(f"boundary energy {e_bnd:.3f} exceeds gamma ln R")

    fam, cert, info = bad_disc_pipeline(u, gamma, Lambda)
    if alpha is None:
        alpha = cert.alpha
    t = R**alpha
    r_out = R - t
    r_in = R - 2 * t
    if r_in <= 4 * g.resolution():
        raise ValueError(
            f"core radius R - 2R^alpha = {r_in:.2f} not usable; pick a smaller alpha")

    # ---- step 2: shell of thickness R^alpha -------------------------------
    V = u.copy()
    cylinders = []
    distortions = []
    H = cone_h if cone_h is not None else t
    for disc in fam.discs:
        if disc.geodesic_radius >= r_out * 0.45:
            raise ValueError("certified disc too large for the shell charts")
        V, (Up, Vp), chart, fill_rep = fill_spherical_disc(
            V, disc, n=fill_n, opts=opts, strict=False)
        if chart.flagged:
            flags.append(
                f"flat-chart gate: rho/R = {disc.geodesic_radius / R:.3f} >= 0.1")
        rho_e = R * np.sin(disc.geodesic_radius / R)
        n_b = max(49, min(129, int(np.ceil(2 * rho_e / max(g.resolution(), 1e-12)))))
        if n_b % 2 == 0:
            n_b += 1
        pg = GridDisc2D(rho_e, 2 * rho_e / (n_b - 1))
        Q = _rotation_to_south(disc.unit_center)
        # cap coordinates: horizontal offsets in the frame where the disc
        # center sits at the local south pole (matching the shell chart)
        pts2 = np.stack([pg.x, pg.y], axis=-1)
        q = np.sqrt(np.maximum(R**2 - np.sum(pts2**2, axis=-1), 0.0))
        local = np.concatenate([pts2, -q[..., None]], axis=-1)
        cap_pts = local @ Q.T
        u_plane = VectorField(pg, sphere_interp_xyz(u.values, g, cap_pts))
        v_plane = VectorField(pg, sphere_interp_xyz(V.values, g, cap_pts))
        # pin the shared trace exactly so the cone quotient is clean
        band = pg.boundary_band
        v_plane.values[band] = u_plane.values[band]
        Ucyl, cone_rep = cone_extension(u_plane, v_plane, H)
        smap = SphericalCylinderMap(R, H, rho_e, strict=False)
        if rho_e / R > 0.2 or H / R > 0.2:
            flags.append(f"shell chart distorted: rho/R={rho_e / R:.2f}, H/R={H / R:.2f}")
        mapped = smap.mapped_energy(Ucyl, 1.0)
        distortions.append(mapped.total / cone_rep.energy if cone_rep.energy > 0 else 1.0)
        cylinders.append({
            "radius": disc.geodesic_radius,
            "cone_energy": cone_rep.energy,
            "mapped_energy": mapped.total,
            "c_measured": cone_rep.c_measured,
            "fill_minimum": fill_rep.min_modulus,
            "cyl": (Ucyl, smap, Q, rho_e),
        })

    covered = fam.covers(g.points) if len(fam) else np.zeros(g.shape, bool)
    outside = ~covered
    gt = sphere_tangential_gradient(u.values, g)
    dens_d = 0.5 * np.sum(gt**2, axis=(-2, -1))
    pot_d = potential_density(u, 1.0)
    # exact radial integrals for the radially projected part of the shell:
    # the tangential gradient scale (R/r)^2 cancels the area scale (r/R)^2,
    # so the Dirichlet part integrates to (thickness) x (sphere integral)
    dir_out = integrate(np.where(outside, dens_d, 0.0), g) * t
    pot_out = integrate(np.where(outside, pot_d, 0.0), g) * (R**3 - r_out**3) / (3 * R**3)
    shell_outside = dir_out + pot_out
    shell = shell_outside + sum(cyl["mapped_energy"] for cyl in cylinders)

    # ---- step 3: annulus and core -----------------------------------------
    # V restricted angularly to the inner sphere of the shell
    sp_out = GridSphere(r_out, g.n_phi, g.n_theta)
    V_out = VectorField(sp_out, V.values.copy())
    e_v_out = tangential_energy(V_out, 1.0).total
    if e_v_out > 1.05 * e_bnd:
        flags.append(f"shell did not shrink the sphere energy: {e_v_out:.3f} vs {e_bnd:.3f}")
    phi_t = unwrap_sphere_phase(V_out)
    rho_t = V_out.modulus
    ann_rep, ann_eval = annulus_interpolation(rho_t, phi_t, sp_out, t, R_ref=R)

    sp_in = GridSphere(r_in, g.n_phi, g.n_theta)
    method = "grid" if ball_grid is not None else ("grid" if r_in <= 24 else "spectral")
    core_rep, core_eval = harmonic_phase_extension(
        phi_t, sp_in, method=method,
        h=(ball_grid.spacing if ball_grid is not None else None))

    total = shell + ann_rep.total + core_rep.energy
    report = CompetitorReport(
        total=total, shell=shell, annulus=ann_rep.total, core=core_rep.energy,
        boundary_energy=e_bnd, R=R, alpha=alpha, thickness=t,
        core_prefactor=core_rep.energy / (R * e_bnd) if e_bnd > 0 else 0.0,
        shell_cylinders=[{k: v for k, v in c.items() if k != "cyl"} for c in cylinders],
        shell_outside=shell_outside, map_distortions=distortions,
        inner_boundary_energy=e_v_out,
        phase_gradient=core_rep.boundary_gradient, flags=flags,
        annulus_pieces={
            "radial_modulus": ann_rep.radial_modulus,
            "tangential_modulus": ann_rep.tangential_modulus,
            "phase": ann_rep.phase,
            "potential": ann_rep.potential,
        },
    )

    if ball_grid is None:
        return None, report

    U = _materialize(u, V, ball_grid, fam, cylinders, ann_eval, core_eval,
                     phi_t, sp_in, r_in, r_out)
    report.ball_energy = gl_energy(U, 1.0).total
    return U, report


def _materialize(u, V, ball, fam, cylinders, ann_eval, phi_eval, phi_t, sp_in,
                 r_in, r_out):
    """Sample the three-region construction on a ball lattice."""
    g = u.grid
    R = g.radius
    pts = ball.points
    r = np.linalg.norm(pts, axis=-1)
    vals = np.zeros(ball.shape + (2,))
    m = ball.mask

    core = m & (r <= r_in)
    if core.any():
        if phi_eval is None:
            _, phi_eval = harmonic_phase_extension(phi_t, sp_in, method="grid",
                                                   h=ball.spacing)
        ph = phi_eval(pts[core])
        vals[core, 0] = np.cos(ph)
        vals[core, 1] = np.sin(ph)

    ann = m & (r > r_in) & (r <= r_out)
    if ann.any():
        vals[ann] = ann_eval(pts[ann])

    shell = m & (r > r_out)
    if shell.any():
        p = pts[shell]
        proj = p * (R / np.maximum(np.linalg.norm(p, axis=-1), 1e-300))[:, None]
        out = sphere_interp_xyz(u.values, g, proj)
        # overwrite nodes sitting over certified discs with the cylinder field
        for disc, cyl in zip(fam.discs, cylinders):
            Ucyl, smap, Q, rho_e = cyl["cyl"]
            ang = np.arccos(np.clip(proj @ disc.unit_center / R, -1, 1))
            sel = ang * R < disc.geodesic_radius
            if not sel.any():
                continue
            y = smap.inverse(p[sel] @ Q)
            y[:, 2] = np.clip(y[:, 2], 0.0, smap.H)
            rr = np.hypot(y[:, 0], y[:, 1])
            keep = rr <= rho_e
            coords = (Ucyl.grid.base.coords1d, Ucyl.grid.base.coords1d, Ucyl.grid.z)
            cvals = _cyl_interp(Ucyl.values, coords, y[keep])
            tmp = out[sel]
            tmp[keep] = cvals
            out[sel] = tmp
        vals[shell] = out
    return VectorField(ball, vals)


def _cyl_interp(values, coords, pts):
    """Trilinear interpolation on the cylinder's (x, y, z) product lattice."""
    out = np.empty((len(pts), 2))
    idx = []
    frac = []
    for d in range(3):
        c = coords[d]
        i = np.clip(np.searchsorted(c, pts[:, d]) - 1, 0, len(c) - 2)
        f = (pts[:, d] - c[i]) / (c[i + 1] - c[i])
        idx.append(i)
        frac.append(np.clip(f, 0.0, 1.0))
    out[:] = 0.0
    for dx in (0, 1):
        wx = frac[0] if dx else 1 - frac[0]
        for dy in (0, 1):
            wy = frac[1] if dy else 1 - frac[1]
            for dz in (0, 1):
                wz = frac[2] if dz else 1 - frac[2]
                w = (wx * wy * wz)[:, None]
                out += w * values[idx[0] + dx, idx[1] + dy, idx[2] + dz]
    return out
