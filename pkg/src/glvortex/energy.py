"""Ginzburg-Landau functionals, shell traces and the classical identity checks.

Conventions: E_eps(u; D) = int_D 1/2 |grad u|^2 + 1/(4 eps^2) (1 - |u|^2)^2,
with E = E_1.  On spheres the gradient is tangential.  The potential term
normalization 1/4 (1-|u|^2)^2 is fixed; no alternatives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    GridBall3D,
    GridSphere,
    VectorField,
    gradient,
    integrate,
    masked_gradient,
    restrict_to_sphere,
    tangential_gradient,
    trilinear,
)


@dataclass(frozen=True)
class EnergyBreakdown:
    """Dirichlet part, potential part and total over a region."""

    dirichlet: float
    potential: float
    eps: float
    region: str = ""

    @property
    def total(self) -> float:
        return self.dirichlet + self.potential


def potential_density(u: VectorField, eps: float) -> np.ndarray:
    m2 = u.values[..., 0] ** 2 + u.values[..., 1] ** 2
    return (1.0 - m2) ** 2 / (4.0 * eps**2)


def energy_density(u: VectorField, eps: float) -> np.ndarray:
    """Per-node density 1/2 |grad u|^2 + (1-|u|^2)^2/(4 eps^2)."""
    g = gradient(u)
    return 0.5 * np.sum(g**2, axis=(-2, -1)) + potential_density(u, eps)


def gl_energy(u: VectorField, eps: float, region=None, label: str = "") -> EnergyBreakdown:
    """Ginzburg-Landau energy of a field over its grid (or a sub-mask)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    g = gradient(u)
    dir_density = 0.5 * np.sum(g**2, axis=(-2, -1))
    d = integrate(dir_density, u.grid, region)
    p = integrate(potential_density(u, eps), u.grid, region)
    return EnergyBreakdown(d, p, eps, label)


def tangential_energy(u: VectorField, eps: float, region=None,
                      label: str = "") -> EnergyBreakdown:
    """E^(T): sphere energy built from tangential derivatives only."""
    if not isinstance(u.grid, GridSphere):
        raise TypeError("tangential_energy requires a sphere field")
    g = tangential_gradient(u)
    d = integrate(0.5 * np.sum(g**2, axis=(-2, -1)), u.grid, region)
    p = integrate(potential_density(u, eps), u.grid, region)
    return EnergyBreakdown(d, p, eps, label)


def weighted_energy(U: VectorField, eps: float, p: np.ndarray) -> float:
    """F_eps(U; D_1) = int 1/2|grad U|^2 + p(y)/(4 eps^2) (1-|U|^2)^2.

    Reduces to gl_energy total for p == 1; the weight must stay positive.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise ValueError("weight must be bounded below by a positive constant")
    g = gradient(U)
    dir_density = 0.5 * np.sum(g**2, axis=(-2, -1))
    return float(
        integrate(dir_density, U.grid) + integrate(p * potential_density(U, eps), U.grid)
    )


def masked_laplacian(values: np.ndarray, mask: np.ndarray, spacings) -> np.ndarray:
    """Second differences where both axis neighbors lie in the mask; zero at
    mask-edge nodes (the residual contract covers interior nodes only)."""
    ndim = mask.ndim
    trail = values.ndim - ndim
    out = np.zeros_like(values)
    interior = mask.copy()
    for ax in range(ndim):
        sl = [slice(None)] * ndim
        sl_p, sl_m = list(sl), list(sl)
        sl_p[ax], sl_m[ax] = slice(2, None), slice(None, -2)
        sl_c = list(sl)
        sl_c[ax] = slice(1, -1)
        ok = np.zeros_like(mask)
        ok[tuple(sl_c)] = mask[tuple(sl_p)] & mask[tuple(sl_m)]
        interior &= ok
        h2 = spacings[ax] ** 2
        lap = np.zeros_like(values)
        lap[tuple(sl_c)] = (
            values[tuple(sl_p)] - 2 * values[tuple(sl_c)] + values[tuple(sl_m)]
        ) / h2
        out += np.where(ok.reshape(mask.shape + (1,) * trail), lap, 0.0)
    return out * interior.reshape(mask.shape + (1,) * trail)


def gl_residual(u: VectorField, eps: float) -> np.ndarray:
    """Per-node field Delta u + (1/eps^2)(1-|u|^2) u, interior nodes only."""
    g = u.grid
    lap = masked_laplacian(u.values, g.mask, g.axes_spacing())
    m2 = u.values[..., 0] ** 2 + u.values[..., 1] ** 2
    res = lap + (1.0 - m2)[..., None] * u.values / eps**2
    interior = g.interior_mask if hasattr(g, "interior_mask") else g.mask
    return res * interior[..., None]


# ---------------------------------------------------------------------------
# shell traces
# ---------------------------------------------------------------------------

@dataclass
class ShellEnergyTrace:
    """Ordered samples (r, E(r), E'(r), e_T(r)) for a ball field.

    E'(r) is obtained by centered differencing of E(r) over the trace, so that
    e_T <= E' is testable against one integration scheme.
    """

    r: np.ndarray
    E: np.ndarray
    dE: np.ndarray
    eT: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.r) <= 0):
            raise ValueError("radii must be strictly increasing")

    def to_csv(self) -> str:
        lines = ["r,E,dE,eT"]
        for r, E, dE, eT in zip(self.r, self.E, self.dE, self.eT):
            lines.append(f"{r:.17g},{E:.17g},{dE:.17g},{eT:.17g}")
        return "\n".join(lines) + "\n"


def shell_trace(u: VectorField, eps: float, radii) -> ShellEnergyTrace:
    """Sample E(r), E'(r), e_T(r) over a range of radii of a ball field.

    E(r) uses partial-volume weights (linear ramp one cell wide at |x| = r) so
    the trace is smooth in r; e_T via trilinear restriction to S_r.
    """
    g = u.grid
    if not isinstance(g, GridBall3D):
        raise TypeError("shell_trace requires a ball field")
    radii = np.asarray(radii, dtype=float)
    dens = energy_density(u, eps)
    rr = np.sqrt(g.x**2 + g.y**2 + g.z**2)
    E = np.empty_like(radii)
    eT = np.empty_like(radii)
    for k, r in enumerate(radii):
        frac = np.clip((r - rr) / g.spacing + 0.5, 0.0, 1.0)
        E[k] = float(np.sum(dens * g.weights * frac))
        us = restrict_to_sphere(u, r)
        eT[k] = tangential_energy(us, eps).total
    dE = np.gradient(E, radii)
    return ShellEnergyTrace(radii, E, dE, eT)


def monotonicity_check(trace: ShellEnergyTrace, N: int, slack: float = 1e-3) -> list:
    """Violations of r -> E(r)/r^(N-2) nondecreasing, within relative slack.

    Returns a list of (r_prev, r_next, drop) triples; empty means monotone.
    """
    q = trace.E / trace.r ** (N - 2)
    qscale = float(np.max(np.abs(q))) + 1e-300
    out = []
    for i in range(len(q) - 1):
        if q[i + 1] < q[i] - slack * qscale:
            out.append((float(trace.r[i]), float(trace.r[i + 1]), float(q[i] - q[i + 1])))
    return out


# ---------------------------------------------------------------------------
# harmonic identities (interior vs boundary energies)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HarmonicIdentityReport:
    lhs: float          # int_{B_r} |grad w|^2
    rhs: float          # r/(N-1) int_{S_r} |grad_T w|^2
    pohozaev_defect: float
    radius: float
    laplace_residual: float

    @property
    def inequality_holds(self) -> bool:
        return self.lhs <= self.rhs * 1.05


def harmonic_identities(w: np.ndarray, grid: GridBall3D, r: float | None = None,
                        harmonic_tol: float | None = None) -> HarmonicIdentityReport:
    """Evaluate int_{B_r}|grad w|^2 <= r/(N-1) int_{S_r}|grad_T w|^2 and the
    Pohozaev identity (N-2) int |grad w|^2 = r int (|grad_T w|^2 - |d_n w|^2)
    for a scalar harmonic sample w on a ball grid.

    The check radius defaults to R - 3h so all interpolation stencils stay
    inside the mask.  harmonic_tol gates the discrete Laplace residual; the
    default allows the O(h^2) truncation of smooth data.
    """
    h = grid.spacing
    N = 3
    if r is None:
        r = grid.radius - 3 * h
    scale = float(np.max(np.abs(w))) + 1e-300
    lap = masked_laplacian(w, grid.mask, grid.axes_spacing())
    interior = grid.interior_mask
    res = float(np.max(np.abs(lap[interior]))) if interior.any() else 0.0
    if harmonic_tol is None:
        harmonic_tol = max(1e-8, 200.0 * h**2 * scale / min(grid.radius, 1.0) ** 4)
    if res > harmonic_tol:
        raise ValueError(f"w not harmonic to tolerance: residual {res} > {harmonic_tol}")

    grad = masked_gradient(w, grid.mask, grid.axes_spacing())
    rr = np.sqrt(grid.x**2 + grid.y**2 + grid.z**2)
    frac = np.clip((r - rr) / h + 0.5, 0.0, 1.0)
    lhs = float(np.sum(np.sum(grad**2, axis=-1) * grid.weights * frac))

    n_phi = max(32, int(np.ceil(np.pi * r / h)))
    sph = GridSphere(r, n_phi, 2 * n_phi)
    pts = sph.points
    gb = np.stack([trilinear(grad[..., k], grid.coords1d, pts) for k in range(3)], axis=-1)
    nrm = pts / r
    g_n = np.sum(gb * nrm, axis=-1)
    g2 = np.sum(gb**2, axis=-1)
    g_t2 = np.maximum(g2 - g_n**2, 0.0)
    bnd_t = integrate(g_t2, sph)
    bnd_n = integrate(g_n**2, sph)
    rhs = r / (N - 1) * bnd_t
    defect = (N - 2) * lhs - r * (bnd_t - bnd_n)
    return HarmonicIdentityReport(lhs, rhs, float(defect), float(r), res)
