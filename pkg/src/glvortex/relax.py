"""Energy descent for the Ginzburg-Landau functional under Dirichlet data.

The solver is a damped gradient flow: the descent direction is the PDE
residual Delta u + (1/eps^2)(1 - |u|^2) u on free nodes, with an adaptive step
(backtrack on energy increase, gentle growth on success), so the energy is
nonincreasing across accepted steps.  Initialization smooths the radially
projected boundary data with Jacobi sweeps; random initializations are seeded.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .energy import EnergyBreakdown, gradient, integrate, potential_density
from .geometry import GridBall3D, GridDisc2D, VectorField, multilinear, trilinear


@dataclass
class SolveOptions:
    tol: float = 1e-3            # max-norm of the residual on free nodes
    max_iters: int = 20000
    check_every: int = 25        # energy/residual cadence
    n_init: int = 1              # extra seeded random inits; lowest energy kept
    init: str = "smooth"         # "smooth" | "random"
    jacobi_sweeps: int = 50
    cascade: bool = True         # coarse-to-fine initialization on disc/ball
    seed: int = 0

    def __post_init__(self):
        if self.tol <= 0 or self.max_iters < 1:
            raise ValueError("tol must be positive and max_iters >= 1")


@dataclass
class SolveReport:
    energy: EnergyBreakdown
    iterations: int
    residual: float
    wall_time: float
    min_modulus: float
    min_modulus_location: tuple
    center_modulus: float
    converged: bool


def _boundary_values(grid, g) -> np.ndarray:
    """Evaluate boundary data at every node via radial projection onto the
    boundary circle/sphere (only the boundary band values are ever pinned)."""
    pts = grid.points
    r = np.linalg.norm(pts, axis=-1, keepdims=True)
    proj = pts * (grid.radius / np.maximum(r, 1e-12))
    vals = np.asarray(g(proj), dtype=float)
    center = r[..., 0] < 1e-12
    if np.any(center):
        vals[center] = vals[~center][0]
    return vals


def _neighbor_average(vals: np.ndarray, mask: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(vals)
    cnt = np.zeros(mask.shape)
    for ax in range(mask.ndim):
        for step in (+1, -1):
            sl_src = [slice(None)] * mask.ndim
            sl_dst = [slice(None)] * mask.ndim
            if step > 0:
                sl_src[ax], sl_dst[ax] = slice(1, None), slice(None, -1)
            else:
                sl_src[ax], sl_dst[ax] = slice(None, -1), slice(1, None)
            sd, ss = tuple(sl_dst), tuple(sl_src)
            acc[sd] += vals[ss] * mask[ss][..., None]
            cnt[sd] += mask[ss]
    cnt = np.maximum(cnt, 1.0)
    return acc / cnt[..., None]


def _inner_laplacian(u: np.ndarray, out: np.ndarray, spacings) -> None:
    """Plain second differences on the interior box of the array (free nodes
    always have all lattice neighbors inside the mask)."""
    ndim = len(spacings)
    inner = tuple(slice(1, -1) for _ in range(ndim))
    acc = out[inner]
    acc[...] = 0.0
    for ax in range(ndim):
        sl_p = [slice(1, -1)] * ndim
        sl_m = [slice(1, -1)] * ndim
        sl_p[ax] = slice(2, None)
        sl_m[ax] = slice(None, -2)
        acc += (u[tuple(sl_p)] + u[tuple(sl_m)] - 2.0 * u[inner]) / spacings[ax] ** 2


def _descent(grid, bc_vals, eps, opts, weight=None, u0=None, rng=None):
    """Core damped gradient flow; returns (values, iterations, residual,
    converged, energy_total)."""
    mask = grid.mask
    free = mask & ~grid.boundary_band
    h = min(grid.axes_spacing())
    ndim = mask.ndim
    w_pot = None if weight is None else np.asarray(weight, dtype=float)

    if u0 is None:
        u = bc_vals.copy()
        if rng is not None:
            u = u + 0.5 * rng.standard_normal(u.shape)
            u[grid.boundary_band] = bc_vals[grid.boundary_band]
        for _ in range(opts.jacobi_sweeps):
            avg = _neighbor_average(u, mask)
            u[free] = avg[free]
    else:
        u = u0.copy()
        u[grid.boundary_band] = bc_vals[grid.boundary_band]
    u[~mask] = bc_vals[~mask]

    def energy_of(vals):
        # A diverged iterate scores +inf so the caller snaps back and
        # halves the step instead of propagating non-finite values.
        if not np.all(np.isfinite(vals)):
            return np.inf
        f = VectorField(grid, vals)
        gr = gradient(f)
        dens = 0.5 * np.sum(gr**2, axis=(-2, -1)) + (
            potential_density(f, eps) if w_pot is None
            else w_pot * potential_density(f, eps)
        )
        return integrate(dens, grid)

    tau_max = min(h**2 / (2 * ndim), eps**2 / 2)
    tau = tau_max / 2
    freec = free[..., None].astype(float)
    spacings = grid.axes_spacing()
    inv_eps2 = 1.0 / eps**2
    lap = np.zeros_like(u)
    E = energy_of(u)
    snap_u, snap_E = u.copy(), E
    it = 0
    res_norm = np.inf
    converged = False
    while it < opts.max_iters:
        steps = min(opts.check_every, opts.max_iters - it)
        # Overflow inside the step window is tolerated: the energy check
        # below snaps back to the last good iterate and halves the step.
        with np.errstate(over="ignore", invalid="ignore"):
            for _ in range(steps):
                _inner_laplacian(u, lap, spacings)
                m2 = u[..., 0] ** 2 + u[..., 1] ** 2
                react = (1.0 - m2) * inv_eps2
                if w_pot is not None:
                    react = react * w_pot
                r = lap + react[..., None] * u
                u = u + (tau * r) * freec
        it += steps
        E_new = energy_of(u)
        if not np.isfinite(E_new) or E_new > E + 1e-12 * (1 + abs(E)):
            u, E = snap_u.copy(), snap_E
            tau *= 0.5
            if tau < 1e-6 * tau_max:
                break
            continue
        snap_u, snap_E = u.copy(), E_new
        E = E_new
        tau = min(tau * 1.1, tau_max)
        res_norm = float(np.max(np.abs(r[free]))) if np.any(free) else 0.0
        if res_norm <= opts.tol:
            converged = True
            break
    return u, it, res_norm, converged, E


def _report(grid, u, eps, it, res, t0, converged, weight=None) -> tuple:
    f = VectorField(grid, u)
    gr = gradient(f)
    dens_d = 0.5 * np.sum(gr**2, axis=(-2, -1))
    pot = potential_density(f, eps)
    if weight is not None:
        pot = pot * weight
    eb = EnergyBreakdown(integrate(dens_d, grid), integrate(pot, grid), eps)
    mod = np.where(grid.mask, f.modulus, np.inf)
    loc = np.unravel_index(int(np.argmin(mod)), mod.shape)
    if isinstance(grid, GridBall3D):
        c = trilinear(u, grid.coords1d, np.zeros(3))
        center_mod = float(np.hypot(c[0], c[1]))
    else:
        ic = tuple(s // 2 for s in grid.shape)
        center_mod = float(np.hypot(u[ic][0], u[ic][1]))
    rep = SolveReport(eb, it, res, time.time() - t0, float(mod[loc]),
                      loc, center_mod, converged)
    return f, rep


def _cascade_init(grid, g, eps, opts) -> np.ndarray | None:
    """Coarse-to-fine initialization: solve on 4h and 2h lattices, then
    interpolate onto the target grid (low modes converge cheaply there)."""
    u_prev, prev_grid = None, None
    for fac in (4, 2):
        h_c = grid.spacing * fac
        if grid.radius / h_c < 6 or h_c >= eps * 4:
            continue
        cg = type(grid)(grid.radius, h_c)
        bc = _boundary_values(cg, g)
        u0v = None
        if u_prev is not None:
            u0v = multilinear(u_prev, prev_grid.coords1d, cg.points)
        sub = SolveOptions(tol=opts.tol, max_iters=min(opts.max_iters, 3000),
                           check_every=opts.check_every, cascade=False,
                           jacobi_sweeps=opts.jacobi_sweeps, seed=opts.seed)
        u_prev = _descent(cg, bc, eps, sub, u0=u0v)[0]
        prev_grid = cg
    if u_prev is None:
        return None
    return multilinear(u_prev, prev_grid.coords1d, grid.points)


def minimize_dirichlet(grid, g, eps: float, opts: SolveOptions | None = None,
                       u0: VectorField | None = None):
    """Minimize E_eps over the grid with Dirichlet data g on the boundary band.

    g is a callable mapping boundary points (..., dim) -> values (..., 2).
    Returns (VectorField, SolveReport); a non-converged run returns the best
    iterate with converged=False.
    """
    opts = opts or SolveOptions()
    t0 = time.time()
    bc = _boundary_values(grid, g)
    rng = np.random.default_rng(opts.seed)
    best = None
    smooth0 = None
    if u0 is None and opts.cascade and isinstance(grid, (GridDisc2D, GridBall3D)):
        smooth0 = _cascade_init(grid, g, eps, opts)
    inits = [smooth0] if u0 is None else [u0.values]
    if opts.init == "random":
        inits = ["rng"] * max(opts.n_init, 1)
    elif opts.n_init > 1 and u0 is None:
        inits = [smooth0] + ["rng"] * (opts.n_init - 1)
    for kind in inits:
        u_start = kind if isinstance(kind, np.ndarray) else None
        use_rng = rng if isinstance(kind, str) and kind == "rng" else None
        out = _descent(grid, bc, eps, opts, u0=u_start, rng=use_rng)
        if best is None or out[4] < best[4]:
            best = out
    u, it, res, converged, _ = best
    return _report(grid, u, eps, it, res, t0, converged)


def minimize_weighted(p: np.ndarray, g, eps: float,
                      opts: SolveOptions | None = None,
                      grid: GridDisc2D | None = None,
                      u0: VectorField | None = None):
    """Minimize the weighted energy F_eps (weight p on the potential term) on
    the unit disc; same contracts as minimize_dirichlet."""
    opts = opts or SolveOptions()
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise ValueError("weight must stay positive")
    if grid is None:
        n = p.shape[0]
        grid = GridDisc2D(1.0, 2.0 / (n - 1))
    t0 = time.time()
    bc = _boundary_values(grid, g)
    out = _descent(grid, bc, eps, opts, weight=p,
                   u0=None if u0 is None else u0.values)
    u, it, res, converged, _ = out
    return _report(grid, u, eps, it, res, t0, converged, weight=p)


@dataclass
class EtaSweepRow:
    eps: float
    energy: float
    energy_ratio: float          # E_eps / |ln eps|
    center_modulus: float
    premise_holds: bool          # E <= gamma |ln eps|
    converged: bool


def eta_sweep(g, eps_list, gamma: float, grid,
              opts: SolveOptions | None = None, keep_fields: bool = False):
    """Minimize for each eps (decreasing) and tabulate E, E/|ln eps|, |u(0)|,
    flagging rows where the energy premise E <= gamma |ln eps| holds.
    With keep_fields the minimizers come back alongside the table."""
    eps_list = list(eps_list)
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be decreasing")
    rows = []
    fields = []
    for eps in eps_list:
        f, rep = minimize_dirichlet(grid, g, eps, opts)
        ratio = rep.energy.total / abs(np.log(eps))
        rows.append(EtaSweepRow(eps, rep.energy.total, ratio,
                                rep.center_modulus, ratio <= gamma, rep.converged))
        if keep_fields:
            fields.append(f)
    return (rows, fields) if keep_fields else rows


def sweep_to_csv(rows: list[EtaSweepRow]) -> str:
    lines = ["eps,E,Eratio,u0"]
    for r in rows:
        lines.append(f"{r.eps:.17g},{r.energy:.17g},{r.energy_ratio:.17g},"
                     f"{r.center_modulus:.17g}")
    return "\n".join(lines) + "\n"
