"""Bad-disc location and ball growth on the sphere, with certification.

Pipeline: rescale S_R data to the unit sphere with eps = 1/R, cover the set
{|v| <= 1 - delta} by disjoint geodesic discs of radius >= Lambda*eps, grow
the family (radius sum multiplied by e^t, merges conserve the sum), pick a
stopping time at which the radius-weighted boundary-energy functional is
small, rescale back and certify the five disc conditions (modulus floor,
radius-sum bound, per-disc circle energy, zero degrees, radius floor).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .energy import tangential_energy
from .geometry import (
    GridSphere,
    SphericalDisc,
    VectorField,
    circle_points,
    geodesic_distance,
    sphere_interp_xyz,
    sphere_tangential_gradient,
)
from .topology import degree_on_sphere


class PoleContactError(ValueError):
    """The bad set touches a pole cap; rotate the data first."""


class CoverageError(RuntimeError):
    """The bad set cannot be covered within a quarter circumference."""


class GrowthRangeError(RuntimeError):
    """Ball growth left the small-disc regime (radius sum > pi/2 * R)."""


class NoAdmissibleTimeError(RuntimeError):
    """No sampled growth time satisfies the boundary-energy bound."""

    def __init__(self, msg, best_time=None, best_value=None):
        super().__init__(msg)
        self.best_time = best_time
        self.best_value = best_value


@dataclass
class DiscFamily:
    """Disjoint family of geodesic discs with optional certified degrees."""

    discs: list
    disjoint: bool = True
    degrees: list | None = None

    @property
    def r_tot(self) -> float:
        return float(sum(d.geodesic_radius for d in self.discs))

    def __len__(self) -> int:
        return len(self.discs)

    def check_disjoint(self) -> bool:
        R = self.discs[0].sphere_radius if self.discs else 1.0
        for i in range(len(self.discs)):
            for j in range(i + 1, len(self.discs)):
                a, b = self.discs[i], self.discs[j]
                d = geodesic_distance(a.center, b.center, R)
                if d <= a.geodesic_radius + b.geodesic_radius - 1e-12 * R:
                    return False
        return True

    def covers(self, pts: np.ndarray) -> np.ndarray:
        """Boolean mask: point (unit direction * R) inside some disc."""
        R = self.discs[0].sphere_radius if self.discs else 1.0
        inside = np.zeros(pts.shape[:-1], dtype=bool)
        for d in self.discs:
            cosd = pts @ d.unit_center / R
            gd = R * np.arccos(np.clip(cosd, -1, 1))
            inside |= gd <= d.geodesic_radius
        return inside

    def scaled(self, factor: float) -> "DiscFamily":
        return DiscFamily(
            [SphericalDisc(d.center * factor, d.geodesic_radius * factor)
             for d in self.discs],
            self.disjoint, self.degrees,
        )


@dataclass
class GrowthTrace:
    """Sampled growth times with family snapshots and the boundary-energy
    functional sum_i rho_i * dF/dr(x_i, rho_i)."""

    times: list = field(default_factory=list)
    families: list = field(default_factory=list)
    functionals: list = field(default_factory=list)

    def record(self, t, fam, val):
        self.times.append(float(t))
        self.families.append(fam)
        self.functionals.append(float(val))

    def to_json(self) -> str:
        payload = []
        for t, fam, val in zip(self.times, self.families, self.functionals):
            payload.append({
                "t": t,
                "functional": val,
                "discs": [
                    {"center": list(np.round(d.center, 15)),
                     "radius": d.geodesic_radius,
                     "degree": None if fam.degrees is None else fam.degrees[i]}
                    for i, d in enumerate(fam.discs)
                ],
            })
        return json.dumps(payload, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# circle energies
# ---------------------------------------------------------------------------

def energy_density_sphere(v: VectorField, eps: float) -> np.ndarray:
    g = sphere_tangential_gradient(v.values, v.grid)
    m2 = v.values[..., 0] ** 2 + v.values[..., 1] ** 2
    return 0.5 * np.sum(g**2, axis=(-2, -1)) + (1 - m2) ** 2 / (4 * eps**2)


def circle_energy(v: VectorField, eps: float, disc: SphericalDisc,
                  density: np.ndarray | None = None, n: int | None = None) -> float:
    """Line integral of the tangential energy density along the boundary
    circle of a geodesic disc (this is dF/dr of the disc energy)."""
    g = v.grid
    if density is None:
        density = energy_density_sphere(v, eps)
    R = g.radius
    perim = 2 * np.pi * R * np.sin(disc.geodesic_radius / R)
    if n is None:
        n = max(64, int(np.ceil(4 * perim / (R * min(g.dphi, g.dtheta)))))
    pts = circle_points(disc, n)
    dens = sphere_interp_xyz(density, g, pts)
    return float(np.mean(dens[:-1]) * perim)


# ---------------------------------------------------------------------------
# initial cover
# ---------------------------------------------------------------------------

def _slerp(a: np.ndarray, b: np.ndarray, t: float) -> np.ndarray:
    """Spherical interpolation between two points of equal norm."""
    R = np.linalg.norm(a)
    ua, ub = a / R, b / R
    ang = np.arccos(np.clip(np.dot(ua, ub), -1, 1))
    if ang < 1e-14:
        return a.copy()
    w = (np.sin((1 - t) * ang) * ua + np.sin(t * ang) * ub) / np.sin(ang)
    return R * w / np.linalg.norm(w)


def merge_discs(a: SphericalDisc, b: SphericalDisc) -> SphericalDisc:
    """Replace two intersecting discs by one of radius r_a + r_b centered at
    the point dividing the geodesic in proportion to the radii (conserves the
    radius sum; containment is asserted by tests in the small-disc regime)."""
    R = a.sphere_radius
    ra, rb = a.geodesic_radius, b.geodesic_radius
    d = geodesic_distance(a.center, b.center, R)
    t = 0.0 if d == 0 else min(rb / (ra + rb), 1.0)
    c = _slerp(a.center, b.center, t)
    return SphericalDisc(c, ra + rb)


def _merge_overlaps(discs: list) -> list:
    discs = list(discs)
    changed = True
    while changed:
        changed = False
        R = discs[0].sphere_radius if discs else 1.0
        for i in range(len(discs)):
            for j in range(i + 1, len(discs)):
                a, b = discs[i], discs[j]
                if geodesic_distance(a.center, b.center, R) <= (
                        a.geodesic_radius + b.geodesic_radius):
                    merged = merge_discs(a, b)
                    discs = [d for k, d in enumerate(discs) if k not in (i, j)]
                    discs.append(merged)
                    changed = True
                    break
            if changed:
                break
    return discs


def initial_cover(v: VectorField, eps: float, delta: float,
                  Lambda: float) -> DiscFamily:
    """Cover {|v| <= 1 - delta} by disjoint geodesic discs of radius >=
    Lambda * eps: connected components of the sublevel node set, each enclosed
    in a geodesic disc, clamped up and merged until disjoint."""
    g = v.grid
    if not isinstance(g, GridSphere):
        raise TypeError("initial_cover requires a sphere field")
    if not (0 < delta < 1 / 8 + 1e-12):
        raise ValueError("delta must lie in (0, 1/8)")
    if Lambda * eps < g.radius * g.dphi:
        raise ValueError("Lambda*eps below grid resolution")
    bad = v.modulus <= 1 - delta
    if not bad.any():
        return DiscFamily([], True)
    if bad[0].any() or bad[-1].any():
        raise PoleContactError("bad set touches a pole cap; rotate data first")
    # connected components with longitude wrap
    lab, nlab = ndimage.label(bad)
    for i in range(bad.shape[0]):
        if bad[i, 0] and bad[i, -1] and lab[i, 0] != lab[i, -1]:
            lab[lab == lab[i, -1]] = lab[i, 0]
    pts = g.points
    gap = g.radius * max(g.dphi, g.dtheta)
    discs = []
    for lb in np.unique(lab[lab > 0]):
        nodes = pts[lab == lb]
        c = nodes.mean(axis=0)
        c = g.radius * c / np.linalg.norm(c)
        cosd = np.clip(nodes @ (c / g.radius) / g.radius, -1, 1)
        rad = float(np.max(g.radius * np.arccos(cosd))) + gap
        rad = max(rad, Lambda * eps)
        discs.append(SphericalDisc(c, rad))
    discs = _merge_overlaps(discs)
    fam = DiscFamily(discs, True)
    if fam.r_tot > 0.25 * 2 * np.pi * g.radius:
        raise CoverageError(
            f"bad set too energetic: r_tot {fam.r_tot} exceeds a quarter circumference")
    return fam


# ---------------------------------------------------------------------------
# ball growth
# ---------------------------------------------------------------------------

def grow(family: DiscFamily, t: float) -> DiscFamily:
    """Grow a disjoint family to time t: every radius sum is multiplied by
    e^t exactly; tangent discs merge (radius-sum conserving) along the way."""
    if t < 0:
        raise ValueError("growth time must be nonnegative")
    discs = list(family.discs)
    if not discs:
        return DiscFamily([], True)
    R = discs[0].sphere_radius
    discs = _merge_overlaps(discs)
    remaining = float(np.exp(t))
    while len(discs) > 1:
        lam_min, pair = np.inf, None
        for i in range(len(discs)):
            for j in range(i + 1, len(discs)):
                a, b = discs[i], discs[j]
                d = geodesic_distance(a.center, b.center, R)
                lam = d / (a.geodesic_radius + b.geodesic_radius)
                if lam < lam_min:
                    lam_min, pair = lam, (i, j)
        if lam_min >= remaining:
            break
        scale = max(lam_min, 1.0)
        discs = [SphericalDisc(d.center, d.geodesic_radius * scale) for d in discs]
        remaining /= scale
        i, j = pair
        merged = merge_discs(discs[i], discs[j])
        discs = [d for k, d in enumerate(discs) if k not in (i, j)]
        discs.append(merged)
        discs = _merge_overlaps(discs)
    discs = [SphericalDisc(d.center, d.geodesic_radius * remaining) for d in discs]
    out = DiscFamily(discs, True)
    if out.r_tot > np.pi / 2 * R:
        raise GrowthRangeError(
            f"radius sum {out.r_tot} exceeds pi/2 * R; growth left the small-disc regime")
    return out


def select_time(v: VectorField, family: DiscFamily, eps: float, gamma: float,
                n_times: int = 64, slack: float = 0.10):
    """Discrete Fubini step: sample log-spaced times in (0, s] with
    s = (2pi + gamma)/(4pi) |ln eps| and return the earliest time where
    sum_i rho_i * (circle energy) falls under 2pi * 2 gamma/(gamma+2pi)
    (with grid slack).  Growth only inflates the radius sum, so the first
    admissible time keeps the family smallest.  Returns (t*, family at t*,
    GrowthTrace)."""
    if gamma >= 2 * np.pi:
        raise ValueError("gamma must be < 2 pi")
    trace = GrowthTrace()
    if len(family) == 0:
        return 0.0, family, trace
    s = (2 * np.pi + gamma) / (4 * np.pi) * abs(np.log(eps))
    bound = 2 * np.pi * (2 * gamma / (gamma + 2 * np.pi))
    density = energy_density_sphere(v, eps)
    times = np.geomspace(s * 1e-3, s, n_times)
    best_t, best_val = None, np.inf
    for t in times:
        try:
            fam = grow(family, t)
        except GrowthRangeError:
            break
        val = sum(
            d.geodesic_radius * circle_energy(v, eps, d, density=density)
            for d in fam.discs
        )
        trace.record(t, fam, val)
        if val < best_val:
            best_t, best_val = t, val
        if val <= bound * (1 + slack):
            return float(t), fam, trace
    raise NoAdmissibleTimeError(
        f"no sampled time meets the bound {bound:.4f} (best {best_val:.4f})",
        best_time=best_t, best_value=best_val)


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------

@dataclass
class DiscCertificate:
    modulus_floor: bool          # |u| > 7/8 off the union
    radius_sum: bool             # sum r_i <= R^alpha
    circle_energy: bool          # E^(T)(u, bd D_i) <= 2pi/r_i per disc
    degrees_zero: bool           # deg(u, bd D_i) = 0 per disc
    radius_floor: bool           # r_i >= Lambda per disc
    alpha: float
    margins: dict

    @property
    def all_pass(self) -> bool:
        return (self.modulus_floor and self.radius_sum and self.circle_energy
                and self.degrees_zero and self.radius_floor)


def certify(u: VectorField, family: DiscFamily, gamma: float, Lambda: float,
            alpha: float, circle_slack: float = 0.10) -> DiscCertificate:
    """Check the five disc conditions on S_R with measured margins."""
    g = u.grid
    R = g.radius
    pts = g.points
    if len(family) == 0:
        min_mod = float(np.min(u.modulus))
        return DiscCertificate(min_mod > 7 / 8, True, True, True, True, alpha,
                               {"min_modulus_outside": min_mod, "r_tot": 0.0,
                                "degrees": [], "circle_energies": [],
                                "sum_deg": 0, "sum_deg_sq": 0})
    outside = ~family.covers(pts)
    min_mod = float(np.min(u.modulus[outside])) if outside.any() else np.inf
    r_tot = family.r_tot
    degs, circ = [], []
    density = energy_density_sphere(u, 1.0)
    for d in family.discs:
        degs.append(degree_on_sphere(u, d))
        circ.append(circle_energy(u, 1.0, d, density=density))
    family.degrees = degs
    circle_ok = all(
        c <= (2 * np.pi / d.geodesic_radius) * (1 + circle_slack)
        for c, d in zip(circ, family.discs)
    )
    margins = {
        "min_modulus_outside": min_mod,
        "r_tot": r_tot,
        "radius_sum_budget": R**alpha,
        "circle_energies": circ,
        "circle_budgets": [2 * np.pi / d.geodesic_radius for d in family.discs],
        "degrees": degs,
        "sum_deg": int(sum(degs)),
        "sum_deg_sq": int(sum(x * x for x in degs)),
    }
    return DiscCertificate(
        modulus_floor=min_mod > 7 / 8,
        radius_sum=r_tot <= R**alpha,
        circle_energy=circle_ok,
        degrees_zero=all(x == 0 for x in degs),
        radius_floor=all(d.geodesic_radius >= Lambda * (1 - 1e-12)
                         for d in family.discs),
        alpha=alpha,
        margins=margins,
    )


def default_delta(gamma: float) -> float:
    """delta = min(1/8, delta_0(gamma))/2 with delta_0 the closed-form root of
    2/(1-delta)^2 * 2 gamma/(gamma + 2pi) = 2."""
    delta0 = 1.0 - np.sqrt(2 * gamma / (gamma + 2 * np.pi))
    return min(1 / 8, delta0) / 2


def bad_disc_pipeline(u: VectorField, gamma: float, Lambda: float,
                      delta: float | None = None, n_times: int = 64):
    """Full pipeline on S_R data: rescale to the unit sphere with eps = 1/R,
    cover, grow, select a time and certify back on S_R.

    Returns (DiscFamily on S_R, DiscCertificate, info dict)."""
    g = u.grid
    if not isinstance(g, GridSphere):
        raise TypeError("pipeline requires a sphere field")
    R = g.radius
    if R <= 1:
        raise ValueError("pipeline requires R > 1")
    eT = tangential_energy(u, 1.0).total
    premise = eT <= gamma * np.log(R)
    eps = 1.0 / R
    v = VectorField(GridSphere(1.0, g.n_phi, g.n_theta), u.values)
    if delta is None:
        delta = default_delta(gamma)
    fam0 = initial_cover(v, eps, delta, Lambda)
    t_star, fam1, trace = select_time(v, fam0, eps, gamma, n_times=n_times)
    alpha_tilde = (2 * np.pi - gamma) / (8 * np.pi)
    alpha = 1 - alpha_tilde
    fam_R = fam1.scaled(R)
    cert = certify(u, fam_R, gamma, Lambda, alpha)
    info = {
        "premise_holds": bool(premise),
        "tangential_energy": eT,
        "gamma_ln_R": gamma * np.log(R),
        "eps": eps,
        "delta": delta,
        "r0": fam0.r_tot,
        "t_star": t_star,
        "alpha": alpha,
        "alpha_tilde": alpha_tilde,
        "trace": trace,
    }
    return fam_R, cert, info
