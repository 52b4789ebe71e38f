"""Constants bookkeeping for the large-radius energy argument.

The lower-bound machinery trades a boundary energy premise for interior
growth through a chain of explicit constants: a good radius where the shell
derivative is controlled, a crossover radius r1 where two competing terms
balance, a threshold R1 tying two growth regimes together, and a final
threshold T past which a fifth-power volume bound beats a decaying error
term.  All of it is exact arithmetic on measured inputs; this module
evaluates the chain, back-substitutes every output into its defining
relation, and audits solver-produced energy traces against the discrete
differential inequality that drives the argument.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

import numpy as np

from .energy import ShellEnergyTrace

BALL_VOLUME = 4.0 * np.pi / 3.0


def default_eps_margin(gamma: float) -> float:
    """Midpoint feasibility of gamma + 3*eps < 2*pi."""
    return (2.0 * np.pi - gamma) / 6.0


@dataclass(frozen=True)
class CertificateParams:
    gamma: float
    delta: float
    sigma: float
    alpha: float
    C: float                     # measured constant of the shell bound
    eps_margin: float | None = None
    beta: float = 0.5
    lam: float = 0.5
    K: float = 1.0
    C_tilde: float = 10.0

    def __post_init__(self):
        if self.eps_margin is None:
            object.__setattr__(self, "eps_margin", default_eps_margin(self.gamma))
        e = self.eps_margin
        if not (self.gamma > 0 and self.gamma + 3 * e < 2 * np.pi):
            raise ValueError("need gamma + 3*eps_margin < 2*pi")
        for name in ("beta", "delta", "sigma", "alpha"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} = {v} outside (0, 1)")
        if self.gamma0 >= 2 * np.pi:
            raise ValueError("gamma0 = (gamma + 3 eps)/delta must stay below 2*pi")
        if self.C <= 0 or self.C_tilde <= 0 or self.K <= 0:
            raise ValueError("constants must be positive")
        if not 0.0 < self.lam <= 2 * self.K:
            raise ValueError("lam must lie in (0, 2K]")

    @property
    def gamma0(self) -> float:
        return (self.gamma + 3 * self.eps_margin) / self.delta


def pick_rho1(trace: ShellEnergyTrace, params: CertificateParams) -> float:
    """First sampled radius in [R^beta, R] with E'(rho) <= (gamma+eps) ln rho.

    The mean-value argument guarantees one exists whenever the trace honors
    the boundary premise E(R) <= gamma R ln R; if no sample qualifies we
    re-check the premise to tell a broken premise from coarse sampling.
    """
    r = np.asarray(trace.r, dtype=float)
    E = np.asarray(trace.E, dtype=float)
    dE = np.asarray(trace.dE, dtype=float)
    R = r[-1]
    lo = R**params.beta
    sel = (r >= lo) & (r > 1.0)
    thresh = (params.gamma + params.eps_margin) * np.log(r, where=r > 1,
                                                         out=np.zeros_like(r))
    ok = sel & (dE <= thresh)
    if not ok.any():
        if E[-1] > params.gamma * R * np.log(R):
            raise ValueError("premise E(R) <= gamma R ln R is violated")
        raise ValueError("no qualifying radius sampled; trace too coarse")
    return float(r[np.argmax(ok)])


def r1_constant(params: CertificateParams) -> float:
    """Crossover radius where (sigma gamma0) r = (sigma gamma0) delta^{1/sigma} r + C r^alpha."""
    sg = params.sigma * params.gamma0
    return (params.C / (sg * (1.0 - params.delta ** (1.0 / params.sigma)))) ** (
        1.0 / (1.0 - params.alpha))


def r1_balance_defect(r1: float, params: CertificateParams) -> float:
    """Relative defect of the balance relation at r1 (should be ~ 0)."""
    sg = params.sigma * params.gamma0
    lhs = sg * r1
    rhs = sg * params.delta ** (1.0 / params.sigma) * r1 + params.C * r1**params.alpha
    return abs(lhs - rhs) / abs(lhs)


def _branch(t: float, params: CertificateParams) -> float:
    b = params.beta
    return t ** (b * (1.0 / params.sigma - 1.0)) / np.log(t**b)


def R1_threshold(R0: float, params: CertificateParams) -> float:
    """Solve R0^{1/sigma - alpha} = R1^{beta(1/sigma - 1)} / ln(R1^beta).

    Bisection on the increasing branch of the right-hand side; the branch
    bottoms out where beta ln t = sigma/(1 - sigma), and a target below that
    minimum has no solution there.
    """
    if params.sigma >= 1.0:
        raise ValueError("needs sigma < 1")
    if R0 <= np.e:
        raise ValueError("R0 must exceed e")
    target = R0 ** (1.0 / params.sigma - params.alpha)
    t_min = np.exp(params.sigma / ((1.0 - params.sigma) * params.beta))
    if target < _branch(t_min, params):
        raise ValueError("target below the branch minimum; no solution")
    lo = t_min
    hi = max(2.0 * t_min, 4.0)
    while _branch(hi, params) < target:
        hi *= 2.0
        if hi > 1e300:
            raise OverflowError("R1 out of floating range")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _branch(mid, params) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def T_threshold(lam: float, alpha: float, K: float, C_tilde: float) -> float:
    """Smallest T on the decaying branch with lam^5 |B1| / (128 K^3) > C_tilde T^{alpha-1} ln T."""
    if not 0.0 < lam <= 2 * K:
        raise ValueError("lam must lie in (0, 2K]")
    if alpha >= 1.0:
        raise ValueError("needs alpha < 1")
    lhs = lam**5 * BALL_VOLUME / (128.0 * K**3)

    def rhs(t):
        return C_tilde * t ** (alpha - 1.0) * np.log(t)

    t_peak = np.exp(1.0 / (1.0 - alpha))
    if lhs > rhs(t_peak):
        return t_peak
    lo, hi = t_peak, 2.0 * t_peak
    while rhs(hi) >= lhs:
        hi *= 2.0
        if hi > 1e300:
            raise OverflowError("T out of floating range")
    for _ in range(100):
        mid = np.sqrt(lo * hi)
        if rhs(mid) >= lhs:
            lo = mid
        else:
            hi = mid
    while not rhs(hi) < lhs:
        hi *= 1.0 + 1e-12
    return hi


@dataclass
class DiffIneqViolation:
    r: float
    lhs: float
    rhs: float


def diff_ineq_check(trace: ShellEnergyTrace, sigma: float, alpha: float,
                    C: float, tol: float = 1e-9) -> list:
    """Discrete audit of (r^{-1/sigma} E(r))' >= -(C/sigma) r^{alpha-1-1/sigma} ln r.

    Consecutive trace samples are differenced; entries violating the bound
    beyond tol (scaled by the local magnitude) come back as a list, so an
    empty result means the trace is consistent with the mechanism at the
    measured constants.
    """
    r = np.asarray(trace.r, dtype=float)
    E = np.asarray(trace.E, dtype=float)
    q = r ** (-1.0 / sigma) * E
    out = []
    for i in range(len(r) - 1):
        rm = 0.5 * (r[i] + r[i + 1])
        lhs = (q[i + 1] - q[i]) / (r[i + 1] - r[i])
        rhs = -(C / sigma) * rm ** (alpha - 1.0 - 1.0 / sigma) * np.log(max(rm, 1.0))
        scale = max(abs(lhs), abs(rhs), 1e-300)
        if lhs < rhs - tol * scale:
            out.append(DiffIneqViolation(float(rm), float(lhs), float(rhs)))
    return out


@dataclass
class ConstantsChain:
    params: CertificateParams
    r0_measured: float
    M_measured: float
    r1: float = field(init=False)
    R0: float = field(init=False)
    R1: float = field(init=False)
    T: float = field(init=False)
    r1_defect: float = field(init=False)
    R1_defect: float = field(init=False)
    T_margin: float = field(init=False)

    def __post_init__(self):
        p = self.params
        self.r1 = r1_constant(p)
        self.r1_defect = r1_balance_defect(self.r1, p)
        self.R0 = max(self.r0_measured, self.r1, self.M_measured, np.e * 1.001)
        self.R1 = R1_threshold(self.R0, p)
        self.R1_defect = abs(_branch(self.R1, p)
                             - self.R0 ** (1.0 / p.sigma - p.alpha)) \
            / self.R0 ** (1.0 / p.sigma - p.alpha)
        self.T = T_threshold(p.lam, p.alpha, p.K, p.C_tilde)
        lhs = p.lam**5 * BALL_VOLUME / (128.0 * p.K**3)
        self.T_margin = lhs - p.C_tilde * self.T ** (p.alpha - 1.0) * np.log(self.T)

    def to_json(self) -> str:
        d = asdict(self)
        d["params"] = asdict(self.params)
        return json.dumps(d, indent=2, sort_keys=True)
