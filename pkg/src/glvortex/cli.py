"""Batch experiment runner.

Thin plumbing over the library: named experiments with a JSON config, a
schema gate that rejects unknown keys before any computation, deterministic
CSV/JSON outputs, and a manifest recording the config hash, package
versions, seed, and wall times.  Exit codes: 0 success, 1 experiment
failure, 2 config error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np


def _fmt(x) -> str:
    return "%.17g" % float(x)


def _json_default(o):
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    return float(o)


# ---------------------------------------------------------------------------
# config schema
# ---------------------------------------------------------------------------

# per-experiment parameter blocks: name -> (type, default)
SCHEMAS = {
    "growth-rate": {
        "radii": (list, [25.0, 50.0, 100.0, 200.0]),
    },
    "eta-sweep": {
        "eps_list": (list, [0.2, 0.1, 0.05]),
        "gamma": (float, 2.0),
        "n": (int, 97),
        "mode": (str, "vortex"),          # vortex | constant | degree0
        "save_fields": (bool, False),
    },
    "prop13": {
        "log_radii": (list, [4.0, 5.0, 6.0]),
        "gamma": (float, 5.0),
        "Lambda": (float, 1.0),
        "alpha": (float, 0.6),
        "separation_exponent": (float, 0.5),
        "max_n_phi": (int, 2048),
        "compare_minimizer": (bool, False),
    },
    "ballgrowth": {
        "log_radius": (float, 4.0),
        "gamma": (float, 5.0),
        "Lambda": (float, 1.0),
        "separation_exponent": (float, 0.7),
        "n_phi": (int, 768),
    },
    "certify": {
        "gamma": (float, 5.0),
        "delta": (float, 0.9),
        "sigma": (float, 0.66),
        "alpha": (float, 0.85),
        "C": (float, 10.0),
        "eps_margin": (float, None),
        "beta": (float, 0.5),
        "lam": (float, 0.5),
        "K": (float, 1.0),
        "C_tilde": (float, 10.0),
        "r0": (float, 12.0),
        "M": (float, 30.0),
    },
    "identities": {
        "n": (int, 33),
        "n_random": (int, 10),
        "max_degree": (int, 4),
    },
}

EXPERIMENTS = {
    "growth-rate": "slab-reduced energy of the straight vortex line vs a R ln R + b R",
    "eta-sweep": "minimize on the unit ball over an epsilon list; center modulus vs energy ratio",
    "prop13": "dipole competitor decomposition across radii with exponent fit",
    "ballgrowth": "cover, grow and certify small discs on dipole sphere data",
    "certify": "closed-form constants chain with back-substitution defects",
    "identities": "harmonic boundary identities and their lattice defects",
}


def validate_config(cfg: dict) -> list[str]:
    """Schema plus cross-field constraints; returns a list of error strings."""
    errors = []
    if not isinstance(cfg, dict):
        return ["config must be a JSON object"]
    name = cfg.get("experiment")
    if name not in SCHEMAS:
        return [f"unknown experiment {name!r}; choices: {sorted(SCHEMAS)}"]
    allowed = set(SCHEMAS[name]) | {"experiment", "seed", "out"}
    for key in cfg:
        if key not in allowed:
            errors.append(f"unknown key {key!r} for experiment {name!r}")
    params = resolved_params(cfg)
    for key, (typ, _) in SCHEMAS[name].items():
        v = params[key]
        if v is None:
            continue
        if typ in (float, int) and not isinstance(v, (int, float)):
            errors.append(f"{key} must be a number")
        elif typ is list and not isinstance(v, list):
            errors.append(f"{key} must be a list")
        elif typ is str and not isinstance(v, str):
            errors.append(f"{key} must be a string")
        elif typ is bool and not isinstance(v, bool):
            errors.append(f"{key} must be a boolean")
    if errors:
        return errors

    g = params.get("gamma")
    if name in ("prop13", "ballgrowth") and g is not None and g >= 2 * np.pi:
        errors.append(f"gamma = {g} violates gamma < 2*pi (disc selection premise)")
    if name == "certify":
        eps = params["eps_margin"]
        if eps is None:
            eps = (2 * np.pi - g) / 6.0
        if g + 3 * eps >= 2 * np.pi:
            errors.append(f"gamma + 3*eps_margin = {g + 3 * eps:.4f} violates the < 2*pi constraint")
        for k in ("delta", "sigma", "alpha", "beta"):
            if not 0 < params[k] < 1:
                errors.append(f"{k} must lie in (0, 1)")
    if name == "ballgrowth":
        R = float(np.exp(params["log_radius"]))
        h = np.pi * R / params["n_phi"]
        if params["Lambda"] < 4 * h:
            errors.append(
                f"Lambda*eps = {params['Lambda']:.3g} below 4h = {4 * h:.3g}: "
                "disc cover unresolvable at this grid")
    if name == "eta-sweep":
        eps = params["eps_list"]
        if sorted(eps, reverse=True) != list(eps):
            errors.append("eps_list must be strictly decreasing")
        if params["mode"] not in ("vortex", "constant", "degree0"):
            errors.append("mode must be vortex | constant | degree0")
    return errors


def resolved_params(cfg: dict) -> dict:
    name = cfg["experiment"]
    out = {}
    for key, (_, default) in SCHEMAS[name].items():
        out[key] = cfg.get(key, default)
    return out


# ---------------------------------------------------------------------------
# experiment bodies: each returns {filename: text or bytes}
# ---------------------------------------------------------------------------

def _run_growth_rate(p: dict, seed: int) -> dict:
    from .profile import solve_profile, growth_rate
    prof = solve_profile()
    fit = growth_rate(p["radii"], prof)
    lines = ["R,E,ratio"]
    for R, E, q in zip(fit.radii, fit.energies, fit.ratios):
        lines.append(f"{_fmt(R)},{_fmt(E)},{_fmt(q)}")
    report = {
        "a": fit.a, "b": fit.b, "a_over_2pi": fit.a / (2 * np.pi),
        "fit_residual": fit.fit_residual, "slope0": prof.slope0,
    }
    return {"growth.csv": "\n".join(lines) + "\n",
            "report.json": json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"}


def _run_eta_sweep(p: dict, seed: int) -> dict:
    from .geometry import GridBall3D, save_field
    from .relax import eta_sweep, sweep_to_csv, SolveOptions
    from .fields import boundary_vortex_line, boundary_degree_zero, boundary_constant
    mode = p["mode"]
    g = {"vortex": boundary_vortex_line,
         "degree0": boundary_degree_zero,
         "constant": boundary_constant}[mode]
    grid = GridBall3D(1.0, 2.0 / (p["n"] - 1))
    opts = SolveOptions(seed=seed)
    rows, fields = eta_sweep(g, p["eps_list"], p["gamma"], grid,
                             opts=opts, keep_fields=True)
    out = {"sweep.csv": sweep_to_csv(rows)}
    report = [{"eps": r.eps, "energy": r.energy, "energy_ratio": r.energy_ratio,
               "center_modulus": r.center_modulus, "premise_holds": r.premise_holds,
               "converged": r.converged} for r in rows]
    out["report.json"] = json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"
    if p["save_fields"]:
        import tempfile
        for r, f in zip(rows, fields):
            with tempfile.NamedTemporaryFile(suffix=".glf", delete=False) as tmp:
                save_field(tmp.name, f)
            with open(tmp.name, "rb") as fh:
                out[f"field_eps_{r.eps:g}.glf"] = fh.read()
            os.unlink(tmp.name)
    return out


def _run_prop13(p: dict, seed: int) -> dict:
    from .geometry import GridSphere, GridBall3D, sphere_interp_xyz
    from .fields import make_dipole
    from .relax import minimize_dirichlet, SolveOptions
    from .construct import competitor
    reports = []
    for lr in p["log_radii"]:
        R = float(np.exp(lr))
        n_phi = min(p["max_n_phi"], max(384, int(np.pi * R / 0.5)))
        g = GridSphere(R, n_phi, 2 * n_phi)
        u, _ = make_dipole(g, 1.0, R ** p["separation_exponent"])
        _, rep = competitor(u, p["gamma"], p["Lambda"], alpha=p["alpha"])
        d = {k: v for k, v in rep.__dict__.items()}
        d.pop("shell_cylinders", None)
        d["n_phi"] = n_phi
        reports.append(d)
    x = np.array([np.log(r["R"]) for r in reports])
    y = np.log([(r["shell"] + r["annulus"]) / np.log(r["R"]) for r in reports])
    A = np.stack([x, np.ones_like(x)], axis=1)
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    summary = {
        "fitted_exponent": float(sol[0]),
        "alpha": p["alpha"],
        "max_core_prefactor": max(r["core_prefactor"] for r in reports),
        "runs": reports,
    }
    if p["compare_minimizer"]:
        lr = min(p["log_radii"])
        R = float(np.exp(lr))
        g = GridSphere(R, 512, 1024)
        u, _ = make_dipole(g, 1.0, R ** p["separation_exponent"])
        ball = GridBall3D(R, 2 * R / 95)
        U, rep = competitor(u, p["gamma"], p["Lambda"], alpha=p["alpha"],
                            ball_grid=ball)
        # The minimizer energy only needs to sit below the competitor bound,
        # so a capped descent budget suffices and keeps the run tractable.
        _, srep = minimize_dirichlet(
            ball, lambda pts: sphere_interp_xyz(u.values, g, pts), 1.0,
            SolveOptions(seed=seed, tol=1e-3, max_iters=4000))
        summary["minimizer_energy"] = srep.energy.total
        summary["competitor_ball_energy"] = rep.ball_energy
    lines = ["R,ET,shell,annulus,core,prefactor"]
    for r in reports:
        lines.append(",".join(_fmt(r[k]) for k in
                              ("R", "boundary_energy", "shell", "annulus", "core",
                               "core_prefactor")))
    return {"prop13.csv": "\n".join(lines) + "\n",
            "report.json": json.dumps(summary, indent=2, sort_keys=True,
                                      default=_json_default) + "\n"}


def _run_ballgrowth(p: dict, seed: int) -> dict:
    from .geometry import GridSphere
    from .fields import make_dipole
    from .bad_discs import bad_disc_pipeline
    R = float(np.exp(p["log_radius"]))
    g = GridSphere(R, p["n_phi"], 2 * p["n_phi"])
    u, _ = make_dipole(g, 1.0, R ** p["separation_exponent"])
    fam, cert, info = bad_disc_pipeline(u, p["gamma"], p["Lambda"])
    report = {
        "all_pass": cert.all_pass,
        "conditions": {
            "modulus_floor": cert.modulus_floor,
            "radius_sum": cert.radius_sum,
            "circle_energy": cert.circle_energy,
            "degrees_zero": cert.degrees_zero,
            "radius_floor": cert.radius_floor,
        },
        "margins": cert.margins,
        "alpha": cert.alpha,
        "n_discs": len(fam),
        "r_tot": fam.r_tot,
        "t_star": info["t_star"],
        "r0": info["r0"],
        "delta": info["delta"],
        "premise_holds": info["premise_holds"],
    }
    return {"certificate.json": json.dumps(report, indent=2, sort_keys=True,
                                           default=_json_default) + "\n",
            "trace.json": info["trace"].to_json() + "\n"}


def _run_certify(p: dict, seed: int) -> dict:
    from .certify import CertificateParams, ConstantsChain
    params = CertificateParams(
        gamma=p["gamma"], delta=p["delta"], sigma=p["sigma"], alpha=p["alpha"],
        C=p["C"], eps_margin=p["eps_margin"], beta=p["beta"], lam=p["lam"],
        K=p["K"], C_tilde=p["C_tilde"])
    chain = ConstantsChain(params, p["r0"], p["M"])
    return {"chain.json": chain.to_json() + "\n"}


def _run_identities(p: dict, seed: int) -> dict:
    from .geometry import GridBall3D
    from .energy import harmonic_identities
    from .fields import random_harmonic_polynomial
    grid = GridBall3D(1.0, 2.0 / (p["n"] - 1))
    rng = np.random.default_rng(seed)
    rows = ["label,lhs,rhs,pohozaev_defect,holds"]
    rep = harmonic_identities(grid.points[..., 0], grid)
    rows.append(f"x1,{_fmt(rep.lhs)},{_fmt(rep.rhs)},{_fmt(rep.pohozaev_defect)},"
                f"{rep.inequality_holds}")
    for k in range(p["n_random"]):
        w, _ = random_harmonic_polynomial(rng, p["max_degree"])
        rep = harmonic_identities(w(grid.points), grid)
        rows.append(f"random{k},{_fmt(rep.lhs)},{_fmt(rep.rhs)},"
                    f"{_fmt(rep.pohozaev_defect)},{rep.inequality_holds}")
    return {"identities.csv": "\n".join(rows) + "\n"}


RUNNERS = {
    "growth-rate": _run_growth_rate,
    "eta-sweep": _run_eta_sweep,
    "prop13": _run_prop13,
    "ballgrowth": _run_ballgrowth,
    "certify": _run_certify,
    "identities": _run_identities,
}


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def _load_config(args) -> dict:
    cfg = {}
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
    if args.experiment:
        cfg["experiment"] = args.experiment
    if args.seed is not None:
        cfg["seed"] = args.seed
    return cfg


def _manifest(cfg: dict, wall: float, files: list[str]) -> str:
    import scipy
    from . import __version__
    blob = json.dumps(cfg, sort_keys=True).encode()
    return json.dumps({
        "config": cfg,
        "config_sha256": hashlib.sha256(blob).hexdigest(),
        "outputs": sorted(files),
        "versions": {
            "glvortex": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": sys.version.split()[0],
        },
        "wall_time_s": wall,
    }, indent=2, sort_keys=True) + "\n"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="glvortex",
        description="reproducible Ginzburg-Landau experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("experiment", nargs="?", help="experiment name")
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--quiet", action="store_true")

    common(sub.add_parser("run", help="run one experiment"))
    common(sub.add_parser("validate", help="check a config without computing"))
    sub.add_parser("list", help="list experiments")

    args = ap.parse_args(argv)

    if args.command == "list":
        for name in sorted(EXPERIMENTS):
            print(f"{name:12s} {EXPERIMENTS[name]}")
        return 0

    if args.threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)

    try:
        cfg = _load_config(args)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    errors = validate_config(cfg)
    if args.command == "validate":
        if errors:
            for e in errors:
                print(f"config error: {e}", file=sys.stderr)
            return 2
        if not args.quiet:
            print("config ok")
        return 0
    if errors:
        for e in errors:
            print(f"config error: {e}", file=sys.stderr)
        return 2

    name = cfg["experiment"]
    seed = int(cfg.get("seed", 0))
    params = resolved_params(cfg)
    out_dir = cfg.get("out", args.out)
    os.makedirs(out_dir, exist_ok=True)
    t0 = time.time()
    try:
        files = RUNNERS[name](params, seed)
    except Exception as exc:  # noqa: BLE001 - surfaced with the stage label
        print(f"experiment {name} failed: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return 1
    wall = time.time() - t0
    written = []
    for fname, payload in files.items():
        path = os.path.join(out_dir, fname)
        mode = "wb" if isinstance(payload, bytes) else "w"
        with open(path, mode) as fh:
            fh.write(payload)
        written.append(fname)
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        fh.write(_manifest(cfg, wall, written))
    if not args.quiet:
        print(f"{name}: wrote {len(written)} file(s) to {out_dir} "
              f"in {wall:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
