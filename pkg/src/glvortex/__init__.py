"""Numerical laboratory for the 3D Ginzburg-Landau energy.

The package provides grids and quadrature on balls, spheres, discs and
cylinders, the Ginzburg-Landau energy and its weighted and tangential
variants, the radial vortex profile, gradient-descent relaxation, degree
computation, the growing-disc covering of low-modulus regions on spheres,
the explicit low-energy competitor construction, and the numerical
constants chain behind the energy-growth certificate.
"""

from .geometry import (
    GridDisc2D,
    GridBall3D,
    GridSphere,
    GridCylinder,
    SphericalDisc,
    VectorField,
    gradient,
    masked_gradient,
    sphere_tangential_gradient,
    tangential_gradient,
    integrate,
    multilinear,
    trilinear,
    sphere_interp,
    sphere_interp_xyz,
    restrict_to_sphere,
    disc_frame,
    circle_points,
    circle_trace,
    geodesic_distance,
    save_field,
    load_field,
    field_to_csv,
)
from .energy import (
    EnergyBreakdown,
    potential_density,
    energy_density,
    gl_energy,
    tangential_energy,
    weighted_energy,
    gl_residual,
    ShellEnergyTrace,
    shell_trace,
    monotonicity_check,
    HarmonicIdentityReport,
    harmonic_identities,
)
from .profile import (
    Profile,
    ShootingBracketError,
    solve_profile,
    canonical_map,
    profile_energy_2d,
    vortex_line_energy,
    GrowthRateFit,
    growth_rate,
)
from .relax import (
    SolveOptions,
    SolveReport,
    minimize_dirichlet,
    minimize_weighted,
    EtaSweepRow,
    eta_sweep,
    sweep_to_csv,
)
from .topology import (
    DegreeUndefinedError,
    UnderResolvedLoopError,
    Loop,
    phase_increments,
    winding_number,
    degree_on_sphere,
)
from .bad_discs import (
    PoleContactError,
    CoverageError,
    GrowthRangeError,
    NoAdmissibleTimeError,
    DiscFamily,
    GrowthTrace,
    energy_density_sphere,
    circle_energy,
    merge_discs,
    initial_cover,
    grow,
    select_time,
    DiscCertificate,
    certify as certify_discs,
    default_delta,
    bad_disc_pipeline,
)
from .construct import (
    LiftingError,
    TransplantChart,
    transplant_chart,
    stereographic_transplant,
    transplant_inverse,
    FillReport,
    fill_spherical_disc,
    ConeReport,
    cone_extension,
    SphericalCylinderMap,
    unwrap_sphere_phase,
    AnnulusReport,
    annulus_interpolation,
    sphere_harmonic_coeffs,
    HarmonicExtensionReport,
    harmonic_phase_extension,
    CompetitorReport,
    competitor,
)
from .certify import (
    default_eps_margin,
    CertificateParams,
    pick_rho1,
    r1_constant,
    r1_balance_defect,
    R1_threshold,
    T_threshold,
    DiffIneqViolation,
    diff_ineq_check,
    ConstantsChain,
)
from .fields import (
    make_dipole,
    make_single_vortex,
    make_degree_zero,
    boundary_constant,
    boundary_degree_zero,
    boundary_vortex_line,
    random_harmonic_polynomial,
)

__version__ = "0.1.0"
