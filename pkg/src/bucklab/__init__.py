"""bucklab: a numerical laboratory for Dirichlet, Neumann and buckling
spectra, boundary trace operators, and their exact counting identities.

The package computes the four spectra of a planar domain (Dirichlet and
Neumann Laplacian, clamped buckling, simply supported fourth-order),
builds the Dirichlet-to-Neumann and Neumann-to-Laplacian operators as
Schur complements, verifies the negative-count identities at integer
exactness, reproduces the divergence of the trace Rayleigh quotient
over the too-large trial space, and runs punctured-sphere experiments
where the comparison inequalities fail.
"""
from ._kernels import BACKEND as kernel_backend
from .assembly import (
    DofMap,
    OperatorPair,
    assemble_lagrange,
    assemble_morley,
    boundary_normal_mass,
    classify_dofs,
    export_triplets,
)
from .counterexample import (
    BoundedBelowReport,
    DivergenceReport,
    QuotientSample,
    alpha_value,
    bounded_below_check,
    buckling_ground_state,
    divergence_sweep,
    make_perturbation,
    rayleigh_quotient,
)
from .eigen import Inertia, inertia, schur_complement, sym_gen_eigs
from .errors import (
    BucklabError,
    ConfigError,
    ConstraintViolationError,
    DofKindError,
    ExcludedSpectrumError,
    MeshError,
    SingularBlockError,
    SizeLimitError,
    SpectrumRangeError,
)
from .mesh import (
    Mesh,
    RadialGrid,
    load_mesh,
    make_disk_mesh,
    make_polygon_mesh,
    make_radial_grid,
    make_rectangle_mesh,
    refine_mesh,
    save_mesh,
)
from .runio import RunManifest, SweepResult, emit_plot_data, load_config, write_results
from .spectra import (
    Spectrum,
    buckling_spectrum,
    counting_function,
    disk_oracle,
    laplace_spectrum,
    navier_spectrum,
)
from .spherecap import (
    CapOperators,
    cap_buckling_lambda1,
    cap_operators,
    cap_scan,
    cap_spectrum,
)
from .traceops import (
    IdentityReport,
    TraceOperator,
    dtn_operator,
    ntl_operator,
    scan_beta1,
    scan_identities,
    trace_spectrum,
    verify_identity,
)

__version__ = "0.1.0"
