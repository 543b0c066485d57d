"""polyvem - first-order virtual elements for 3D linear elasticity on polyhedra.

Example:
    from polyvem import Box, MaterialModel, hex_mesh, patch_problem, solve_problem

    mesh = hex_mesh(Box.unit(), 3, 3, 3)
    problem = patch_problem(MaterialModel.isotropic(1.0, 0.3))
    solution = solve_problem(mesh, problem)
"""

from .analysis import (
    ConvergenceResult,
    GammaSweepResult,
    convergence_study,
    displacement_error,
    error_report,
    fit_slope,
    gamma_sweep,
    stress_error,
)
from .assembly import (
    ProblemSpec,
    Solution,
    apply_dirichlet,
    assemble_load,
    assemble_stiffness,
    assemble_system,
    solve,
    solve_problem,
)
from .benchmarks import (
    AnalyticalSolution,
    beam_problem,
    beam_solution,
    patch_problem,
    patch_solution,
)
from .config import RunConfig, load_config
from .constants import BoxSide, MomentMode, SizeMeasure
from .element import ElementOperators, element_operators, element_stiffness
from .exceptions import (
    AnalysisError,
    AssemblyError,
    ConfigError,
    ElementError,
    GeometryError,
    MaterialError,
    MeshError,
    MeshFormatError,
    PolyVemError,
    QuadratureError,
    SingularSystemError,
    SolverError,
)
from .geometry import Element, Face, PolyMesh, build_connectivity
from .logs import configure_logging
from .material import MaterialModel, material_D
from .mesh_io import MeshCodec, read_mesh, write_mesh
from .meshgen import Box, SeedSet, cvt_mesh, hex_mesh, lloyd_relaxation, voronoi_mesh
from .quadrature import high_order_cell_rule, surface_nodal_rule, volume_nodal_rule
from .vtk import write_vtk

__version__ = "0.1.0"

__all__ = [
    "AnalysisError",
    "AnalyticalSolution",
    "AssemblyError",
    "Box",
    "BoxSide",
    "ConfigError",
    "ConvergenceResult",
    "Element",
    "ElementError",
    "ElementOperators",
    "Face",
    "GammaSweepResult",
    "GeometryError",
    "MaterialError",
    "MaterialModel",
    "MeshCodec",
    "MeshError",
    "MeshFormatError",
    "MomentMode",
    "PolyMesh",
    "PolyVemError",
    "ProblemSpec",
    "QuadratureError",
    "RunConfig",
    "SeedSet",
    "SingularSystemError",
    "SizeMeasure",
    "Solution",
    "SolverError",
    "apply_dirichlet",
    "assemble_load",
    "assemble_stiffness",
    "assemble_system",
    "beam_problem",
    "beam_solution",
    "build_connectivity",
    "configure_logging",
    "convergence_study",
    "cvt_mesh",
    "displacement_error",
    "element_operators",
    "element_stiffness",
    "error_report",
    "fit_slope",
    "gamma_sweep",
    "hex_mesh",
    "high_order_cell_rule",
    "lloyd_relaxation",
    "load_config",
    "material_D",
    "patch_problem",
    "patch_solution",
    "read_mesh",
    "solve",
    "solve_problem",
    "stress_error",
    "surface_nodal_rule",
    "volume_nodal_rule",
    "voronoi_mesh",
    "write_mesh",
    "write_vtk",
]
