"""Tangential vector-valued Crouzeix-Raviart elements for the vector Laplace
problem -lap_G u + c u = f on closed level surfaces."""
from .analysis import (ErrorNorms, ErrorReport, StudyConfig, coefficient_defect, emit_report,
                       error_norms, interpolation_errors, run_study, solve_level)
from .assembly import (SparseSystem, assemble, load_vector, local_matrices, solve_cg,
                       symmetry_error, write_matrix_market)
from .cr import (DiscreteField, DofMap, ElementwiseField, build_dof_map, cr_basis,
                 edge_jump_means, interpolate_componentwise, interpolate_tan)
from .eoc import eoc
from .errors import *  # noqa: F401,F403
from .geometry import GEOMETRY_QUANTITIES, geometry_errors, measure_geometry_rates
from .level_surface import GenericLevelSet, LevelSurface, Sphere, Torus, projector
from .mesh import (SurfaceMesh, build_sphere_mesh, build_torus_mesh, compute_frames, read_off,
                   refine, torus_resolution, write_off)
from .quadrature import edge_rule, triangle_rule
from .tangential import (TangentialFieldSpec, bochner_laplacian, exact_solution,
                         manufactured_rhs, rotation_spec, sphere_spec, tangential_gradient,
                         torus_spec)

__version__ = "0.1.0"
