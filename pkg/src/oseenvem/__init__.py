"""Equal-order virtual elements with local projection stabilization for the Oseen problem."""

from .errors import OseenVemError
from .lps import StabilizationParams
from .mesh import PolyMesh, generate, read_mesh, write_mesh
from .problems import OseenProblem, get_problem
from .system import assemble, solve, solve_problem
from .analysis import compute_errors, convergence_study

__version__ = "0.1.0"

__all__ = [
    "OseenVemError", "StabilizationParams", "PolyMesh", "generate", "read_mesh", "write_mesh",
    "OseenProblem", "get_problem", "assemble", "solve", "solve_problem", "compute_errors",
    "convergence_study",
]
