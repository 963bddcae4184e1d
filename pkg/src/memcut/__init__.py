"""Memory-constrained cutting-plane solvers for convex feasibility."""
from .aux_lp import DualCertificate, discretize_certificate, solve_aux
from .errors import (CenteringFailure, CenteringPreconditionError, CertificateError,
                     DegenerateState, LedgerError, ReplayError)
from .gd import GdParams, gd_solve
from .geometry import BlockPartition, bits_for_discretized_vector, discretize, discretize1
from .lsw import LswEngine, LswParams, certified_solve, lsw_cutting_plane
from .memory import MemoryLedger
from .oracles import (SUCCESS, BallInstance, CountingOracle, HardInstance, LipschitzInstance,
                      make_instance)
from .polyhedron import IndexedPolyhedron, is_empty, leverage_scores, volumetric_center
from .recursive import SolveConfig, solve_feasibility
from .report import RunReport
from .vaidya import VaidyaEngine, VaidyaParams, iteration_budget, vaidya_run

__all__ = [
    "SUCCESS", "BallInstance", "BlockPartition", "CenteringFailure",
    "CenteringPreconditionError", "CertificateError", "CountingOracle", "DegenerateState",
    "DualCertificate", "GdParams", "HardInstance", "IndexedPolyhedron", "LedgerError",
    "LipschitzInstance", "LswEngine", "LswParams", "MemoryLedger", "ReplayError", "RunReport",
    "SolveConfig", "VaidyaEngine", "VaidyaParams", "bits_for_discretized_vector",
    "certified_solve", "discretize", "discretize1", "discretize_certificate", "gd_solve",
    "is_empty", "iteration_budget", "leverage_scores", "lsw_cutting_plane", "make_instance",
    "solve_aux", "solve_feasibility", "vaidya_run", "volumetric_center",
]
