"""Adaptive SUPG solver with flux-recovery a posteriori estimators."""

from ._core import (
    Flux,
    Mesh,
    Problem,
    Solution,
    adaptive_solve,
    alpha_K,
    alpha_e,
    cumulative_mark,
    dorfler_mark,
    estimate,
    example1,
    example2,
    load_problem_file,
    manufactured,
    mesh_from_text,
    problem_by_name,
    problem_names,
    recover,
    recovery_objective,
    solve,
    square_mesh,
)

RECOVERY_KINDS = ("explicit", "l2-rt0", "l2-bdm1", "hdiv-rt0", "hdiv-bdm1")

__all__ = [
    "Flux",
    "Mesh",
    "Problem",
    "Solution",
    "RECOVERY_KINDS",
    "adaptive_solve",
    "alpha_K",
    "alpha_e",
    "cumulative_mark",
    "dorfler_mark",
    "estimate",
    "example1",
    "example2",
    "load_problem_file",
    "manufactured",
    "mesh_from_text",
    "problem_by_name",
    "problem_names",
    "recover",
    "recovery_objective",
    "solve",
    "square_mesh",
]
