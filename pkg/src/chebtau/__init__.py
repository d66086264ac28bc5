"""Chebyshev tau discretization of the Orr–Sommerfeld problem."""

from src.chebtau.assembly import (
    COUETTE,
    POISEUILLE,
    FlowKind,
    FlowProfile,
    Method,
    OSParams,
    TauSystem,
    assemble,
    assemble_d2,
    assemble_d4,
    d2_operators,
    d4_operators,
)
from src.chebtau.operators import (
    RationalOperator,
    bc_rows,
    boundary_rows,
    d2_matrix,
    d4_matrix,
    fourth_derivative,
    mult_z,
    mult_z2,
    multiply_by_z,
    multiply_by_z2,
    second_derivative,
)

__all__ = [
    "COUETTE",
    "POISEUILLE",
    "FlowKind",
    "FlowProfile",
    "Method",
    "OSParams",
    "TauSystem",
    "assemble",
    "assemble_d2",
    "assemble_d4",
    "d2_operators",
    "d4_operators",
    "RationalOperator",
    "bc_rows",
    "boundary_rows",
    "d2_matrix",
    "d4_matrix",
    "fourth_derivative",
    "mult_z",
    "mult_z2",
    "multiply_by_z",
    "multiply_by_z2",
    "second_derivative",
]
