"""Dense multiprecision matrices and the complex QZ eigenvalue solver."""

from src.densela.matrix import MPMatrix
from src.densela.qz import (
    GeneralizedEigenPair,
    QZConfig,
    QZResult,
    eigenvalues,
    eigenvalues_standard,
    hessenberg_triangular,
    hessenberg_triangular_with_transforms,
    qz_iterate,
)
from src.densela.rotations import Givens, House

__all__ = [
    "MPMatrix",
    "Givens",
    "House",
    "GeneralizedEigenPair",
    "QZConfig",
    "QZResult",
    "eigenvalues",
    "eigenvalues_standard",
    "hessenberg_triangular",
    "hessenberg_triangular_with_transforms",
    "qz_iterate",
]
