"""Exact computations with higher (level-m) de Rham complexes over Z/p^N."""

__version__ = "0.1.0"

from .arith import PParams, binom, check_unit_lemma, mbinom, qbinom  # noqa: E402
from .homology import BasedComplex, ComplexMap, homology, is_quasi_iso, snf_local  # noqa: E402

__all__ = [
    "PParams", "binom", "mbinom", "qbinom", "check_unit_lemma",
    "BasedComplex", "ComplexMap", "homology", "is_quasi_iso", "snf_local",
]
