"""Poisson structures on 3-manifolds with Bott-Morse foliations: exact
multivector calculus, the local singular models, leaf geometry, numeric
gluing, and Poisson cohomology of the linear models."""

from .cohomology import cohomology_dims, table_report
from .glue import GluedStructure, Grid, glue, jacobiator_grid, rank_profile
from .leaves import leaf_frame, symplectic_eval, trace_leaf
from .models import ModelId, catalog, classify_lie, flaschka_ratiu, get_model, structure_constants
from .multivector import MultiVector, bundle_map, hamiltonian_field, is_poisson, schouten, wedge
from .poly import Polynomial, parse
from .tables import discrepancy_report

__all__ = [
    "GluedStructure", "Grid", "ModelId", "MultiVector", "Polynomial",
    "bundle_map", "catalog", "classify_lie", "cohomology_dims", "discrepancy_report",
    "flaschka_ratiu", "get_model", "glue", "hamiltonian_field", "is_poisson",
    "jacobiator_grid", "leaf_frame", "parse", "rank_profile", "schouten",
    "structure_constants", "symplectic_eval", "table_report", "trace_leaf", "wedge",
]
