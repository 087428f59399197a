"""PGL(2,q) as the stabilizer of a conic in PG(2,q): involution triangles,
coset geometries, and rank-3 hypertope verification at desk scale."""

from conictopes.corr import (
    correlation_witness,
    frobenius_collineation,
    tau_triangle,
    triality_projectivity_check,
)
from conictopes.geom import (
    build_coset_geometry,
    check_hypertope_criteria,
    diagram,
    graph_oracle,
)
from conictopes.gf import Field, build_field
from conictopes.grp import ElementSet, closure, identify_group
from conictopes.perspectivity import Involution, involution_from_center
from conictopes.plane import Plane
from conictopes.triangles import (
    TriangleRecord,
    classify_triangle,
    construct_nonlinear_pgl,
    construct_tangent_triangle,
    enumerate_triples,
    not_psl_sufficient,
    verify_main,
)

__all__ = [
    "Field",
    "build_field",
    "Plane",
    "Involution",
    "involution_from_center",
    "ElementSet",
    "closure",
    "identify_group",
    "check_hypertope_criteria",
    "build_coset_geometry",
    "graph_oracle",
    "diagram",
    "TriangleRecord",
    "classify_triangle",
    "construct_tangent_triangle",
    "construct_nonlinear_pgl",
    "enumerate_triples",
    "verify_main",
    "not_psl_sufficient",
    "frobenius_collineation",
    "tau_triangle",
    "correlation_witness",
    "triality_projectivity_check",
]
