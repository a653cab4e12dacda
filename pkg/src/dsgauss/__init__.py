"""Numerical geometry of space-like surfaces in the de Sitter space-time
S^4_1(1) in E^5_1: adapted frames, fundamental forms, curvatures, the
Gauss map nu = e1 ^ e2 and its Laplacian by three independent routes, and
classification of the 1-type / pointwise 1-type Gauss map property."""

from .analyzer import (
    ClassificationReport,
    GaussMapSample,
    TheoremCase,
    classify,
    gauss_map,
    global_type_test,
    laplacian_ambient,
    laplacian_direct,
    laplacian_formula,
    pointwise_type_test,
)
from .catalog import ConstraintViolation, UnknownEntry, instantiate, membership_defect
from .dsl import ParseError, SchemaError, SurfaceSpec, eval_jet, load_surface, parse, unparse
from .exterior import InducedSpace, KVector, induced_inner, lambda_index, wedge, wedge_ext
from .geometry import (
    AmbientShapeData,
    FramedPoint,
    NotInDeSitter,
    NotSpacelike,
    ProbeReport,
    ShapeData,
    ambient_shape_at,
    codazzi_residual,
    frame_at,
    gauss_curvature_brioschi,
    shape_at,
    sphere_intersection_probe,
)
from .jets import Jet2, Singularity, fd_oracle, jet_arith
from .minkowski import (
    CausalCharacter,
    DegenerateFrame,
    Signature,
    causal_character,
    complete_frame,
    gram_schmidt,
    inner,
)

__version__ = "0.1.0"

__all__ = [
    "AmbientShapeData",
    "CausalCharacter",
    "ClassificationReport",
    "ConstraintViolation",
    "DegenerateFrame",
    "FramedPoint",
    "GaussMapSample",
    "InducedSpace",
    "Jet2",
    "KVector",
    "NotInDeSitter",
    "NotSpacelike",
    "ParseError",
    "ProbeReport",
    "SchemaError",
    "ShapeData",
    "Signature",
    "Singularity",
    "SurfaceSpec",
    "TheoremCase",
    "UnknownEntry",
    "ambient_shape_at",
    "causal_character",
    "classify",
    "codazzi_residual",
    "complete_frame",
    "eval_jet",
    "fd_oracle",
    "frame_at",
    "gauss_curvature_brioschi",
    "gauss_map",
    "global_type_test",
    "gram_schmidt",
    "induced_inner",
    "inner",
    "instantiate",
    "jet_arith",
    "lambda_index",
    "laplacian_ambient",
    "laplacian_direct",
    "laplacian_formula",
    "load_surface",
    "membership_defect",
    "parse",
    "pointwise_type_test",
    "shape_at",
    "sphere_intersection_probe",
    "unparse",
    "wedge",
    "wedge_ext",
]
