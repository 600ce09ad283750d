"""Numerical verification of weak contact metric structures on charted manifolds."""

from .contact import (
    LadderLevel,
    WeakStructure,
    classify,
    compute_N_tensors,
    construct_from_killing,
    einstein_diagnostic,
    homothety,
    identity_suite,
    verify_axioms,
)
from .errors import (
    DegenerateQ,
    DegenerateStructure,
    InvalidConfig,
    NotKilling,
    NotUnit,
    UnknownManifold,
    WeakContactError,
)
from .gallery import ellipsoid, flat_torus, round_sphere
from .manifold import ChartManifold, Field, SamplePlan, sample_points
from .report import CheckReport, parse_report, render_report
from .runner import RunConfig, SolitonSpec, run_suite
from .soliton import Potential, SolitonParams, TwoPotentials, VectorFieldData, lemma_checks, theorem51_diagnostic

__version__ = "0.1.0"
