"""LISA tensor bases, DROPS droplet decompositions and spin dynamics."""

from ._spindrops import (
    Basis,
    DimensionError,
    ParseError,
    SchemaError,
    ScopeError,
    SpindropsError,
    __version__,
    basis_from_json,
    build_basis,
    canonical_expression,
    coherence_order_spectrum,
    decompose,
    decompose_json,
    diagnose,
    expectation,
    parse_operator,
    reconstruct_json,
    run_scenario,
    run_sequence,
    sample_droplet,
    scenario,
    scenario_names,
)

__all__ = [
    "Basis",
    "DimensionError",
    "ParseError",
    "SchemaError",
    "ScopeError",
    "SpindropsError",
    "__version__",
    "basis_from_json",
    "build_basis",
    "canonical_expression",
    "coherence_order_spectrum",
    "decompose",
    "decompose_json",
    "diagnose",
    "expectation",
    "parse_operator",
    "reconstruct_json",
    "run_scenario",
    "run_sequence",
    "sample_droplet",
    "scenario",
    "scenario_names",
]
