"""Skyline-first multi-criteria search over level-lifted cost models."""

from .engine import RunConfig, SearchResult, Termination, certificate_holds, run, runtime_bound_check
from .frontier import Frontier, FrontierEntry, pareto_layers
from .generator import GenParams, generate_random_instance
from .instance import Instance, InstanceError, Signature, validate_instance
from .instance_io import emit_instance, emit_trace, load_instance, parse_instance
from .oracle import enumerate_feasible, verify_run

__all__ = [
    "Frontier", "FrontierEntry", "GenParams", "Instance", "InstanceError", "RunConfig",
    "SearchResult", "Signature", "Termination", "certificate_holds", "emit_instance",
    "emit_trace", "enumerate_feasible", "generate_random_instance", "load_instance",
    "pareto_layers", "parse_instance", "run", "runtime_bound_check", "validate_instance",
    "verify_run",
]
