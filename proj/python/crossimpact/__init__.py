"""Optimal portfolio execution under transient cross-impact propagators."""

from ._core import (
    CrossImpactError,
    Grid,
    MarketParams,
    PropagatorSpec,
    SignalModel,
    SignalPath,
    audit,
    conditional_future_drift,
    eval_propagator,
    g_nodes,
    g_profile,
    markowitz,
    mirrored_eval,
    preset_json,
    preset_names,
    run_scenario_json,
    simulate_ou_path,
    solve_deterministic,
    solve_stochastic_path,
    solve_stochastic_resolvent,
    transient_cost,
    __version__,
)

__all__ = [
    "CrossImpactError",
    "Grid",
    "MarketParams",
    "PropagatorSpec",
    "SignalModel",
    "SignalPath",
    "audit",
    "conditional_future_drift",
    "eval_propagator",
    "g_nodes",
    "g_profile",
    "markowitz",
    "mirrored_eval",
    "preset_json",
    "preset_names",
    "run_scenario_json",
    "simulate_ou_path",
    "solve_deterministic",
    "solve_stochastic_path",
    "solve_stochastic_resolvent",
    "transient_cost",
    "__version__",
]
