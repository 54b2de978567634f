"""Closed-form optima and the numeric oracles that verify them."""

from .closed_form import (
    LocalOperations,
    effective_gprime,
    gains_max_t,
    gains_min_v,
    hessian_at_minimum,
    hk_threshold,
    improved_squeezers,
    noise_bloch_messiah,
    noise_standard_form,
    optimal_gprime,
    optimal_local_ops,
    quantum_threshold,
    squeezer_for_gprime,
    t_max,
    t_max_opt,
    t_v_min,
    t_v_min_opt,
    v_min,
    v_t_max,
)
from .oracles import (
    central_gradient,
    gain_objective,
    local_ops_objective,
    optimal_gprime_fidelity,
    optimal_gprime_transfer,
    oracle_gain_search,
    oracle_local_ops_search,
)

__all__ = [
    "LocalOperations",
    "central_gradient",
    "effective_gprime",
    "gain_objective",
    "gains_max_t",
    "gains_min_v",
    "hessian_at_minimum",
    "hk_threshold",
    "improved_squeezers",
    "local_ops_objective",
    "noise_bloch_messiah",
    "noise_standard_form",
    "optimal_gprime",
    "optimal_gprime_fidelity",
    "optimal_gprime_transfer",
    "optimal_local_ops",
    "oracle_gain_search",
    "oracle_local_ops_search",
    "quantum_threshold",
    "squeezer_for_gprime",
    "t_max",
    "t_max_opt",
    "t_v_min",
    "t_v_min_opt",
    "v_min",
    "v_t_max",
]
