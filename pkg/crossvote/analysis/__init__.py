"""Integration layer, decision policies and alignment analysis."""
from .integration import integrate, normalize_q, select_action
from .policy import (
    DecisionRecord, FunctionPolicy, GreedyPolicy, MultiObjectivePolicy, Policy, PolicyConfig,
    build_policy, multi_objective_policy, required_nets,
)
from .alignment import agreement_matrix, alignment_analysis, decisions_frame
