"""Rewards, evaluation metrics and vote aggregation."""
from .metrics import MetricsReport, combine_reports, metrics
from .rewards import (
    REWARD_FUNCTIONS, RewardParams, get_reward_fn, reward_cobb_douglas,
    reward_linear, reward_params_for, reward_stops, reward_wait,
)
from .voting import Weights, get_vote_rule, majority_weights, proportional_weights
