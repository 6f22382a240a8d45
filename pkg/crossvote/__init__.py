"""Voting-integrated multi-objective deep Q-learning for a signalized intersection."""

__version__ = "0.1.0"
