"""Episodes, sweeps, persistence and acceptance reporting."""
from .episode import EpisodeLog, run_episode
from .sweep import SweepResult, aggregate, run_preference_sweep, run_sweep
from .export import (
    emit_radar_data, export_trace_csv, load_decision_log, read_sweep,
    run_dir_name, save_decision_log, write_sweep,
)
from .report import AcceptanceReport, acceptance_report, compare_vote_rules
