"""Config module."""
from .settings import Settings, settings
from .scenarios import DEMANDS, DEMAND_BUCKETS, bucket_of

__all__ = ["Settings", "settings", "DEMANDS", "DEMAND_BUCKETS", "bucket_of"]
