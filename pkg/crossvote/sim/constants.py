"""Intersection microsimulation constants and scenario defaults."""

# ---------------------------------------------------------------------------
# Time
# ---------------------------------------------------------------------------
DT = 1.0                     # seconds per tick
HORIZON_STEPS = 3600         # one hour per episode
T_ACT = 5                    # seconds between signal decisions

# ---------------------------------------------------------------------------
# Geometry (each road is a periodic loop crossing the other once)
# ---------------------------------------------------------------------------
LOOP_LENGTH_M = 600.0
APPROACH_LENGTH_M = 300.0    # upstream of the stop line; observed and polled
N_SEGMENTS = 3               # equal occupancy bins per approach

# ---------------------------------------------------------------------------
# Vehicle kinematics
# ---------------------------------------------------------------------------
V_MAX_MPS = 13.89            # 50 km/h
ACCEL_MPS2 = 2.0
DECEL_MPS2 = 4.5             # comfortable bound; red-light braking may exceed it
VEHICLE_LENGTH_M = 5.0
MIN_GAP_M = 2.5
STOP_SPEED_THRESHOLD_MPS = 0.1

# ---------------------------------------------------------------------------
# Population
# ---------------------------------------------------------------------------
PREFERENCE_SPLIT = 0.5       # share of the fleet preferring fewer stops
DEFAULT_DEMAND = (11, 6)

# Initial placement retries before giving up
MAX_PLACEMENT_RETRIES = 100
