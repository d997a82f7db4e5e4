import os
import logging

# Defaults for every knob the solvers and the command line expose
DEFAULT_NODE_LIMIT = 10 ** 6
SCORING_CANDIDATE_CAP = 5
ORACLE_SUBSET_CAP = 20
UNIQUE_WINNER = False
DEV_ORACLE = False
LOG_LEVEL = "WARNING"

NODE_LIMIT_ENV = "PWLMIP_NODE_LIMIT"
DEV_ORACLE_ENV = "PWLMIP_DEV_ORACLE"
LOG_LEVEL_ENV = "PWLMIP_LOG_LEVEL"


def node_limit():
    """Node limit for branch-and-bound, overridable through PWLMIP_NODE_LIMIT."""
    raw = os.environ.get(NODE_LIMIT_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_NODE_LIMIT
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"Invalid {NODE_LIMIT_ENV}={raw!r}: expected a positive integer")
    if value <= 0:
        raise ValueError(f"Invalid {NODE_LIMIT_ENV}={raw!r}: expected a positive integer")
    return value


def dev_oracle_enabled():
    raw = os.environ.get(DEV_ORACLE_ENV, "")
    return DEV_ORACLE or raw.strip().lower() in ("1", "true", "yes", "on")


def log_level(override=None):
    name = (override or os.environ.get(LOG_LEVEL_ENV) or LOG_LEVEL).upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise ValueError(f"Invalid log level {name!r}")
    return level
