import logging
import os

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Numerical tolerances (all logs are base 2)
STRUCTURAL_TOL = 1e-10
TEST_TOL = 1e-9
KRAUS_TRUNCATION = 1e-12
EIGEN_FLOOR = 1e-13
CHANNEL_FILE_TOL = 1e-8

CSV_SCHEMA_VERSION = "1"
REPORT_SCHEMA_VERSION = "1"


def _int_from_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from exc


GLOBAL_SEED = _int_from_env("POLAR_SEED", 1234)
MAX_DENSITY_DIM = _int_from_env("POLAR_MAX_DENSITY_DIM", 4096)
MAX_STATEVECTOR_DIM = _int_from_env("POLAR_MAX_STATEVECTOR_DIM", 2**22)
LOG_LEVEL = os.getenv("POLAR_LOG_LEVEL", "WARNING").upper()

# Run Configuration Hierarchy
# 1. Mode-Specific Settings (MODE_DEFAULTS): exact runs are small, bounds runs are large.
# 2. Global Defaults (.env / GLOBAL_* variables): seed comes from POLAR_SEED.
# 3. Explicit CLI flags override both (applied in src/cli.py).
MODE_DEFAULTS = {
    "exact": {"n": 2, "trials": 8},
    "bounds": {"n": 10, "trials": 1},
    "default": {"n": 2, "trials": 8},
}


def get_run_defaults(mode: str) -> dict:
    """
    Defaults for a RunConfig in the given mode.

    The mode table is overlaid on the global defaults, so a mode only needs to name
    the parameters it changes.
    """
    params = {"seed": GLOBAL_SEED, "mode": mode, "threshold": None, "out": None}
    params.update(MODE_DEFAULTS.get(mode, MODE_DEFAULTS["default"]))
    return params


def configure_logging(level: str | None = None) -> None:
    """Configure root logging once for CLI runs. Library modules never call this."""
    chosen = (level or LOG_LEVEL).upper()
    numeric = getattr(logging, chosen, None)
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level: {chosen}")
    logging.basicConfig(
        level=numeric,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
