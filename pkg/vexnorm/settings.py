import os
import logging


def _int_env(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logging.getLogger(__name__).warning("ignoring {}='{}': not an integer".format(name, raw))
        return default


threads = max(1, _int_env("VEXNORM_THREADS", os.cpu_count() or 1))
max_cells = _int_env("VEXNORM_MAX_CELLS", 2 ** 22)
log_level = os.environ.get("VEXNORM_LOG_LEVEL", "INFO").upper()
