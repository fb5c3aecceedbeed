import logging
import sys
from pathlib import Path
from typing import Optional, Union

import numpy as np

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(log_level: str = 'INFO', log_file: Optional[str] = None) -> None:
    """Setup logging configuration.

    Diagnostics always go to standard error so standard output stays free for
    CSV reports. A file handler is added when ``log_file`` is given.
    """
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


def validate_file_path(file_path: Union[str, Path]) -> bool:
    """Validate if file path exists and is readable."""
    try:
        path = Path(file_path)
        return path.exists() and path.is_file()
    except Exception:
        return False


def format_float(value: float) -> str:
    """Render a float with 17 significant digits (exact binary64 round-trip)."""
    return format(float(value), '.17g')


def derive_seed(seed: int, stream: int) -> int:
    """Derive an independent child seed for a named stream of a run."""
    return int(np.random.SeedSequence([int(seed), int(stream)]).generate_state(1)[0])
