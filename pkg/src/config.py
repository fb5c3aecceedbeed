import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

PROJECT_ROOT = Path(__file__).parent.parent


class Config:
    """Environment configuration for the ranking toolkit."""

    def __init__(self):
        # Logging
        self.log_level = os.getenv('REGRANK_LOG_LEVEL', 'WARNING')
        self.log_file = os.getenv('REGRANK_LOG_FILE') or None

        # Data directories
        self.data_output_dir = Path(os.getenv('REGRANK_OUTPUT_DIR', PROJECT_ROOT / 'data' / 'output'))

        # Eigen-solver defaults
        self.solver_tol = self._read_float('REGRANK_SOLVER_TOL', 1e-12)
        self.solver_max_iter = self._read_int('REGRANK_SOLVER_MAX_ITER', 100000)

        # Sweep parallelism
        self.workers = self._read_int('REGRANK_WORKERS', 1)

    @staticmethod
    def _read_float(key: str, default: float) -> float:
        raw = os.getenv(key)
        if raw is None or raw == '':
            return default
        try:
            return float(raw)
        except ValueError:
            raise ValueError(f"{key} must be a number, got {raw!r}")

    @staticmethod
    def _read_int(key: str, default: int) -> int:
        raw = os.getenv(key)
        if raw is None or raw == '':
            return default
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"{key} must be an integer, got {raw!r}")

    def ensure_output_dir(self) -> Path:
        """Create the output directory on first use."""
        self.data_output_dir.mkdir(parents=True, exist_ok=True)
        return self.data_output_dir

    def validate(self):
        """Validate configured values."""
        if not self.solver_tol > 0:
            raise ValueError(f"REGRANK_SOLVER_TOL must be positive, got {self.solver_tol}")
        if self.solver_max_iter < 1:
            raise ValueError(f"REGRANK_SOLVER_MAX_ITER must be >= 1, got {self.solver_max_iter}")
        if self.workers < 1:
            raise ValueError(f"REGRANK_WORKERS must be >= 1, got {self.workers}")
        if self.log_level.upper() not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            raise ValueError(f"REGRANK_LOG_LEVEL is not a logging level: {self.log_level}")
        return True


config = Config()
