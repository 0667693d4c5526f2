import os

from dotenv import load_dotenv

load_dotenv()


class Config:
    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO').upper()
    LOG_FILE = os.environ.get('LOG_FILE') or None

    # Sweep worker pool
    DVDM_THREADS = max(1, int(os.environ.get('DVDM_THREADS', os.cpu_count() or 1)))

    # Randomized property suites
    DVDM_SEED = int(os.environ.get('DVDM_SEED', 20240517))

    # Solver defaults for run configs that omit them
    DEFAULT_TOL = float(os.environ.get('DVDM_DEFAULT_TOL', 1e-12))
    DEFAULT_MAX_ITER = int(os.environ.get('DVDM_DEFAULT_MAX_ITER', 50))

    # Spectral oracle
    ORACLE_RTOL = float(os.environ.get('DVDM_ORACLE_RTOL', 1e-12))
    ORACLE_FACTOR = int(os.environ.get('DVDM_ORACLE_FACTOR', 4))

    # Output defaults
    DEFAULT_DIAGNOSTICS_PATH = os.environ.get('DVDM_DIAGNOSTICS_PATH') or 'diagnostics.csv'
    DEFAULT_CONVERGENCE_PATH = os.environ.get('DVDM_CONVERGENCE_PATH') or 'convergence.csv'
