import os
from dotenv import load_dotenv

# Allow choosing a specific env file (for example, .env.test)
ENV_FILE = os.getenv("ENV_FILE", ".env")
load_dotenv(ENV_FILE, override=True)


LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

# Relative truncation tolerance used by every series unless a call overrides it
DEFAULT_TOL = float(os.getenv("ORTHODERIV_TOL", "1e-10"))

# Series caps
MAX_SERIES_TERMS = int(os.getenv("ORTHODERIV_MAX_TERMS", "1000000"))
MAX_DIAGONALS = int(os.getenv("ORTHODERIV_MAX_DIAGONALS", "20000"))

# Quadrature sizes
ORACLE_NODES = int(os.getenv("ORTHODERIV_ORACLE_NODES", "96"))
INTEGRAL_NODES = int(os.getenv("ORTHODERIV_INTEGRAL_NODES", "64"))

# Decay assumed for test functions on the improper legs: |f| <= C exp(-kappa (s + t))
DECAY_RATE = float(os.getenv("ORTHODERIV_DECAY_RATE", "1.0"))
TAIL_CUTOFF = float(os.getenv("ORTHODERIV_TAIL_CUTOFF", "40"))

# Open inequalities of convergence regions are tested with this margin
REGION_MARGIN = 1e-12

# c-a-b closer than this to an integer makes the 2F1 connection formula singular
NEAR_INTEGER = 1e-9

# Pochhammer growth makes the triangle basis unreliable above this degree
TRIANGLE_DEGREE_CAP = 8
