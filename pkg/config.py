DEFAULT_N = 4
DEFAULT_R = 1
DEFAULT_SEED = 0
DEFAULT_VALUE_RANGE = 9
DEFAULT_DENSITY = 1.0

# Retries of the circulation generator before giving up on an edge set
GENERATOR_MAX_ATTEMPTS = 50

# Largest matrix size on which the CRSF enumeration is run by the verify command
LINEBUNDLE_MAX_SIZE = 6

# Largest vertex count accepted by the symbolic 3-graph checks
HYPERGRAPH_MAX_VERTICES = 7

THREADS_ENV_VAR = "PFAFFIAN_THREADS"
DEFAULT_THREADS = 1

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
