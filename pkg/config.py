"""
Bow-tie Decomposition Configuration
"""
import os


class Config:
    """Base configuration"""
    
    # SCC backend: 'scipy' (compiled) or 'tarjan' (iterative, pure Python)
    SCC_METHOD = os.environ.get('BOWTIE_SCC_METHOD', 'scipy')
    
    # Input
    INPUT_FORMAT = 'edge-list'
    INGEST_CHUNK_ARCS = 1_000_000
    
    # Execution
    THREADS = int(os.environ.get('BOWTIE_THREADS', '1'))
    SEED = 0
    SHOW_PROGRESS = True
    
    # Logging
    LOG_LEVEL = os.environ.get('BOWTIE_LOG_LEVEL', 'INFO')
    LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'
    
    # Oracle is quadratic, refuse anything larger
    ORACLE_MAX_N = 5000
    
    # Stats defaults
    ABANDONED_MAX_FOLLOWERS = 1
    ABANDONED_MAX_FOLLOWINGS = 1
    ABANDONED_MIN_AGE_MONTHS = 6
    OUTLIER_K = 10_000
    
    # Output file names
    LABELS_FILE = 'labels.csv'
    SUMMARY_FILE = 'summary.json'
    PROFILE_FILE = 'profile.json'
    DEGREE_SUMMARY_FILE = 'degree_summary.json'
    ABANDONED_FILE = 'abandoned.json'
    OUTLIERS_FILE = 'outliers.json'
    CROSSTAB_FILE = 'crosstab.json'
    CCDF_DIR = 'ccdf'
    EVOLUTION_FILE = 'evolution.csv'
    ATTRIBUTION_FILE = 'attribution.csv'
    AGREEMENT_FILE = 'agreement.json'
    DEGREE_DIFF_FILE = 'degree_diff.csv'
    DEGREE_VALIDATION_FILE = 'degree_validation.json'
    EDGES_FILE = 'edges.txt'
    META_FILE = 'meta.csv'
    EXPECTED_LABELS_FILE = 'expected_labels.csv'


class DevelopmentConfig(Config):
    """Development configuration"""
    LOG_LEVEL = os.environ.get('BOWTIE_LOG_LEVEL', 'DEBUG')


class LargeGraphConfig(Config):
    """Configuration for graphs with hundreds of millions of arcs"""
    SCC_METHOD = 'scipy'
    INGEST_CHUNK_ARCS = 8_000_000
    
    # Large runs must say how many workers they may use
    def __init__(self):
        super().__init__()
        if not os.environ.get('BOWTIE_THREADS'):
            raise ValueError("BOWTIE_THREADS environment variable must be set for large runs")


class TestingConfig(Config):
    """Testing configuration"""
    SHOW_PROGRESS = False
    LOG_LEVEL = 'WARNING'
    ORACLE_MAX_N = 5000
    INGEST_CHUNK_ARCS = 4


# Configuration dictionary
config = {
    'development': DevelopmentConfig,
    'large': LargeGraphConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}


def get_config(config_name=None):
    """Instantiate the configuration named by the argument or BOWTIE_CONFIG"""
    name = config_name or os.environ.get('BOWTIE_CONFIG', 'default')
    if name not in config:
        raise ValueError(f"Unknown configuration '{name}'. Choose: {', '.join(sorted(config))}")
    return config[name]()
