"""Clustering of mixed numeric and nominal attributes by exploratory factor analysis."""

from .cluster import Rule, assign, cluster_report, prune
from .correlation import correlation_matrix, determination_matrix, pearson
from .dataset import ColumnKind, MissingPolicy, clean, infer_kinds, load_csv
from .eigen import eigh_symmetric
from .encoder import encode_table
from .errors import AttrClusterError, ConfigError, DataError, NumericError
from .factors import (
    common_variance,
    cumulative_variance,
    full_loadings,
    reduce,
    select_factor_count,
    simulate_from_factors,
    variance_report,
    varimax_rotate,
)
from .pipeline import RunConfig, analyze, run_pipeline
from .ranking import apply_ranking, rank_with_ties

__version__ = "0.1.0"
