"""Granular rough-set toolkit: tolerance blocks from tabular data, granular
approximations, and cluster validation and tolerance discovery built on them."""

__version__ = "0.1.0"

from .agrssa import (
    AgrssaConfig,
    LargeMindedReasoner,
    Selection,
    ToleranceModel,
    agrssa_lmr,
    agrssa_m,
    build_reasoner,
    explain,
    lmr_apply,
    quantile_boundaries,
)
from .approximation import GranularApproximation, accuracy, approximate, lower, upper, xi5
from .chains import (
    ChainBlockSystem,
    UniversalBlockDistribution,
    enumerate_chain_congruences,
    enumerate_chain_glued,
    enumerate_chain_tolerances,
    is_compatible_tolerance,
    validate_lattice_blocks,
)
from .table import InformationTable, diff_tables, load_table
from .tolerance import (
    BlockSystem,
    DistanceSpec,
    Tolerance,
    blocks,
    combine_tolerances,
    product_tolerance,
    similarity_matrix,
    tolerance_from_distance,
)
from .validation import SoftClustering, closeness, validate_clusters
