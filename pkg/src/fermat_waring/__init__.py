"""Fermat-Waring hyperbolic hypersurfaces and the dimension counts behind them."""

__version__ = "0.1.0"

from .fields import QQ, ComplexField, FieldMismatchError, GF, PrimeField, RationalField, parse_field
from .grassmann import (
    GammaParams,
    RankStratumQuery,
    codim_gamma,
    count_rank_le,
    estimate_gamma_codim,
    gamma_membership,
    grassmannian_dim,
    rank_stratum_codim,
)
from .hypersurface import (
    HypersurfaceSpec,
    LinearForm,
    SparsePolynomial,
    build_hypersurface,
    evaluate,
    expand_power_sum,
    family_dimension,
    plane_section_model,
)
from .linalg import Matrix, Subspace, intersect, kernel, rank, subspace_sum
from .partitions import (
    CertificateReport,
    Partition,
    bad_codim,
    certify,
    degree_for,
    enumerate_partitions,
    moduli_dim,
    tfg_degree_bound,
)
from .probe import DiagonalPlane, MuAssignment, build_diagonal_plane, construct_bad_V, probe, sample_mu
