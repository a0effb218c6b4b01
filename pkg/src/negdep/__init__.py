"""Negatively dependent sampling schemes.

Samplers for stratified, Latin hypercube, midpoint-lattice and randomized
rank-1 lattice point sets; an exact (rational arithmetic) analyzer for
pairwise dependence over anchored boxes; and a replication variance lab
comparing scheme quadratures to the Monte Carlo baseline.
"""

__version__ = "0.1.0"

from .exact import (
    CircularInterval,
    Rational,
    Residue,
    circular_overlap,
    format_rational,
    is_prime,
    mod_inverse,
    parse_rational,
    torus_dist,
)
from .rng import RngStream
from .schemes import (
    SchemeSpec,
    full_rsj,
    is_marginally_uniform,
    lhs_spec,
    patterson_spec,
    stratified_spec,
)
from .samplers import (
    PointSet,
    generate,
    lhs,
    patterson,
    point_set_from_csv,
    point_set_from_json,
    point_set_to_csv,
    point_set_to_json,
    rank1_lattice_points,
    rsj_rank1,
    stratified_1d,
)
from .analyzer import (
    AnchoredBox,
    BudgetExceededError,
    DependenceReport,
    HypothesisViolatedError,
    PairLaw,
    UnsupportedSchemeError,
    copula_equality_check,
    coordinate_independence_check,
    discrete_pair_pmf,
    no_shift_mass,
    nuod_scan,
    pair_box_prob,
    pair_marginal_prob,
    shift_only_conditional,
    stratified_pair_box_prob,
    triple_distinguisher,
)
from .variance import (
    Integrand,
    VarianceResult,
    integrand_library,
    mc_estimate,
    rqmc_estimate,
    variance_compare,
)
