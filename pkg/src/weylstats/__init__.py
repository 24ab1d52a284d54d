"""Inversion and descent statistics of random classical Weyl group elements.

Library layout:

* :mod:`weylstats.core`        domain types, signed ranking
* :mod:`weylstats.sampler`     seeded GR(p) latent vectors and group elements
* :mod:`weylstats.stats`       inversions, descents, Hajek projections,
                               1-dependent decompositions
* :mod:`weylstats.moments`     exact closed-form moments
* :mod:`weylstats.oracle`      exhaustive enumeration with exact rationals
* :mod:`weylstats.asymptotics` CLT / extreme-value Monte Carlo experiments
* :mod:`weylstats.products`    direct products of the above
* :mod:`weylstats.cli`         command-line front end
"""
from .core import (
    GroupFamily,
    GroupSpec,
    JointStat,
    ProductGroupSpec,
    SignedPermutation,
    fix_last_sign,
    neg_count,
    rank_permutation,
)
from .sampler import (
    RngStream,
    gr_cdf,
    sample_gr,
    sample_group_element,
    sample_latent,
    sample_product_element,
)
from .stats import (
    count_descents,
    count_inversions,
    element_statistics,
    hajek_des,
    hajek_inv,
    latent_statistics,
    m_dependent_decomposition,
    product_statistics,
)
from .moments import (
    MomentSet,
    cov_hajek_des,
    cov_inv_des,
    leading_coefficient,
    mean_des,
    mean_inv,
    moment_set,
    product_moments,
    var_des,
    var_hajek_inv,
    var_inv,
)
from .oracle import (
    BudgetExceededError,
    GenPoly,
    JointPmf,
    enumerate_elements,
    exact_joint_pmf,
    exact_moments,
    factors_as_product,
    generating_polynomial,
    mahonian_pmf,
)
from .asymptotics import (
    CltConfig,
    CltReport,
    EvltConfig,
    EvltReport,
    bvn_cdf,
    gumbel_alpha,
    gumbel_cdf,
    hajek_quality,
    run_clt,
    run_evlt,
    schedule_k,
    std_normal_cdf,
)
from .products import product_hajek_inv, run_clt_product, run_evlt_product

__version__ = "0.1.0"
