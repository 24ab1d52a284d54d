"""Product-group coordination: componentwise statistics and experiments.

A product element's statistics are the sums of the component statistics, so
the Hajek projection of the total inversion count is the sum of the
per-component projections (the conditional expectation of the total given
one coordinate differs from the component's own conditional expectation only
by constants, which cancel into the global centering).  The experiment
drivers in :mod:`weylstats.asymptotics` already accept ProductGroupSpec; the
wrappers here enforce the argument type and keep the product-facing names.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .asymptotics import CltConfig, CltReport, EvltConfig, EvltReport, run_clt, run_evlt
from .core import ProductGroupSpec
from .stats import hajek_inv


def product_hajek_inv(z_list: Sequence[Sequence[float]], spec: ProductGroupSpec) -> float:
    """Hajek projection of the total inversion count of a product draw."""
    if len(z_list) != len(spec.components):
        raise ValueError("latent vector count does not match the component count")
    total = 0.0
    for z, comp in zip(z_list, spec.components):
        zv = np.asarray(z, dtype=float)
        if zv.shape != (comp.rank,):
            raise ValueError(f"latent length mismatch for component {comp.label()}")
        total += hajek_inv(zv, comp)
    return total


def _require_product(spec) -> ProductGroupSpec:
    if not isinstance(spec, ProductGroupSpec):
        raise ValueError("this driver needs a ProductGroupSpec")
    return spec


def run_clt_product(config: CltConfig) -> CltReport:
    _require_product(config.spec)
    return run_clt(config)


def run_evlt_product(config: EvltConfig) -> EvltReport:
    _require_product(config.spec)
    return run_evlt(config)
