"""Seeded, reproducible sampling of latent vectors and group elements.

Streams are counter-based: ``RngStream(seed, stream_index)`` builds a Philox
generator keyed by ``SeedSequence(entropy=seed, spawn_key=(stream_index,))``,
so identical (seed, stream_index) pairs reproduce identical output sequences
and distinct stream indices give independent streams regardless of creation
order or worker scheduling.  Replicate j of an experiment always consumes
stream j; auxiliary draws (pilot estimates, self-tests) live in reserved
high stream indices so they never collide with replicates.

The latent law is GR(p), the generalized Rademacher distribution: sign -1
with probability p, +1 with probability q = 1-p, magnitude uniform on (0,1),
independent of the sign.  Its distribution function is

    F_p(z) = p*z + p on [-1, 0],   F_p(z) = q*z + p on [0, 1].

Draw order is fixed (magnitudes first, then signs) so that sequences are
reproducible byte for byte.
"""
from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .core import (
    BiasLike,
    GroupFamily,
    GroupSpec,
    ProductGroupSpec,
    SignedPermutation,
    as_bias,
    rank_permutation,
)

#: reserved stream indices for draws that must not collide with replicates
PILOT_STREAM = 1 << 62
SELF_TEST_STREAM_BASE = (1 << 62) + (1 << 61)


@dataclass(frozen=True)
class RngStream:
    """Addressable random stream (seed, stream_index)."""

    seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit nonnegative integer")
        if self.stream_index < 0:
            raise ValueError("stream_index must be nonnegative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.Philox(ss))

    def component_generators(self, count: int) -> list[np.random.Generator]:
        """Independent substreams for the components of a product draw."""
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_index,))
        return [np.random.Generator(np.random.Philox(child)) for child in ss.spawn(count)]


def gr_cdf(p: BiasLike, z: float) -> float:
    """Distribution function F_p of GR(p); clamps outside [-1, 1]."""
    pf = float(as_bias(p))
    if z <= -1.0:
        return 0.0
    if z >= 1.0:
        return 1.0
    if z <= 0.0:
        return pf * z + pf
    return (1.0 - pf) * z + pf


def gr_array(p: float, gen: np.random.Generator, shape) -> np.ndarray:
    """Array of independent GR(p) draws (magnitudes first, then signs)."""
    u = gen.random(shape)
    if p == 0.0:
        return u
    if p == 1.0:
        return -u
    s = gen.random(shape)
    return np.where(s < p, -u, u)


def sample_gr(p: BiasLike, rng: RngStream) -> float:
    """One GR(p) draw from the head of the stream.

    Streams are values: the same (seed, stream_index) always yields the same
    draw.  Use distinct stream indices (or a batch draw from one generator)
    for independent samples.
    """
    pf = float(as_bias(p))
    return float(gr_array(pf, rng.generator(), ()))


def sample_latent(spec: GroupSpec, rng: RngStream) -> np.ndarray:
    """Vector of rank(spec) independent GR(bias) draws (bias 0 for family S).

    Raw latent vector: for family D the induced sign product may be negative;
    the element sampler applies :func:`weylstats.core.fix_last_sign` first.
    """
    return gr_array(spec.bias_float, rng.generator(), (spec.rank,))


def _signed_entries(perm: np.ndarray, signs: np.ndarray) -> SignedPermutation:
    return SignedPermutation(tuple(int(s * v) for s, v in zip(signs, perm)))


def sample_group_element(spec: GroupSpec, rng: RngStream) -> SignedPermutation:
    """Draw one element of the group.

    S: uniform.  B: uniform unsigned permutation with independent p-biased
    signs, point mass p^neg(pi) q^(n-neg(pi)) / n!.  D: uniform unsigned
    permutation, p-biased signs at positions 1..n-1, last sign forced so the
    sign product is positive, point mass p^a q^(n-1-a) / n! with a the number
    of negatives among the first n-1 positions.

    This route is intentionally independent of the latent construction
    (sample_latent followed by ranking); the two are cross-validated
    distributionally in the tests.
    """
    gen = rng.generator()
    n = spec.rank
    perm = gen.permutation(n) + 1
    if spec.family is GroupFamily.S:
        return SignedPermutation(tuple(int(v) for v in perm))
    p = spec.bias_float
    if spec.family is GroupFamily.B:
        signs = np.where(gen.random(n) < p, -1, 1)
        return _signed_entries(perm, signs)
    signs = np.empty(n, dtype=np.int64)
    signs[: n - 1] = np.where(gen.random(n - 1) < p, -1, 1)
    signs[n - 1] = np.prod(signs[: n - 1]) if n > 1 else 1
    return _signed_entries(perm, signs)


def sample_element_via_latent(spec: GroupSpec, rng: RngStream) -> SignedPermutation:
    """Latent route: draw GR vector, fix the last sign for family D, rank."""
    from .core import fix_last_sign

    z = sample_latent(spec, rng)
    if spec.family is GroupFamily.D:
        z = fix_last_sign(z)
    return rank_permutation(z, spec.family)


def sample_product_element(spec: ProductGroupSpec, rng: RngStream) -> list[SignedPermutation]:
    """Independent component draws from distinct substreams of ``rng``."""
    gens = rng.component_generators(len(spec.components))
    out = []
    for comp, gen in zip(spec.components, gens):
        sub = _GeneratorStream(gen)
        out.append(sample_group_element(comp, sub))
    return out


class _GeneratorStream:
    """Adapter presenting an existing Generator through the RngStream API."""

    def __init__(self, gen: np.random.Generator):
        self._gen = gen

    def generator(self) -> np.random.Generator:
        return self._gen
