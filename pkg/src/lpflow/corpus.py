"""Seeded sample corpora shared by the test suite, calibration, and the CLI.

Every corpus is a pure function of (grid, count, base seed), so stored
calibration maxima remain comparable across runs and machines.
"""

from __future__ import annotations

from .fields import (Grid, GridField, SpectrumSpec, VectorField, as_physical,
                     random_band_limited, random_divergence_free,
                     vector_as_physical)

DEFAULT_DECAY = 2.0


def default_band(grid: Grid) -> tuple[int, int]:
    """Band kept fully alias-free under the 2/3 rule."""
    return (1, grid.n // 3)


def scalar_sample(grid: Grid, seed: int, decay: float = DEFAULT_DECAY,
                  band: tuple[int, int] | None = None) -> GridField:
    spec = SpectrumSpec(decay, band or default_band(grid), seed)
    return as_physical(random_band_limited(grid, spec))


def scalar_samples(grid: Grid, count: int, seed0: int,
                   decay: float = DEFAULT_DECAY,
                   band: tuple[int, int] | None = None) -> list[GridField]:
    return [scalar_sample(grid, seed0 + i, decay, band) for i in range(count)]


def scalar_pairs(grid: Grid, count: int, seed0: int,
                 decay: float = DEFAULT_DECAY,
                 band: tuple[int, int] | None = None):
    """Independent (f, g) pairs; pair i uses seeds (seed0+2i, seed0+2i+1)."""
    return [(scalar_sample(grid, seed0 + 2 * i, decay, band),
             scalar_sample(grid, seed0 + 2 * i + 1, decay, band))
            for i in range(count)]


def divfree_sample(grid: Grid, seed: int, decay: float = DEFAULT_DECAY,
                   band: tuple[int, int] | None = None) -> VectorField:
    spec = SpectrumSpec(decay, band or default_band(grid), seed)
    return vector_as_physical(random_divergence_free(grid, spec))


def divfree_samples(grid: Grid, count: int, seed0: int,
                    decay: float = DEFAULT_DECAY,
                    band: tuple[int, int] | None = None) -> list[VectorField]:
    return [divfree_sample(grid, seed0 + i, decay, band) for i in range(count)]


def transport_pair(grid: Grid, seed: int, decay: float = DEFAULT_DECAY,
                   band: tuple[int, int] | None = None):
    """A (divergence-free u, scalar g) pair for commutator/transport sweeps."""
    return divfree_sample(grid, seed, decay, band), scalar_sample(grid, seed + 5000, decay, band)
