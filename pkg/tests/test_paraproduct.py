"""Frequency-sorted product splitting, block commutators, sweep ratios.

The exact-identity tests pin the bookkeeping (the three pieces must re-sum
to the dealiased product, bit-for-bit up to roundoff); the ratio tests
freeze measured values so the estimate machinery cannot drift silently.
"""

import math

import numpy as np
import pytest

from lpflow import (DegenerateInputError, GridField, NormSpec, VectorField,
                    bony, commutator, commutator_sequence, counterexample_scan,
                    verify_commutator_estimate, verify_moser,
                    verify_moser_transport)
from lpflow.corpus import scalar_sample, transport_pair
from lpflow.fields import dealias_field
from lpflow.paraproduct import commutator_sweep, moser_sweep, transport_sweep

MOSER_SEED56 = 0.31188812465414134
PROD2_SEED300 = 0.14831309394561232
PROD3_SEED300 = 0.17680683455679547
ESTI1_SEED300 = 0.46475925312468364
ESTI2_SEED300 = 0.12532605613314318
ESTI1_NONENDPOINT = 0.37626445441536116
SCAN_LACUNARY_S2 = (0.051715461199199286, 0.040938360993777546,
                    0.03477337508847563)


def test_bony_pieces_resum_to_product(grid64, bank64):
    f = scalar_sample(grid64, 5)
    g = scalar_sample(grid64, 6)
    pieces = bony(bank64, f, g)
    prod = dealias_field(f).values * dealias_field(g).values
    rel = np.abs(pieces.total().values - prod).max() / np.abs(prod).max()
    print("splitting identity rel", rel)
    assert rel <= 1e-13


def test_bony_swap_symmetry(grid64, bank64):
    f = scalar_sample(grid64, 5)
    g = scalar_sample(grid64, 6)
    a = bony(bank64, f, g)
    b = bony(bank64, g, f)
    assert np.abs(a.low_high.values - b.high_low.values).max() == 0.0
    assert np.abs(a.diagonal.values - b.diagonal.values).max() < 1e-12


def test_bony_bilinear(grid64, bank64):
    f = scalar_sample(grid64, 5)
    fa = scalar_sample(grid64, 7)
    g = scalar_sample(grid64, 6)
    joint = bony(bank64, GridField(grid64, f.values + fa.values, "physical", True), g)
    parts = (bony(bank64, f, g), bony(bank64, fa, g))
    gap = np.abs(joint.low_high.values
                 - parts[0].low_high.values - parts[1].low_high.values).max()
    assert gap < 1e-12


def test_bony_constant_times_mode(grid64, bank64):
    x = grid64.meshes()
    c = GridField(grid64, np.full(grid64.shape, 2.5), "physical", True)
    m = GridField(grid64, np.cos(16 * x[0]), "physical", True)
    pieces = bony(bank64, c, m)
    # the constant sits below every annulus: all content is low-times-high
    assert np.abs(pieces.low_high.values - 2.5 * m.values).max() < 1e-12
    assert np.abs(pieces.high_low.values).max() < 1e-13
    assert np.abs(pieces.diagonal.values).max() < 1e-13


def test_bony_grid_mismatch(grid64, bank64):
    from lpflow import Grid
    f32 = scalar_sample(Grid(32, 2), 1)
    with pytest.raises(ValueError):
        bony(bank64, f32, f32)


def test_commutator_vanishes_for_constant_advection(grid64, bank64):
    u, g = transport_pair(grid64, 300)
    c = VectorField(tuple(GridField(grid64, np.full(grid64.shape, v), "physical", True)
                          for v in (0.7, -0.3)), div_free=True)
    cc = commutator(bank64, c, g, 3)
    assert np.abs(cc.values).max() < 1e-13


def test_commutator_linear_in_transported_factor(grid64, bank64):
    u, g = transport_pair(grid64, 300)
    g2 = scalar_sample(grid64, 77)
    joint = commutator(bank64, u,
                       GridField(grid64, g.values + g2.values, "physical", True), 4)
    split = commutator(bank64, u, g, 4).values + commutator(bank64, u, g2, 4).values
    scale = np.abs(split).max()
    assert np.abs(joint.values - split).max() / scale < 1e-11


def test_commutator_sequence_covers_all_blocks(grid64, bank64):
    u, g = transport_pair(grid64, 300)
    seq = commutator_sequence(bank64, u, g)
    assert seq.j_max == bank64.j_max
    assert len(seq.blocks) == bank64.j_max + 1


def test_requires_divergence_free(grid64, bank64):
    _, g = transport_pair(grid64, 300)
    x = grid64.meshes()
    bad = VectorField((GridField(grid64, np.sin(x[0]), "physical", True),
                       GridField(grid64, np.sin(x[1]), "physical", True)))
    with pytest.raises(ValueError):
        verify_moser_transport(bank64, bad, g, NormSpec(0, 1, 2, homogeneous=True))


def test_moser_ratio_frozen(grid64, bank64):
    f = scalar_sample(grid64, 5)
    g = scalar_sample(grid64, 6)
    spec = NormSpec(3, 1, 1, homogeneous=True)
    r = verify_moser(bank64, f, g, spec)
    assert abs(r - MOSER_SEED56) < 1e-12


def test_moser_scale_invariance(grid64, bank64):
    f = scalar_sample(grid64, 5)
    g = scalar_sample(grid64, 6)
    spec = NormSpec(3, 1, 1, homogeneous=True)
    r = verify_moser(bank64, f, g, spec)
    r2 = verify_moser(bank64, f * 3.7, g * 0.2, spec)
    assert abs(r - r2) / r <= 1e-10


def test_moser_needs_positive_smoothness(grid64, bank64):
    f = scalar_sample(grid64, 5)
    g = scalar_sample(grid64, 6)
    with pytest.raises(ValueError):
        verify_moser(bank64, f, g, NormSpec(0, 1, 1, homogeneous=True))


def test_moser_degenerate_zero_input(grid64, bank64):
    z = GridField(grid64, np.zeros(grid64.shape), "physical", True)
    f = scalar_sample(grid64, 5)
    with pytest.raises(DegenerateInputError):
        verify_moser(bank64, z, f, NormSpec(3, 1, 1, homogeneous=True))


def test_transport_forms_frozen(grid64, bank64):
    u, g = transport_pair(grid64, 300)
    spec = NormSpec(0, 1, 2, homogeneous=True)
    assert abs(verify_moser_transport(bank64, u, g, spec, "prod2") - PROD2_SEED300) < 1e-12
    assert abs(verify_moser_transport(bank64, u, g, spec, "prod3") - PROD3_SEED300) < 1e-12
    with pytest.raises(ValueError):
        verify_moser_transport(bank64, u, g, spec, "prod9")


def test_commutator_estimates_frozen(grid64, bank64):
    u, g = transport_pair(grid64, 300)
    spec = NormSpec(3, 1, 1, homogeneous=True)
    assert abs(verify_commutator_estimate(bank64, u, g, spec, "esti1") - ESTI1_SEED300) < 1e-12
    assert abs(verify_commutator_estimate(bank64, u, g, spec, "esti2") - ESTI2_SEED300) < 1e-12
    r = verify_commutator_estimate(bank64, u, g, NormSpec(2.5, 2, 2, homogeneous=True), "esti1")
    assert abs(r - ESTI1_NONENDPOINT) < 1e-12


def test_commutator_estimate_index_ranges(grid64, bank64):
    u, g = transport_pair(grid64, 300)
    with pytest.raises(ValueError):
        verify_commutator_estimate(bank64, u, g, NormSpec(0, 1, 1, homogeneous=True), "esti1")
    with pytest.raises(ValueError):
        verify_commutator_estimate(bank64, u, g,
                                   NormSpec(-1.0, 1, 1, homogeneous=True), "esti2")
    with pytest.raises(ValueError):
        verify_commutator_estimate(bank64, u, g, NormSpec(3, 1, 1, homogeneous=True),
                                   "esti9")


def test_sweeps_are_deterministic(bank64):
    spec = NormSpec(3, 1, 1, homogeneous=True)
    a = moser_sweep(bank64, spec, 3, 100)
    b = moser_sweep(bank64, spec, 3, 100)
    assert a == b
    t = transport_sweep(bank64, NormSpec(0, 1, 2, homogeneous=True), "prod2", 2, 300)
    assert abs(t[0] - PROD2_SEED300) < 1e-12
    c = commutator_sweep(bank64, spec, "esti1", 2, 300)
    assert abs(c[0] - ESTI1_SEED300) < 1e-12


def test_counterexample_scan_lacunary(bank64):
    rep = counterexample_scan(bank64, "lacunary", 2.0, 2.0, 2.0, [2, 3, 4])
    assert rep.estimate_id == "two_norm_commutator_scan"
    assert list(rep.seeds) == [2, 3, 4]
    for got, want in zip(rep.ratios, SCAN_LACUNARY_S2):
        assert abs(got - want) < 1e-12


def test_counterexample_scan_validation(bank64):
    with pytest.raises(ValueError):
        counterexample_scan(bank64, "smooth", 2.0, 2.0, 2.0, [2])
    with pytest.raises(ValueError):
        counterexample_scan(bank64, "lacunary", 2.0, 2.0, 2.0, [0])
    with pytest.raises(ValueError):
        counterexample_scan(bank64, "lacunary", 2.0, 2.0, 2.0, [bank64.j_max])


def test_counterexample_families_all_run(bank64):
    for family in ("lacunary", "modulated-bump", "random"):
        rep = counterexample_scan(bank64, family, 1.0, 1.0, 1.0, [2, 3])
        assert len(rep.ratios) == 2
        assert all(math.isfinite(r) and r > 0 for r in rep.ratios)
