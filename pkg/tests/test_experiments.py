"""Data-dependence experiments for the solution map."""

import math

import numpy as np
import pytest

from lpflow import (DegenerateInputError, NormSpec, bona_smith_experiment,
                    continuity_assembly, interpolation_ratio,
                    lipschitz_lowernorm_experiment)
from lpflow.corpus import divfree_sample, scalar_sample
from lpflow.experiments import DependenceConfig, boundedness_experiment
from lpflow.norms import field_norm

BOUNDEDNESS_MAX = 1.0005057465427485
RHO_N345 = (1.0045143136383348, 1.0109110786033393, 1.05813724940677)
SIGMA_N3 = 0.16955861661531602
SIGMA_N5 = 0.04569727622134795
CONTINUITY_RATIO = 0.43912443841771714
INTERP_SAMPLE5 = 0.865910185863096


def _calibrated_data(grid):
    u0 = divfree_sample(grid, 21, decay=6.0, band=(1, 21))
    return u0 * (0.5 / max(float(np.abs(c.values).max()) for c in u0.components))


def _cfg():
    return DependenceConfig(norm_spec=NormSpec(3, 1, 1), T=0.2, dt=1e-3,
                            N_list=(3, 4, 5), eps_list=(1e-1, 1e-2, 1e-3, 1e-4),
                            seed=21)


def test_config_validation():
    _cfg()
    with pytest.raises(ValueError):
        DependenceConfig(norm_spec=NormSpec(3, 1, 1), T=0.1, dt=1e-3,
                         N_list=(4, 3))
    with pytest.raises(ValueError):
        DependenceConfig(norm_spec=NormSpec(3, 1, 1), T=0.1, dt=1e-3,
                         eps_list=(1e-3, 1e-2))


def test_level_check(grid64):
    cfg = DependenceConfig(norm_spec=NormSpec(3, 1, 1), T=0.1, dt=1e-3,
                           N_list=(3, 9))
    with pytest.raises(ValueError):
        cfg.check_levels(grid64)


def test_boundedness(grid64):
    rep = boundedness_experiment(_calibrated_data(grid64), _cfg())
    assert rep.estimate_id == "solution_map_boundedness"
    assert rep.ratios[0] == 1.0
    assert abs(rep.max - BOUNDEDNESS_MAX) < 1e-9
    assert rep.max <= 2.0


def test_lipschitz_modulus_stable_in_eps(grid64):
    u0 = _calibrated_data(grid64)
    w = divfree_sample(grid64, 22, decay=2.0, band=(1, 8))
    rep = lipschitz_lowernorm_experiment(u0, w, _cfg())
    assert rep.estimate_id == "lipschitz_lower_norm"
    assert len(rep.ratios) == 4
    assert max(rep.ratios) / min(rep.ratios) <= 2.0
    for r in rep.ratios:
        assert r == pytest.approx(1.0, abs=1e-6)


def test_lipschitz_rejects_zero_direction(grid64):
    u0 = _calibrated_data(grid64)
    zero = u0 * 0.0
    with pytest.raises(DegenerateInputError):
        lipschitz_lowernorm_experiment(u0, zero, _cfg())


def test_bona_smith_profile(grid64):
    rep = bona_smith_experiment(_calibrated_data(grid64), _cfg())
    assert rep.estimate_id == "mollified_data_continuity"
    for got, want in zip(rep.ratios, RHO_N345):
        assert got == pytest.approx(want, rel=1e-9)
    assert max(rep.ratios) / min(rep.ratios) <= 3.0
    sigma = dict((int(N), v) for N, v in rep.tables["sigma"])
    assert sigma[3] == pytest.approx(SIGMA_N3, rel=1e-9)
    assert sigma[5] == pytest.approx(SIGMA_N5, rel=1e-9)
    assert sigma[5] <= 2.0 * sigma[3]


def test_continuity_chain_dominates(grid64, bank64):
    u0 = _calibrated_data(grid64)
    w = divfree_sample(grid64, 22, decay=2.0, band=(1, 8))
    psi = u0 + w * (1e-3 / field_norm(bank64, w, NormSpec(3, 1, 1)))
    rep = continuity_assembly(u0, psi, _cfg())
    assert rep.estimate_id == "continuity_chain_assembly"
    (ratio,) = rep.ratios
    assert ratio == pytest.approx(CONTINUITY_RATIO, rel=1e-9)
    pieces = dict(rep.tables["pieces"])
    assert pieces["direct"] <= 1.05 * pieces["chain"]
    assert pieces["chain"] <= (pieces["tail_u"] + pieces["tail_psi"]
                               + pieces["interpolated_diff"]) * (1 + 1e-12)


def test_interpolation_inequality(grid64, bank64):
    f = scalar_sample(grid64, 5)
    r = interpolation_ratio(bank64, f, NormSpec(3, 1, 1))
    assert r == pytest.approx(INTERP_SAMPLE5, rel=1e-12)
    worst = max(interpolation_ratio(bank64, scalar_sample(grid64, 60 + i),
                                    NormSpec(3, 1, 1)) for i in range(10))
    print("worst interpolation ratio", worst)
    assert worst <= 1.0 + 1e-12
