"""Frequency-interaction splitting of products, transport commutators, and
the ratio harnesses for the product/commutator inequalities.

Offsets follow the usual convention: the low-by-three partial sum multiplies
each block (low-high and high-low pieces), and block pairs within distance 3
form the diagonal remainder.  All pointwise products are formed from 2/3-rule
dealiased factors, so the three pieces sum to the dealiased product exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bank import LPFilterBank, delta_j, p_le
from .corpus import scalar_sample, transport_pair
from .errors import DegenerateInputError
from .fields import (PHYSICAL, GridField, VectorField, as_physical,
                     dealias_field, derivative, max_spectral_divergence)
from .norms import NormSpec, _lp_of_array, field_norm, grad_sup_norm, sup_norm
from .reports import ExperimentReport

_OFFSET = 3  # blocks closer than this are "comparable frequency"


def _require_divfree(u: VectorField, who: str) -> None:
    if u.div_free:
        return
    if max_spectral_divergence(u) > 1e-6:
        raise ValueError(f"{who} requires a divergence-free vector field")


def _all_blocks(bank: LPFilterBank, f: GridField) -> list[np.ndarray]:
    """Physical-space pieces [low, block 0, ..., block j_max]; they sum to f."""
    out = [as_physical(p_le(bank, f, 0)).values]
    for j in range(bank.j_max + 1):
        out.append(as_physical(delta_j(bank, f, j)).values)
    return out


@dataclass(frozen=True)
class BonyPieces:
    """Three-way split of a (dealiased) pointwise product.

    ``low_high``: first factor strictly lower frequency; ``high_low`` the
    mirror; ``diagonal``: comparable-frequency pairs.  Their sum reproduces
    the dealiased product of the inputs.
    """

    low_high: GridField
    high_low: GridField
    diagonal: GridField

    def total(self) -> GridField:
        return self.low_high + self.high_low + self.diagonal


def bony(bank: LPFilterBank, f: GridField, g: GridField) -> BonyPieces:
    """Split f·g by relative frequency (inputs dealiased before multiplying)."""
    if f.grid != g.grid:
        raise ValueError("factors live on different grids")
    fd = as_physical(dealias_field(f))
    gd = as_physical(dealias_field(g))
    fb = _all_blocks(bank, fd)
    gb = _all_blocks(bank, gd)
    nb = len(fb)  # list index i holds block i-1 (index 0 is the low piece)
    fcum = np.cumsum(np.stack(fb), axis=0)  # fcum[i] = sum of list indices <= i

    low_high = np.zeros_like(fb[0])
    high_low = np.zeros_like(fb[0])
    for i in range(_OFFSET + 1, nb):  # block k = i-1 >= OFFSET
        low_high = low_high + fcum[i - _OFFSET - 1] * gb[i]
    gcum = np.cumsum(np.stack(gb), axis=0)
    for i in range(_OFFSET + 1, nb):
        high_low = high_low + gcum[i - _OFFSET - 1] * fb[i]
    diagonal = np.zeros_like(fb[0])
    for i in range(nb):
        for k in range(max(0, i - _OFFSET), min(nb, i + _OFFSET + 1)):
            diagonal = diagonal + fb[i] * gb[k]
    real = f.is_real and g.is_real
    mk = lambda a: GridField(f.grid, a, PHYSICAL, real)
    return BonyPieces(mk(low_high), mk(high_low), mk(diagonal))


# ---------------------------------------------------------------------------
# transport commutator


def _advect(u_comps: list[np.ndarray], g: GridField) -> np.ndarray:
    """Physical samples of sum_l u_l * d_l g (factors already dealiased)."""
    acc = None
    for l, ul in enumerate(u_comps):
        dg = as_physical(derivative(g, l)).values
        acc = ul * dg if acc is None else acc + ul * dg
    return acc


def commutator(bank: LPFilterBank, f: VectorField, g: GridField, j: int) -> GridField:
    """f.grad(block_j g) - block_j(f.grad g) with dealiased products."""
    _require_divfree(f, "commutator")
    if f.grid != g.grid:
        raise ValueError("fields live on different grids")
    fd = [as_physical(dealias_field(c)).values for c in f.components]
    gd = as_physical(dealias_field(g))
    term1 = _advect(fd, delta_j(bank, gd, j))
    inner = GridField(g.grid, _advect(fd, gd), PHYSICAL, f.is_real and g.is_real)
    term2 = as_physical(delta_j(bank, inner, j)).values
    return GridField(g.grid, term1 - term2, PHYSICAL, f.is_real and g.is_real)


@dataclass(frozen=True)
class CommutatorSequence:
    """All commutator blocks c_j, j = 0..j_max, for one (f, g) pair."""

    blocks: tuple[GridField, ...]

    @property
    def j_max(self) -> int:
        return len(self.blocks) - 1


def commutator_sequence(bank: LPFilterBank, f: VectorField, g: GridField) -> CommutatorSequence:
    return CommutatorSequence(tuple(commutator(bank, f, g, j)
                                    for j in range(bank.j_max + 1)))


def _sequence_tl_norm(seq: CommutatorSequence, spec: NormSpec) -> float:
    """|| (sum_j (2^{js}|c_j|)^q)^{1/q} ||_{L^p} over the block range."""
    g = seq.blocks[0].grid
    mags = [np.abs(as_physical(b).values) for b in seq.blocks]
    if math.isinf(spec.q):
        env = None
        for j, m in enumerate(mags):
            w = 2.0 ** (j * spec.s) * m
            env = w if env is None else np.maximum(env, w)
    else:
        env = sum((2.0 ** (j * spec.s) * m) ** spec.q for j, m in enumerate(mags)) ** (1.0 / spec.q)
    return _lp_of_array(env, spec.p, g.cell_volume)


def _jacobian_tl_norm(bank: LPFilterBank, u: VectorField, spec: NormSpec) -> float:
    """Quadrature aggregate of the dyadic norms of every du_l/dx_i."""
    total = 0.0
    for c in u.components:
        for a in range(u.grid.d):
            total += field_norm(bank, derivative(c, a), spec) ** 2
    return math.sqrt(total)


# ---------------------------------------------------------------------------
# inequality harnesses (each returns max-over-corpus-free single-pair ratio)


def verify_moser(bank: LPFilterBank, f: GridField, g: GridField, spec: NormSpec) -> float:
    """||fg|| / (||f||_inf ||g|| + ||g||_inf ||f||) in the dyadic norm ``spec``."""
    if spec.s <= 0:
        raise ValueError(f"the product estimate needs s > 0, got s={spec.s}")
    fd = as_physical(dealias_field(f))
    gd = as_physical(dealias_field(g))
    if np.abs(fd.values).max() == 0.0 or np.abs(gd.values).max() == 0.0:
        raise DegenerateInputError("zero factor in product-estimate ratio")
    prod = GridField(f.grid, fd.values * gd.values, PHYSICAL, fd.is_real and gd.is_real)
    lhs = field_norm(bank, prod, spec)
    rhs = (sup_norm(fd) * field_norm(bank, gd, spec)
           + sup_norm(gd) * field_norm(bank, fd, spec))
    if rhs == 0.0:
        raise DegenerateInputError("degenerate right-hand side in product estimate")
    return lhs / rhs


_TRANSPORT_FORMS = ("prod2", "prod3")


def verify_moser_transport(bank: LPFilterBank, u: VectorField, v: GridField,
                           spec: NormSpec, form: str = "prod2") -> float:
    """||u.grad v|| over the chosen advective right-hand side.

    ``prod2``: ||u||_inf ||grad v|| + ||grad v||_inf ||u||.
    ``prod3``: ||u||_inf ||grad v|| + ||v||_inf ||grad u||.
    """
    if form not in _TRANSPORT_FORMS:
        raise ValueError(f"unknown form {form!r}; expected one of {_TRANSPORT_FORMS}")
    if spec.s <= -1:
        raise ValueError(f"the transport estimate needs s > -1, got s={spec.s}")
    _require_divfree(u, "verify_moser_transport")
    ud = [as_physical(dealias_field(c)) for c in u.components]
    vd = as_physical(dealias_field(v))
    adv = GridField(v.grid, _advect([c.values for c in ud], vd), PHYSICAL,
                    u.is_real and v.is_real)
    lhs = field_norm(bank, adv, spec)

    grad_v = [derivative(vd, a) for a in range(v.grid.d)]
    gv_norm = math.sqrt(sum(field_norm(bank, c, spec) ** 2 for c in grad_v))
    u_sup = sup_norm(VectorField(tuple(ud)))
    if form == "prod2":
        u_norm = math.sqrt(sum(field_norm(bank, c, spec) ** 2 for c in ud))
        rhs = u_sup * gv_norm + grad_sup_norm(vd) * u_norm
    else:
        rhs = u_sup * gv_norm + sup_norm(vd) * _jacobian_tl_norm(bank, VectorField(tuple(ud)), spec)
    if lhs == 0.0:
        return 0.0
    if rhs == 0.0:
        raise DegenerateInputError("degenerate right-hand side in transport estimate")
    return lhs / rhs


_COMM_FORMS = ("esti1", "esti2")


def verify_commutator_estimate(bank: LPFilterBank, f: VectorField, g: GridField,
                               spec: NormSpec, form: str = "esti1") -> float:
    """Commutator-ladder norm over the chosen right-hand side.

    ``esti1``: ||grad f||_inf ||g|| + ||grad g||_inf ||f||.
    ``esti2``: ||grad f||_inf ||g|| + ||g||_inf ||grad f||.
    """
    if form not in _COMM_FORMS:
        raise ValueError(f"unknown form {form!r}; expected one of {_COMM_FORMS}")
    if form == "esti1" and spec.s <= 0:
        raise ValueError(f"form esti1 needs s > 0, got s={spec.s}")
    if form == "esti2" and spec.s <= -1:
        raise ValueError(f"form esti2 needs s > -1, got s={spec.s}")
    _require_divfree(f, "verify_commutator_estimate")
    seq = commutator_sequence(bank, f, g)
    lhs = _sequence_tl_norm(seq, spec)
    if lhs == 0.0:
        return 0.0
    fd = VectorField(tuple(as_physical(dealias_field(c)) for c in f.components))
    gd = as_physical(dealias_field(g))
    gf_sup = grad_sup_norm(fd)
    if form == "esti1":
        rhs = gf_sup * field_norm(bank, gd, spec) + grad_sup_norm(gd) * field_norm(bank, fd, spec)
    else:
        rhs = gf_sup * field_norm(bank, gd, spec) + sup_norm(gd) * _jacobian_tl_norm(bank, fd, spec)
    if rhs == 0.0:
        raise DegenerateInputError("degenerate right-hand side in commutator estimate")
    return lhs / rhs


# ---------------------------------------------------------------------------
# scan over the regime where the naive two-norm commutator bound breaks down


_FAMILIES = ("lacunary", "modulated-bump", "random")


def _lacunary_pair(grid, s: float, top: int):
    """Geometric sums of single modes up to frequency 2^top (exactly div-free u)."""
    x = grid.meshes()
    u1 = sum(2.0 ** (-m * s) * np.cos(2**m * x[1] + 0.7 * m) for m in range(1, top + 1))
    u2 = sum(2.0 ** (-m * s) * np.sin(2**m * x[0] + 0.3 * m) for m in range(1, top + 1))
    comps = [GridField(grid, u1, PHYSICAL, True), GridField(grid, u2, PHYSICAL, True)]
    for a in range(2, grid.d):
        comps.append(GridField(grid, np.zeros(grid.shape), PHYSICAL, True))
    u = VectorField(tuple(comps), div_free=True)
    v = sum(2.0 ** (-m * s) * np.cos(2**m * x[0] + 1.1 * m) for m in range(1, top + 1))
    return u, GridField(grid, v, PHYSICAL, True)


def _modulated_pair(grid, s: float, top: int):
    """A smooth low-frequency envelope carried to frequency 2^top."""
    x = grid.meshes()
    env = np.exp(np.cos(x[0]) + 0.5 * np.sin(x[1]))
    carrier = np.cos(2**top * x[0])
    v = GridField(grid, 2.0 ** (-top * s) * env * carrier, PHYSICAL, True)
    u1 = 2.0 ** (-top * s) * env * np.cos(2**top * x[1])
    comps = [GridField(grid, u1, PHYSICAL, True)] + [
        GridField(grid, np.zeros(grid.shape), PHYSICAL, True) for _ in range(grid.d - 1)]
    from .fields import vector_as_physical, vector_as_spectral
    from .fields import _leray_spectra  # projection keeps the scan honest

    spec = vector_as_spectral(VectorField(tuple(comps)))
    proj = _leray_spectra([c.values.copy() for c in spec.components], grid.n, grid.d)
    u = vector_as_physical(VectorField(tuple(
        GridField(grid, p, "spectral", True) for p in proj), div_free=True))
    u = VectorField(tuple(GridField(grid, c.values.real, PHYSICAL, True)
                          for c in u.components), div_free=True)
    return u, v


def _random_pair(grid, s: float, top: int):
    lo = max(1, 2 ** (top - 1))
    hi = min(grid.n // 3, 2**top)
    from .fields import SpectrumSpec, random_divergence_free, vector_as_physical

    u = vector_as_physical(random_divergence_free(grid, SpectrumSpec(s, (lo, hi), seed=900 + top)))
    g = scalar_sample(grid, 950 + top, decay=s, band=(lo, hi))
    return u, g


def counterexample_scan(bank: LPFilterBank, family: str, s: float, p: float,
                        q: float, scale_list) -> ExperimentReport:
    """Ratio profile of the two-norm commutator bound across frequency scales.

    For each scale N the family supplies a pair (u, v) active up to frequency
    2^N; the row records LHS / (||u||_F ||v||_F).  The profile is diagnostic
    output: no growth assertion is made here.
    """
    if family not in _FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {_FAMILIES}")
    scales = [int(N) for N in scale_list]
    grid = bank.grid
    if not scales or any(N < 1 for N in scales):
        raise ValueError("scale_list must contain levels >= 1")
    if max(scales) > bank.j_max - 2:
        raise ValueError(f"scales beyond {bank.j_max - 2} exceed the resolved band")
    spec = NormSpec(s, p, q, homogeneous=True)
    builders = {"lacunary": _lacunary_pair, "modulated-bump": _modulated_pair,
                "random": _random_pair}
    ratios = []
    for N in scales:
        u, v = builders[family](grid, s, N)
        seq = commutator_sequence(bank, u, v)
        lhs = _sequence_tl_norm(seq, spec)
        rhs = field_norm(bank, u, spec) * field_norm(bank, v, spec)
        if rhs == 0.0:
            raise DegenerateInputError(f"degenerate pair at scale {N}")
        ratios.append(lhs / rhs)
    return ExperimentReport(
        estimate_id="two_norm_commutator_scan",
        s=s, p=p, q=q, d=grid.d, n=grid.n,
        seeds=tuple(scales), ratios=tuple(ratios),
        meta={"family": family, "rows_are": "frequency scales N (active band up to 2^N)"},
    )


# ---------------------------------------------------------------------------
# corpus sweeps (shared by tests, calibration, and the CLI)


def moser_sweep(bank: LPFilterBank, spec: NormSpec, count: int, seed0: int) -> list[float]:
    from .corpus import scalar_pairs

    return [verify_moser(bank, f, g, spec)
            for f, g in scalar_pairs(bank.grid, count, seed0)]


def transport_sweep(bank: LPFilterBank, spec: NormSpec, form: str,
                    count: int, seed0: int) -> list[float]:
    return [verify_moser_transport(bank, *transport_pair(bank.grid, seed0 + i), spec, form)
            for i in range(count)]


def commutator_sweep(bank: LPFilterBank, spec: NormSpec, form: str,
                     count: int, seed0: int) -> list[float]:
    return [verify_commutator_estimate(bank, *transport_pair(bank.grid, seed0 + i), spec, form)
            for i in range(count)]
