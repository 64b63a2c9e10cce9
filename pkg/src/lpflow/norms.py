"""Dyadic function-space norms and the inequality harnesses built on them.

The Triebel-Lizorkin norm integrates the weighted block ladder pointwise
before taking the Lebesgue norm,

    || ( |P_{<=0} f|^q + sum_{j>=0} 2^{j s q} |block_j f|^q )^{1/q} ||_{L^p},

while the Besov norm swaps the order (block norms first, then the ladder
sum).  Homogeneous variants drop the low-pass term; on an integer frequency
lattice all blocks with j < 0 vanish identically, so the ladder over j >= 0
is the whole homogeneous ladder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .bank import LPFilterBank, decompose, radial_cutoff
from .errors import DegenerateInputError, ResolutionError
from .fields import (PHYSICAL, Grid, GridField, VectorField, apply_multiplier,
                     as_physical, as_spectral, wavenumber_norm)

_FLAVORS = ("tl", "besov")


@dataclass(frozen=True)
class NormSpec:
    """Parameters (s, p, q) of one dyadic norm.

    ``flavor`` selects Triebel-Lizorkin ("tl") or Besov ("besov");
    ``homogeneous`` drops the low-pass term.  Use ``math.inf`` for p or q
    where allowed (p must stay finite in the Triebel-Lizorkin scale).
    """

    s: float
    p: float
    q: float
    homogeneous: bool = False
    flavor: str = "tl"

    def __post_init__(self):
        if self.flavor not in _FLAVORS:
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if self.p < 1 or self.q < 1:
            raise ValueError(f"integrability indices need p, q >= 1, got p={self.p}, q={self.q}")
        if self.flavor == "tl" and math.isinf(self.p):
            raise ValueError("the Triebel-Lizorkin scale requires p < infinity")

    @property
    def label(self) -> str:
        head = ("h" if self.homogeneous else "") + ("F" if self.flavor == "tl" else "B")
        return f"{head}{_fmt(self.s)}_{_fmt(self.p)}_{_fmt(self.q)}"


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:g}"


def _lp_of_array(a: np.ndarray, p: float, cell_volume: float) -> float:
    if math.isinf(p):
        return float(a.max()) if a.size else 0.0
    return float((cell_volume * (a**p).sum()) ** (1.0 / p))


def lp_norm(f: GridField | VectorField, p: float) -> float:
    """Lebesgue norm by grid quadrature; p = inf gives the sample maximum.

    Vector fields use the pointwise Euclidean magnitude.
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if isinstance(f, VectorField):
        mag = np.sqrt(sum(np.abs(as_physical(c).values) ** 2 for c in f.components))
        return _lp_of_array(mag, p, f.grid.cell_volume)
    vals = np.abs(as_physical(f).values)
    return _lp_of_array(vals, p, f.grid.cell_volume)


def _block_magnitudes(bank: LPFilterBank, f: GridField):
    dec = decompose(bank, f)
    low = np.abs(as_physical(dec.low).values)
    blocks = [np.abs(as_physical(b).values) for b in dec.blocks]
    return low, blocks


def _tl_ladder(low: np.ndarray, blocks: list[np.ndarray], spec: NormSpec) -> np.ndarray:
    weights = [2.0 ** (j * spec.s) for j in range(len(blocks))]
    if math.isinf(spec.q):
        acc = np.zeros_like(blocks[0])
        if not spec.homogeneous:
            acc = low.copy()
        for w, b in zip(weights, blocks):
            np.maximum(acc, w * b, out=acc)
        return acc
    acc = np.zeros_like(blocks[0])
    if not spec.homogeneous:
        acc += low**spec.q
    for w, b in zip(weights, blocks):
        acc += (w * b) ** spec.q
    return acc ** (1.0 / spec.q)


def tl_norm(bank: LPFilterBank, f: GridField, spec: NormSpec) -> float:
    """Triebel-Lizorkin norm of a scalar field."""
    spec = replace(spec, flavor="tl")
    low, blocks = _block_magnitudes(bank, f)
    ladder = _tl_ladder(low, blocks, spec)
    return _lp_of_array(ladder, spec.p, f.grid.cell_volume)


def besov_norm(bank: LPFilterBank, f: GridField, spec: NormSpec) -> float:
    """Besov norm of a scalar field."""
    spec = replace(spec, flavor="besov")
    low, blocks = _block_magnitudes(bank, f)
    cv = f.grid.cell_volume
    block_norms = [_lp_of_array(b, spec.p, cv) for b in blocks]
    weighted = [2.0 ** (j * spec.s) * bn for j, bn in enumerate(block_norms)]
    terms = weighted if spec.homogeneous else [_lp_of_array(low, spec.p, cv)] + weighted
    if math.isinf(spec.q):
        return max(terms)
    return float(sum(t**spec.q for t in terms) ** (1.0 / spec.q))


def field_norm(bank: LPFilterBank, f: GridField | VectorField, spec: NormSpec) -> float:
    """Dyadic norm of a scalar or vector field.

    Vector fields aggregate component norms in quadrature (little-l2), which
    is equivalent to any other componentwise convention up to fixed factors.
    """
    fn = tl_norm if spec.flavor == "tl" else besov_norm
    if isinstance(f, VectorField):
        return float(np.sqrt(sum(fn(bank, c, spec) ** 2 for c in f.components)))
    return fn(bank, f, spec)


def sup_norm(f: GridField | VectorField) -> float:
    return lp_norm(f, math.inf)


def grad_sup_norm(u: GridField | VectorField) -> float:
    """Sup of the Euclidean norm of the (component-wise) gradient."""
    from .fields import derivative

    comps = u.components if isinstance(u, VectorField) else (u,)
    acc = None
    for c in comps:
        for a in range(c.grid.d):
            g = np.abs(as_physical(derivative(c, a)).values) ** 2
            acc = g if acc is None else acc + g
    return float(np.sqrt(acc).max())


# ---------------------------------------------------------------------------
# ratio harnesses


def verify_equivalence(bank: LPFilterBank, f: GridField, s: float, p: float,
                       q: float) -> float:
    """Ratio ||f||_{F^s} / (||f||_{L^p} + ||f||_{F^s homogeneous}), s > 0."""
    if s <= 0:
        raise ValueError(f"equivalence requires s > 0, got s={s}")
    den = lp_norm(f, p) + tl_norm(bank, f, NormSpec(s, p, q, homogeneous=True))
    if den == 0.0:
        raise DegenerateInputError("zero field in equivalence ratio")
    return tl_norm(bank, f, NormSpec(s, p, q)) / den


def verify_embedding(bank: LPFilterBank, f: GridField, source: tuple[float, float, float],
                     target: tuple[float, float]) -> float:
    """Sharp-scaling embedding ratio between homogeneous norms.

    ``source`` = (s0, p0, q0) indexes the Triebel-Lizorkin side, ``target`` =
    (s1, p1) the Besov side with secondary index q = p0.  The scaling balance
    s0 - d/p0 == s1 - d/p1 with p0 < p1 is required.
    """
    s0, p0, q0 = source
    s1, p1 = target
    d = f.grid.d
    if math.isinf(p0) or not p0 < p1:
        raise ValueError(f"embedding requires p0 < p1, got p0={p0}, p1={p1}")
    lhs_scale = s0 - d / p0
    rhs_scale = s1 - (0.0 if math.isinf(p1) else d / p1)
    if abs(lhs_scale - rhs_scale) > 1e-12:
        raise ValueError(
            f"scaling mismatch: s0 - d/p0 = {lhs_scale} but s1 - d/p1 = {rhs_scale}")
    den = tl_norm(bank, f, NormSpec(s0, p0, q0, homogeneous=True))
    if den == 0.0:
        raise DegenerateInputError("zero field in embedding ratio")
    num = besov_norm(bank, f, NormSpec(s1, p1, p0, homogeneous=True, flavor="besov"))
    return num / den


def fractional_laplacian_half(f: GridField, order: float) -> GridField:
    """|k|^order spectral multiplier (the k = 0 mode is annihilated)."""
    kk = wavenumber_norm(f.grid.n, f.grid.d)
    mult = np.zeros(f.grid.shape)
    nz = kk > 0
    mult[nz] = kk[nz] ** order
    return apply_multiplier(f, mult)


def verify_lifting(bank: LPFilterBank, f: GridField, s: float, p: float, q: float,
                   k: float) -> float:
    """Ratio ||f||_{F^{s+k} hom} / || |D|^k f ||_{F^s hom} for zero-mean f."""
    F = as_spectral(f)
    mean = abs(F.values.flat[0])
    scale = np.abs(F.values).max()
    if scale > 0 and mean > 1e-10 * scale:
        raise ValueError("lifting ratio requires a zero-mean field")
    den = tl_norm(bank, fractional_laplacian_half(f, k), NormSpec(s, p, q, homogeneous=True))
    if den == 0.0:
        raise DegenerateInputError("zero field in lifting ratio")
    num = tl_norm(bank, f, NormSpec(s + k, p, q, homogeneous=True))
    return num / den


# ---------------------------------------------------------------------------
# L^1 kernel bound for the projected second-order symbol


def _kernel_term_l1(symbol: np.ndarray) -> float:
    # || F^{-1} g ||_{L^1} by box quadrature; with symbol samples on the dual
    # lattice of a periodic box the quadrature weights collapse so that the
    # L^1 norm is just the l1 norm of the inverse DFT.
    return float(np.abs(np.fft.ifftn(symbol)).sum())


def kernel_l1_terms(profile: str = "exp", l: int = 0, k: int = 0, i: int = 0,
                    refinement: int = 7, d: int = 2, tail_tol: float = 1e-6,
                    max_terms: int = 60) -> list[tuple[int, float]]:
    """Per-scale L^1 kernel norms 2^j || F^{-1}( m(2^j .) psi * xi_i ) ||_{L^1}.

    ``m`` is the symbol of the low-pass-projected operator
    (-Laplace)^{-1} d_l d_k, ``psi`` the unit annulus bump.  Terms are listed
    for j = 0, -1, -2, ... until the geometric tail drops below ``tail_tol``.
    The transform is evaluated on an auxiliary box of side 2^refinement with a
    dual lattice fine enough to resolve the annulus.
    """
    for name, ax in (("l", l), ("k", k), ("i", i)):
        if not 0 <= ax < d:
            raise ValueError(f"axis {name}={ax} out of range for dimension {d}")
    box = 2.0**refinement
    dxi = 2.0 * np.pi / box
    if dxi > 0.5:
        raise ResolutionError(
            f"refinement {refinement} gives frequency spacing {dxi:.3f} > 0.5; "
            "the annulus [1/2, 2] is unresolved")
    # Dual lattice must reach past the annulus with a margin; keep x-sampling
    # at spacing pi/8 for an accurate quadrature of |kernel|.
    m_pts = 1
    while m_pts * dxi / 2.0 < 8.0:
        m_pts *= 2
    xi_1d = np.fft.fftfreq(m_pts, d=1.0 / m_pts) * dxi
    mesh = np.meshgrid(*([xi_1d] * d), indexing="ij")
    rho = np.sqrt(sum(m * m for m in mesh))
    psi = radial_cutoff(rho / 2.0, profile) - radial_cutoff(rho, profile)
    inv_rho2 = np.zeros_like(rho)
    nz = rho > 0
    inv_rho2[nz] = 1.0 / (rho[nz] ** 2)

    terms = []
    j = 0
    while j > -max_terms:
        scaled = [2.0**j * m for m in mesh]
        srho2 = sum(m * m for m in scaled)
        ssym = np.zeros_like(rho)
        ann = srho2 > 0
        ssym[ann] = (radial_cutoff(np.sqrt(srho2[ann]), profile)
                     * scaled[l][ann] * scaled[k][ann] / srho2[ann])
        symbol = ssym * psi * mesh[i]
        term = 2.0**j * _kernel_term_l1(symbol)
        terms.append((j, term))
        # The prefactor halves per scale while the symbol freezes, so the
        # remaining tail is about the size of the last term.
        if term < tail_tol:
            break
        j -= 1
    return terms


def kernel_l1_bound(profile: str = "exp", l: int = 0, k: int = 0, i: int = 0,
                    refinement: int = 7, d: int = 2, tail_tol: float = 1e-6) -> float:
    """Partial sum of the dyadic L^1 kernel series (tail below ``tail_tol``)."""
    return float(sum(t for _, t in kernel_l1_terms(profile, l, k, i, refinement, d, tail_tol)))
