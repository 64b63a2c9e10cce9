"""Periodic grids, spectral transforms, random fields, and field file I/O.

Fields live on the torus [0, 2*pi)^d sampled on a uniform n^d lattice.  The
frequency lattice is the set of integer vectors stored in FFT order; the
forward transform returns Fourier coefficients, i.e. it is normalized so that

    f(x) = sum_k F(k) exp(i k.x),

and Parseval holds with the quadrature weight (2*pi/n)^d:

    (2*pi/n)^d * sum_x |f(x)|^2 = (2*pi)^d * sum_k |F(k)|^2.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import FieldFormatError, RepresentationError

PHYSICAL = "physical"
SPECTRAL = "spectral"

TWO_PI = 2.0 * np.pi

# LPF1 field container kinds.
_KIND_SCALAR_PHYS = 0
_KIND_SCALAR_SPEC = 1
_KIND_VECTOR_PHYS = 2
_KIND_VECTOR_SPEC = 3

_HERMITIAN_RTOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with ``n`` samples per axis on [0, 2*pi)^d."""

    n: int
    d: int

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.d}")
        if self.n < 8 or (self.n & (self.n - 1)) != 0:
            raise ValueError(f"samples per axis must be a power of two >= 8, got {self.n}")

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d

    @property
    def spacing(self) -> float:
        return TWO_PI / self.n

    @property
    def cell_volume(self) -> float:
        return (TWO_PI / self.n) ** self.d

    def axis_coordinates(self) -> np.ndarray:
        """Sample coordinates along one axis."""
        return np.arange(self.n) * self.spacing

    def meshes(self) -> tuple[np.ndarray, ...]:
        """Coordinate meshes, one array of shape ``grid.shape`` per axis."""
        x = self.axis_coordinates()
        return tuple(np.meshgrid(*([x] * self.d), indexing="ij"))


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def wavenumbers_1d(n: int) -> np.ndarray:
    """Integer frequencies along one axis in FFT order."""
    return _freeze(np.fft.fftfreq(n, d=1.0 / n))


@lru_cache(maxsize=None)
def wavenumber_mesh(n: int, d: int) -> tuple[np.ndarray, ...]:
    """Frequency meshes (one per axis), each of shape ``(n,)*d``."""
    k = wavenumbers_1d(n)
    return tuple(_freeze(m.copy()) for m in np.meshgrid(*([k] * d), indexing="ij"))

@lru_cache(maxsize=None)
def wavenumber_norm(n: int, d: int) -> np.ndarray:
    """Euclidean frequency magnitude |k| on the lattice."""
    mesh = wavenumber_mesh(n, d)
    return _freeze(np.sqrt(sum(m * m for m in mesh)))


@lru_cache(maxsize=None)
def dealias_mask(n: int, d: int) -> np.ndarray:
    """Boolean mask keeping |k_axis| <= n//3 on every axis (2/3 rule)."""
    cut = n // 3
    mesh = wavenumber_mesh(n, d)
    mask = np.ones((n,) * d, dtype=bool)
    for m in mesh:
        mask &= np.abs(m) <= cut
    return _freeze(mask)


@lru_cache(maxsize=None)
def _nonnyquist_mask_1d(n: int) -> np.ndarray:
    # The +/- n/2 mode has an ambiguous sign under i*k multipliers; it is
    # dropped by every derivative.
    return _freeze(np.abs(wavenumbers_1d(n)) < n / 2)


@dataclass(frozen=True)
class GridField:
    """A scalar field on a :class:`Grid` in one fixed representation.

    ``values`` is always complex128 of shape ``grid.shape``; ``rep`` is either
    ``"physical"`` (sample values) or ``"spectral"`` (Fourier coefficients).
    Instances are immutable: the value buffer is frozen at construction.
    """

    grid: Grid
    values: np.ndarray
    rep: str
    is_real: bool = True

    def __post_init__(self):
        if self.rep not in (PHYSICAL, SPECTRAL):
            raise RepresentationError(f"unknown representation {self.rep!r}")
        vals = np.asarray(self.values)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} does not match grid {self.grid.shape}")
        if vals.dtype != np.complex128:
            vals = vals.astype(np.complex128)
        else:
            vals = vals.copy() if vals.base is not None or vals.flags.writeable else vals
        object.__setattr__(self, "values", _freeze(vals))

    # -- arithmetic (same grid, same representation) --------------------
    def _check_compatible(self, other: "GridField"):
        if self.grid != other.grid:
            raise ValueError("fields live on different grids")
        if self.rep != other.rep:
            raise RepresentationError("fields are in different representations")

    def __add__(self, other: "GridField") -> "GridField":
        self._check_compatible(other)
        return GridField(self.grid, self.values + other.values, self.rep,
                         self.is_real and other.is_real)

    def __sub__(self, other: "GridField") -> "GridField":
        self._check_compatible(other)
        return GridField(self.grid, self.values - other.values, self.rep,
                         self.is_real and other.is_real)

    def __mul__(self, c) -> "GridField":
        c = complex(c)
        return GridField(self.grid, self.values * c, self.rep,
                         self.is_real and c.imag == 0.0)

    __rmul__ = __mul__

    def __neg__(self) -> "GridField":
        return GridField(self.grid, -self.values, self.rep, self.is_real)


@dataclass(frozen=True)
class VectorField:
    """A d-component field; all components share grid and representation."""

    components: tuple[GridField, ...]
    div_free: bool = False

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("vector field needs at least one component")
        g = comps[0].grid
        rep = comps[0].rep
        if len(comps) != g.d:
            raise ValueError(f"expected {g.d} components, got {len(comps)}")
        for c in comps:
            if c.grid != g:
                raise ValueError("components live on different grids")
            if c.rep != rep:
                raise RepresentationError("components are in mixed representations")
        object.__setattr__(self, "components", comps)

    @property
    def grid(self) -> Grid:
        return self.components[0].grid

    @property
    def rep(self) -> str:
        return self.components[0].rep

    @property
    def is_real(self) -> bool:
        return all(c.is_real for c in self.components)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(tuple(a + b for a, b in zip(self.components, other.components)),
                           self.div_free and other.div_free)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(tuple(a - b for a, b in zip(self.components, other.components)),
                           self.div_free and other.div_free)

    def __mul__(self, c) -> "VectorField":
        return VectorField(tuple(comp * c for comp in self.components), self.div_free)

    __rmul__ = __mul__


# ---------------------------------------------------------------------------
# transforms


def dft_forward(f: GridField) -> GridField:
    """Physical samples -> Fourier coefficients (divides the FFT by n^d)."""
    if f.rep != PHYSICAL:
        raise RepresentationError("dft_forward expects a physical-representation field")
    coeff = np.fft.fftn(f.values) / f.grid.n**f.grid.d
    return GridField(f.grid, coeff, SPECTRAL, f.is_real)


def dft_inverse(f: GridField) -> GridField:
    """Fourier coefficients -> physical samples (exact inverse of dft_forward)."""
    if f.rep != SPECTRAL:
        raise RepresentationError("dft_inverse expects a spectral-representation field")
    vals = np.fft.ifftn(f.values) * f.grid.n**f.grid.d
    return GridField(f.grid, vals, PHYSICAL, f.is_real)


def as_spectral(f: GridField) -> GridField:
    return f if f.rep == SPECTRAL else dft_forward(f)


def as_physical(f: GridField) -> GridField:
    return f if f.rep == PHYSICAL else dft_inverse(f)


def vector_as_spectral(u: VectorField) -> VectorField:
    if u.rep == SPECTRAL:
        return u
    return VectorField(tuple(as_spectral(c) for c in u.components), u.div_free)


def vector_as_physical(u: VectorField) -> VectorField:
    if u.rep == PHYSICAL:
        return u
    return VectorField(tuple(as_physical(c) for c in u.components), u.div_free)


def apply_multiplier(f: GridField, multiplier: np.ndarray,
                     real_symmetric: bool = True) -> GridField:
    """Apply a spectral multiplier; the output representation matches the input.

    ``real_symmetric`` declares that the multiplier preserves Hermitian
    symmetry (true for every radial real multiplier), so the reality flag
    survives.
    """
    F = as_spectral(f)
    out = GridField(f.grid, F.values * multiplier, SPECTRAL,
                    f.is_real and real_symmetric)
    return out if f.rep == SPECTRAL else dft_inverse(out)


def derivative(f: GridField, axis: int) -> GridField:
    """Partial derivative along ``axis`` (spectral i*k multiplier).

    The Nyquist plane of the differentiated axis is zeroed; output
    representation matches the input.
    """
    g = f.grid
    if not 0 <= axis < g.d:
        raise ValueError(f"axis {axis} out of range for dimension {g.d}")
    k = wavenumber_mesh(g.n, g.d)[axis]
    shape = [1] * g.d
    shape[axis] = g.n
    keep = _nonnyquist_mask_1d(g.n).reshape(shape)
    mult = 1j * k * keep
    F = as_spectral(f)
    out = GridField(g, F.values * mult, SPECTRAL, f.is_real)
    return out if f.rep == SPECTRAL else dft_inverse(out)


def gradient(f: GridField) -> VectorField:
    return VectorField(tuple(derivative(f, a) for a in range(f.grid.d)))


def dealias_field(f: GridField) -> GridField:
    """Zero all spectral content above the 2/3-rule cutoff n//3 (per axis)."""
    return apply_multiplier(f, dealias_mask(f.grid.n, f.grid.d).astype(float))


def hermitian_defect(f: GridField) -> float:
    """Max |F(k) - conj(F(-k))| relative to max |F| (0 for a real field)."""
    F = as_spectral(f).values
    flipped = F
    for ax in range(f.grid.d):
        flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
    scale = np.abs(F).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(F - np.conj(flipped)).max() / scale)


def max_spectral_divergence(u: VectorField) -> float:
    """Max |k . u_hat(k)| over the lattice, relative to max |u_hat|."""
    spec = vector_as_spectral(u)
    g = u.grid
    mesh = wavenumber_mesh(g.n, g.d)
    div = sum(1j * mesh[a] * spec.components[a].values for a in range(g.d))
    scale = max(np.abs(c.values).max() for c in spec.components)
    if scale == 0.0:
        return 0.0
    return float(np.abs(div).max() / scale)


def _leray_spectra(spectra: list[np.ndarray], n: int, d: int) -> list[np.ndarray]:
    """Project stacked spectral components onto divergence-free fields.

    The k = 0 mode is left unchanged.
    """
    mesh = wavenumber_mesh(n, d)
    k2 = sum(m * m for m in mesh)
    inv_k2 = np.zeros_like(k2)
    nonzero = k2 > 0
    inv_k2[nonzero] = 1.0 / k2[nonzero]
    kdotu = sum(mesh[a] * spectra[a] for a in range(d))
    return [spectra[a] - mesh[a] * kdotu * inv_k2 for a in range(d)]


# ---------------------------------------------------------------------------
# random band-limited fields


@dataclass(frozen=True)
class SpectrumSpec:
    """Recipe for a random band-limited field.

    Coefficients inside ``band`` (inclusive |k| range) are complex Gaussians
    with standard deviation |k| ** -decay_exponent, Hermitian-symmetrized so
    the sample is real.  The same seed always reproduces the same field.
    """

    decay_exponent: float
    band: tuple[int, int]
    seed: int

    def __post_init__(self):
        lo, hi = self.band
        if lo < 1 or hi < lo:
            raise ValueError(f"band must satisfy 1 <= lo <= hi, got {self.band}")


def _hermitian_symmetrize(coeff: np.ndarray, d: int) -> np.ndarray:
    flipped = coeff
    for ax in range(d):
        flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
    return 0.5 * (coeff + np.conj(flipped))


def _band_scale(grid: Grid, spec: SpectrumSpec) -> np.ndarray:
    lo, hi = spec.band
    if hi > grid.n // 2 - 1:
        raise ValueError(
            f"band upper edge {hi} exceeds the usable lattice radius {grid.n // 2 - 1}")
    kk = wavenumber_norm(grid.n, grid.d)
    mask = (kk >= lo) & (kk <= hi)
    if not mask.any():
        raise ValueError(f"band {spec.band} contains no lattice frequencies")
    scale = np.zeros(grid.shape)
    scale[mask] = kk[mask] ** (-spec.decay_exponent)
    return scale


def _random_scalar_spectrum(grid: Grid, scale: np.ndarray,
                            rng: np.random.Generator) -> np.ndarray:
    re = rng.standard_normal(grid.shape)
    im = rng.standard_normal(grid.shape)
    coeff = (re + 1j * im) * (scale / np.sqrt(2.0))
    return _hermitian_symmetrize(coeff, grid.d)


def random_band_limited(grid: Grid, spec: SpectrumSpec) -> GridField:
    """Random real scalar field with the prescribed band spectrum."""
    scale = _band_scale(grid, spec)
    rng = np.random.default_rng(spec.seed)
    coeff = _random_scalar_spectrum(grid, scale, rng)
    phys = np.fft.ifftn(coeff) * grid.n**grid.d
    return GridField(grid, phys.real, PHYSICAL, True)


def random_divergence_free(grid: Grid, spec: SpectrumSpec) -> VectorField:
    """Random real divergence-free vector field (Leray-projected)."""
    scale = _band_scale(grid, spec)
    rng = np.random.default_rng(spec.seed)
    spectra = [_random_scalar_spectrum(grid, scale, rng) for _ in range(grid.d)]
    projected = _leray_spectra(spectra, grid.n, grid.d)
    comps = []
    for s in projected:
        phys = np.fft.ifftn(s) * grid.n**grid.d
        comps.append(GridField(grid, phys.real, PHYSICAL, True))
    return VectorField(tuple(comps), div_free=True)


# ---------------------------------------------------------------------------
# LPF1 file format
#
# magic "LPF1" | u8 version=1 | u8 kind | u8 d | u8 reserved=0
# | d x u32 LE samples per axis | payload: complex128 LE (re, im) pairs,
# row-major, components concatenated.

_MAGIC = b"LPF1"
_VERSION = 1


def write_field(f: GridField | VectorField, path) -> None:
    """Serialize a field to the LPF1 container (bit-exact round trip)."""
    if isinstance(f, VectorField):
        comps = f.components
        kind = _KIND_VECTOR_PHYS if f.rep == PHYSICAL else _KIND_VECTOR_SPEC
        grid = f.grid
    else:
        comps = (f,)
        kind = _KIND_SCALAR_PHYS if f.rep == PHYSICAL else _KIND_SCALAR_SPEC
        grid = f.grid
    header = struct.pack("<4sBBBB", _MAGIC, _VERSION, kind, grid.d, 0)
    header += struct.pack(f"<{grid.d}I", *([grid.n] * grid.d))
    with open(path, "wb") as fh:
        fh.write(header)
        for c in comps:
            fh.write(np.ascontiguousarray(c.values).astype("<c16", copy=False).tobytes())


def read_field(path) -> GridField | VectorField:
    """Read an LPF1 container; reality/divergence flags are re-derived."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 8 or data[:4] != _MAGIC:
        raise FieldFormatError("not an LPF1 field file (bad magic)")
    version, kind, d, reserved = struct.unpack("<BBBB", data[4:8])
    if version != _VERSION:
        raise FieldFormatError(f"unsupported LPF1 version {version}")
    if kind not in (_KIND_SCALAR_PHYS, _KIND_SCALAR_SPEC, _KIND_VECTOR_PHYS, _KIND_VECTOR_SPEC):
        raise FieldFormatError(f"unknown field kind {kind}")
    if d not in (2, 3):
        raise FieldFormatError(f"unsupported dimension {d}")
    axes_end = 8 + 4 * d
    if len(data) < axes_end:
        raise FieldFormatError("truncated header")
    ns = struct.unpack(f"<{d}I", data[8:axes_end])
    if len(set(ns)) != 1:
        raise FieldFormatError(f"anisotropic sample counts {ns} are not supported")
    try:
        grid = Grid(ns[0], d)
    except ValueError as exc:
        raise FieldFormatError(str(exc)) from exc
    ncomp = d if kind in (_KIND_VECTOR_PHYS, _KIND_VECTOR_SPEC) else 1
    expected = ncomp * grid.n**d * 16
    payload = data[axes_end:]
    if len(payload) != expected:
        raise FieldFormatError(
            f"payload has {len(payload)} bytes, expected {expected}")
    raw = np.frombuffer(payload, dtype="<c16").astype(np.complex128)
    rep = PHYSICAL if kind in (_KIND_SCALAR_PHYS, _KIND_VECTOR_PHYS) else SPECTRAL
    per = grid.n**d
    fields = []
    for c in range(ncomp):
        vals = raw[c * per:(c + 1) * per].reshape(grid.shape)
        fields.append(GridField(grid, vals, rep, is_real=False))
    fields = [
        GridField(grid, f.values, rep, is_real=_looks_real(f)) for f in fields
    ]
    if ncomp == 1:
        return fields[0]
    vec = VectorField(tuple(fields))
    return VectorField(tuple(fields), div_free=max_spectral_divergence(vec) <= 1e-10)


def _looks_real(f: GridField) -> bool:
    if f.rep == PHYSICAL:
        scale = np.abs(f.values).max()
        if scale == 0.0:
            return True
        return float(np.abs(f.values.imag).max()) <= _HERMITIAN_RTOL * scale
    return hermitian_defect(f) <= _HERMITIAN_RTOL
