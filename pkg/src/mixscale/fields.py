"""Sampled scalar fields on periodic boxes and their spectral calculus.

A :class:`GridFunction` is a real scalar field sampled on a uniform grid over
a box in one or two dimensions (samples sit at the left edge of each cell,
the right endpoint is excluded on periodic boxes).  All norms, mollifications
and averages run through the discrete Fourier transform with physical angular
frequencies, so results converge under grid refinement and are exact for
band-limited data.

Conventions
-----------
* ``fourier_transform`` approximates the integral transform
  ``rho_hat(xi) = int rho(x) exp(-i xi x) dx``; the zero-frequency
  coefficient therefore equals the mean times the box volume.
* The squared L2 norm of a spectrum is ``(2 pi)^{-n} sum |c|^2 dxi``, which
  makes Plancherel exact on the grid.
* Negative-order homogeneous Sobolev norms require mean-zero input; the zero
  mode is dropped rather than silently ignored.
* Ball averages multiply the spectrum by the exact symbol of the normalized
  ball indicator (a sinc in 1d, ``2 J1(z)/z`` in 2d) instead of rasterizing
  the indicator, so every admissible radius is treated without staircase
  artifacts.

All functions are pure and fields are immutable after construction, so the
module is safe to use from concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridFunction",
    "Spectrum",
    "fourier_transform",
    "inverse_transform",
    "sobolev_norm",
    "bessel_j1",
    "ball_symbol",
    "mollifier_symbol",
    "mollified_field",
    "ball_average_field",
    "large_scale_removal",
    "write_grid_csv",
    "read_grid_csv",
]


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Uniformly sampled real scalar field on a box.

    ``values`` has shape ``(n1,)`` or ``(n1, n2)`` with every ``ni`` a power
    of two, ``domain`` is a tuple of ``(a, b)`` pairs, one per axis.
    """

    values: np.ndarray
    domain: tuple
    periodic: bool = True

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim not in (1, 2):
            raise ValueError(f"only 1d and 2d fields are supported, got ndim={arr.ndim}")
        dom = tuple((float(a), float(b)) for a, b in (
            (self.domain,) if np.ndim(self.domain[0]) == 0 else self.domain))
        if len(dom) != arr.ndim:
            raise ValueError("domain must provide one (a, b) pair per axis")
        for n in arr.shape:
            if n < 4 or not _is_pow2(n):
                raise ValueError(f"grid size per axis must be a power of two >= 4, got {n}")
        for a, b in dom:
            if not b > a:
                raise ValueError("domain intervals must have positive length")
        if not np.all(np.isfinite(arr)):
            raise ValueError("field values must be finite")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "domain", dom)

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def shape(self) -> tuple:
        return self.values.shape

    @property
    def spacings(self) -> tuple:
        return tuple((b - a) / n for (a, b), n in zip(self.domain, self.shape))

    @property
    def lengths(self) -> tuple:
        return tuple(b - a for a, b in self.domain)

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    def axes(self) -> tuple:
        """Sample coordinates along each axis (left cell edges)."""
        return tuple(a + d * np.arange(n)
                     for (a, _), d, n in zip(self.domain, self.spacings, self.shape))

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(values, self.domain, self.periodic)

    def mean(self) -> float:
        return float(self.values.mean())

    def l2_norm(self) -> float:
        cell = float(np.prod(self.spacings))
        return math.sqrt(cell * float(np.sum(self.values ** 2)))

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Discrete Fourier coefficients with physical frequency metadata.

    Coefficients follow numpy's FFT layout; ``frequencies`` are the matching
    angular frequencies per axis.  ``normalization`` records the convention
    (``"integral"``: coefficients approximate ``int f exp(-i xi x) dx``).
    """

    coefficients: np.ndarray
    frequencies: tuple
    domain: tuple
    periodic: bool
    normalization: str = "integral"

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.coefficients, dtype=complex))
        arr.flags.writeable = False
        object.__setattr__(self, "coefficients", arr)
        freqs = tuple(np.asarray(f, dtype=float) for f in self.frequencies)
        object.__setattr__(self, "frequencies", freqs)

    @property
    def dim(self) -> int:
        return self.coefficients.ndim

    @property
    def lengths(self) -> tuple:
        return tuple(b - a for a, b in self.domain)

    def freq_mesh(self) -> tuple:
        """Broadcastable angular-frequency arrays, one per axis."""
        return tuple(np.reshape(f, [-1 if i == ax else 1 for i in range(self.dim)])
                     for ax, f in enumerate(self.frequencies))

    def abs_freq(self) -> np.ndarray:
        mesh = self.freq_mesh()
        return np.sqrt(sum(m ** 2 for m in mesh))

    def l2_norm(self) -> float:
        """L2 norm of the underlying field via Plancherel."""
        dxi = float(np.prod([2.0 * math.pi / L for L in self.lengths]))
        total = dxi / (2.0 * math.pi) ** self.dim * float(np.sum(np.abs(self.coefficients) ** 2))
        return math.sqrt(total)

    def with_coefficients(self, coefficients: np.ndarray) -> "Spectrum":
        return Spectrum(coefficients, self.frequencies, self.domain,
                        self.periodic, self.normalization)


def fourier_transform(f: GridFunction) -> Spectrum:
    """Forward transform of a periodic field, integral normalization."""
    if not f.periodic:
        raise ValueError("fourier_transform requires a periodic field")
    cell = float(np.prod(f.spacings))
    coeffs = np.fft.fftn(f.values) * cell
    freqs = tuple(2.0 * math.pi * np.fft.fftfreq(n, d=dx)
                  for n, dx in zip(f.shape, f.spacings))
    return Spectrum(coeffs, freqs, f.domain, f.periodic)


def inverse_transform(spec: Spectrum) -> GridFunction:
    """Inverse of :func:`fourier_transform`; imaginary residue is discarded."""
    lengths = spec.lengths
    shape = spec.coefficients.shape
    cell = float(np.prod([L / n for L, n in zip(lengths, shape)]))
    values = np.fft.ifftn(spec.coefficients).real / cell
    return GridFunction(values, spec.domain, spec.periodic)


def sobolev_norm(f: GridFunction, s: float, homogeneous: bool = False) -> float:
    """Sobolev norm of order ``s`` in ``[-1, 1]``.

    The inhomogeneous weight is ``<xi> = (1 + |xi|^2)^(1/2)``; the homogeneous
    weight is ``|xi|`` with the zero mode excluded.  ``s = 0`` returns the
    plain L2 norm.  Homogeneous norms of negative order are only defined for
    mean-zero fields and raise otherwise.
    """
    if not -1.0 <= s <= 1.0:
        raise ValueError(f"order s must lie in [-1, 1], got {s}")
    l2 = f.l2_norm()
    if l2 == 0.0:
        return 0.0
    if s == 0.0 and not homogeneous:
        return l2
    if homogeneous and s < 0.0:
        if abs(f.mean()) * f.volume > 1e-8 * l2 * math.sqrt(f.volume) + 1e-300:
            raise ValueError(
                "homogeneous norm of negative order is ill-posed for fields "
                f"with nonzero mean (mean={f.mean():.3e})")
    spec = fourier_transform(f)
    absxi = spec.abs_freq()
    power = np.abs(spec.coefficients) ** 2
    if homogeneous:
        mask = absxi > 0.0
        weight = np.zeros_like(absxi)
        weight[mask] = absxi[mask] ** (2.0 * s)
        power = power * weight
    else:
        power = power * (1.0 + absxi ** 2) ** s
    dxi = float(np.prod([2.0 * math.pi / L for L in spec.lengths]))
    return math.sqrt(dxi / (2.0 * math.pi) ** f.dim * float(np.sum(power)))


# -- Bessel J1 and mollifier symbols ----------------------------------------

_J1_CROSSOVER = 16.0


def _j1_series(z: np.ndarray) -> np.ndarray:
    # power series J1(z) = (z/2) sum_m (-z^2/4)^m / (m! (m+1)!)
    term = z / 2.0
    out = term.copy()
    zq = -(z * z) / 4.0
    for m in range(1, 60):
        term = term * zq / (m * (m + 1))
        out += term
    return out


def _j1_asymptotic(z: np.ndarray) -> np.ndarray:
    # Hankel expansion with mu = 4: J1 = sqrt(2/(pi z)) (P cos chi - Q sin chi)
    mu = 4.0
    inv = 1.0 / (8.0 * z)
    inv2 = inv * inv
    p = np.ones_like(z)
    term = np.ones_like(z)
    for k in range(12):
        term = term * (-(mu - (4 * k + 1) ** 2) * (mu - (4 * k + 3) ** 2)
                       / ((2 * k + 1) * (2 * k + 2))) * inv2
        p += term
    q = (mu - 1.0) * inv
    term = q.copy()
    for k in range(12):
        term = term * (-(mu - (4 * k + 3) ** 2) * (mu - (4 * k + 5) ** 2)
                       / ((2 * k + 2) * (2 * k + 3))) * inv2
        q += term
    chi = z - 0.75 * math.pi
    return np.sqrt(2.0 / (math.pi * z)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j1(z):
    """Bessel function of the first kind, order one, for real arguments.

    Power series below ``z = 16`` and the Hankel asymptotic expansion above,
    accurate to better than 1e-10 absolute on the whole real line (validated
    against an arbitrary-precision oracle in the test suite).
    """
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    sign = np.sign(z)
    az = np.abs(z)
    small = az < _J1_CROSSOVER
    if np.any(small):
        out[small] = _j1_series(az[small])
    if np.any(~small):
        out[~small] = _j1_asymptotic(az[~small])
    out *= sign  # J1 is odd
    return float(out[0]) if scalar else out


def ball_symbol(z, dim: int):
    """Fourier symbol of the normalized ball indicator at |xi| r = z.

    ``sin(z)/z`` in one dimension, ``2 J1(z)/z`` in two; equals 1 at z = 0
    and is bounded by 1 in absolute value.
    """
    if dim not in (1, 2):
        raise ValueError("ball_symbol supports dim 1 and 2")
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(np.abs(z))
    if dim == 1:
        out = np.sinc(z / math.pi)
    else:
        out = np.empty_like(z)
        tiny = z < 1e-4
        # Taylor head of 2 J1(z)/z, avoids the 0/0 at the origin
        zt = z[tiny]
        out[tiny] = 1.0 - zt ** 2 / 8.0 + zt ** 4 / 192.0
        zb = z[~tiny]
        if zb.size:
            out[~tiny] = 2.0 * bessel_j1(zb) / zb
    return float(out[0]) if scalar else out


def mollifier_symbol(kind: str, r: float, freq_mesh: tuple, dim: int) -> np.ndarray:
    """Symbol of an L1-normalized mollifier of radius ``r`` on a frequency mesh.

    Kinds: ``ball`` (indicator of the ball of radius r), ``square``
    (indicator of the cube of half-width r), ``hat`` (tensor tent supported
    in the cube of half-width r; lies in H^1 with an exact sinc^2 symbol).
    """
    if kind == "ball":
        absxi = np.sqrt(sum(m ** 2 for m in freq_mesh))
        return ball_symbol(r * absxi, dim)
    if kind == "square":
        sym = np.ones(np.broadcast_shapes(*(m.shape for m in freq_mesh)))
        for m in freq_mesh:
            sym = sym * np.sinc(r * m / math.pi)
        return sym
    if kind == "hat":
        sym = np.ones(np.broadcast_shapes(*(m.shape for m in freq_mesh)))
        for m in freq_mesh:
            sym = sym * np.sinc(r * m / (2.0 * math.pi)) ** 2
        return sym
    raise ValueError(f"unknown mollifier kind {kind!r}")


def mollified_field(f: GridFunction, r: float, kind: str = "ball") -> GridFunction:
    """Convolution of ``f`` with an L1-normalized mollifier of radius ``r``."""
    if r <= 0.0:
        raise ValueError("mollifier radius must be positive")
    min_r = 2.0 * max(f.spacings)
    if r < min_r:
        raise ValueError(
            f"radius {r:g} is below the minimum resolvable radius {min_r:g} "
            "(two grid spacings)")
    spec = fourier_transform(f)
    sym = mollifier_symbol(kind, r, spec.freq_mesh(), f.dim)
    return inverse_transform(spec.with_coefficients(spec.coefficients * sym))


def ball_average_field(f: GridFunction, r: float) -> GridFunction:
    """Field of averages of ``f`` over balls of radius ``r`` at every point."""
    return mollified_field(f, r, "ball")


def large_scale_removal(f: GridFunction, r0: float) -> GridFunction:
    """Remove structures coarser than ``r0``: ``f`` minus its ball average.

    The result has mean zero on periodic boxes and homogeneous H^-1 norm
    bounded by a dimensional constant times ``r0 ||f||_L2``.
    """
    avg = ball_average_field(f, r0)
    return f.with_values(f.values - avg.values)


# -- serialization -----------------------------------------------------------

def write_grid_csv(f: GridFunction, path) -> None:
    """CSV with one header row ``dim,n1[,n2],a1,b1[,a2,b2],periodic`` and the
    flat row-major values at 17 significant digits (bit-exact round trip)."""
    head = [str(f.dim)] + [str(n) for n in f.shape]
    for a, b in f.domain:
        head += ["%.17g" % a, "%.17g" % b]
    head.append("1" if f.periodic else "0")
    lines = [",".join(head)]
    lines += ["%.17g" % v for v in f.values.ravel(order="C")]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_grid_csv(path) -> GridFunction:
    with open(path) as fh:
        head = fh.readline().strip().split(",")
        dim = int(head[0])
        ns = [int(x) for x in head[1:1 + dim]]
        rest = head[1 + dim:]
        dom = tuple((float(rest[2 * i]), float(rest[2 * i + 1])) for i in range(dim))
        periodic = rest[2 * dim] == "1"
        values = np.array([float(line) for line in fh if line.strip()])
    return GridFunction(values.reshape(ns), dom, periodic)
