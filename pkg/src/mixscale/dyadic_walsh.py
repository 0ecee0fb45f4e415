"""Dyadic position-frequency model on [0, 1): tiles, wave packets, seminorms.

A tile is a dyadic rectangle of area one, ``I x omega`` with
``I = 2^{-j}[k, k+1)`` and ``omega = [2^j l, 2^j (l+1))``.  Each tile carries
a wave packet: the L2-normalized indicator for ``l = 0``, and for ``l > 0``
the normalized sum/difference of the packets of the two half-interval tiles
at level ``floor(l/2)`` (sum when ``l`` is even, difference when odd).  The
recursion fixes the ordering of the full-interval packets ``phi_l`` and hence
the meaning of the weighted coefficient seminorms; the fast transform below
is validated against direct inner products with the packets, not against any
named standard ordering.

Signals are piecewise-constant functions on ``[0, 1)`` at resolution
``2^{-J}``, i.e. elements of the span ``E_J`` of the level-J cell indicators.
Everything here is exact over dyadic rationals except where ``sqrt 2``
enters through normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tile",
    "DyadicSignal",
    "wave_packet",
    "tile_overlap",
    "walsh_coefficients",
    "walsh_synthesize",
    "haar_averages",
    "project",
    "dyadic_geometric",
    "dyadic_analytic",
    "make_packet_sum",
    "write_signal_csv",
    "read_signal_csv",
]


@dataclass(frozen=True)
class Tile:
    """Dyadic tile ``2^{-j}[k, k+1) x [2^j l, 2^j (l+1))`` of area one."""

    j: int
    k: int
    l: int

    def __post_init__(self):
        if self.j < 0 or self.l < 0:
            raise ValueError("scale and level exponents must be nonnegative")
        if not 0 <= self.k < 2 ** self.j:
            raise ValueError(f"position k={self.k} outside [0, 2^{self.j})")

    @property
    def interval(self) -> tuple:
        h = 2.0 ** (-self.j)
        return (self.k * h, (self.k + 1) * h)

    @property
    def freq_interval(self) -> tuple:
        w = 2.0 ** self.j
        return (self.l * w, (self.l + 1) * w)

    @property
    def levels(self) -> int:
        """Recursion depth needed to resolve the packet (0 for l = 0)."""
        return self.l.bit_length() if self.l > 0 else 0


@dataclass(frozen=True, eq=False)
class DyadicSignal:
    """Piecewise-constant function on [0, 1): value per cell ``2^{-J}[m, m+1)``."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.values, dtype=float))
        n = arr.shape[0] if arr.ndim == 1 else 0
        if arr.ndim != 1 or n < 1 or (n & (n - 1)) != 0:
            raise ValueError("signal length must be a power of two")
        if not np.all(np.isfinite(arr)):
            raise ValueError("signal values must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def resolution(self) -> int:
        """The exponent J with ``len(values) == 2**J``."""
        return self.values.shape[0].bit_length() - 1

    def l2_norm(self) -> float:
        return math.sqrt(float(np.mean(self.values ** 2)))


def _pattern(l: int, depth: int) -> np.ndarray:
    # +/-1 profile of the level-l packet on 2**depth cells of its interval
    if l == 0:
        return np.ones(2 ** depth)
    sub = _pattern(l // 2, depth - 1)
    return np.concatenate([sub, sub if l % 2 == 0 else -sub])


def wave_packet(p: Tile, J: int) -> DyadicSignal:
    """The packet of tile ``p`` sampled at resolution ``2^{-J}``.

    Requires ``J >= p.j + p.levels`` so the packet is constant on cells; the
    result has unit L2 norm, support exactly the tile interval and values
    ``+/- 2^{p.j/2}`` there.
    """
    need = p.j + p.levels
    if J < need:
        raise ValueError(
            f"resolution J={J} too coarse for tile {p}; need J >= {need}")
    values = np.zeros(2 ** J)
    width = 2 ** (J - p.j)
    seg = 2.0 ** (p.j / 2.0) * _pattern(p.l, J - p.j)
    values[p.k * width:(p.k + 1) * width] = seg
    return DyadicSignal(values)


def tile_overlap(p: Tile, p2: Tile) -> float:
    """Area of the rectangle intersection of two tiles (in [0, 1])."""
    a1, b1 = p.interval
    a2, b2 = p2.interval
    dx = max(0.0, min(b1, b2) - max(a1, a2))
    f1, g1 = p.freq_interval
    f2, g2 = p2.freq_interval
    dw = max(0.0, min(g1, g2) - max(f1, f2))
    return dx * dw


def walsh_coefficients(f: DyadicSignal) -> np.ndarray:
    """Coefficients ``c_l = <f, phi_l>`` against the full-interval packets.

    Computed by the in-place butterfly that realizes the packet recursion
    bottom-up in O(N log N): merging the coefficient vectors A, B of two
    adjacent blocks gives ``c_{2m} = (A_m + B_m)/2`` and
    ``c_{2m+1} = (A_m - B_m)/2``.  Parseval holds exactly:
    ``||c||_l2 = ||f||_L2``.
    """
    n = f.values.shape[0]
    work = f.values.reshape(n, 1).astype(float)
    while work.shape[0] > 1:
        a = work[0::2]
        b = work[1::2]
        merged = np.empty((work.shape[0] // 2, 2 * work.shape[1]))
        merged[:, 0::2] = (a + b) / 2.0
        merged[:, 1::2] = (a - b) / 2.0
        work = merged
    return work[0].copy()


def walsh_synthesize(coefficients: np.ndarray) -> DyadicSignal:
    """Signal with the given packet coefficients (inverse of the butterfly)."""
    c = np.asarray(coefficients, dtype=float)
    n = c.shape[0]
    if n < 1 or (n & (n - 1)) != 0:
        raise ValueError("coefficient length must be a power of two")
    work = c.reshape(1, n)
    while work.shape[1] > 1:
        s = work[:, 0::2]
        d = work[:, 1::2]
        split = np.empty((2 * work.shape[0], work.shape[1] // 2))
        split[0::2] = s + d
        split[1::2] = s - d
        work = split
    return DyadicSignal(work[:, 0].copy())


def haar_averages(f: DyadicSignal, j: int) -> np.ndarray:
    """Coefficients ``<f, chi_I>`` against the L2-normalized indicators of
    the ``2^j`` dyadic intervals at scale ``2^{-j}``."""
    J = f.resolution
    if not 0 <= j <= J:
        raise ValueError(f"scale j={j} must lie in [0, {J}]")
    means = f.values.reshape(2 ** j, -1).mean(axis=1)
    return 2.0 ** (-j / 2.0) * means


def project(f: DyadicSignal, j: int) -> DyadicSignal:
    """Orthogonal projection onto ``E_j``: average on each scale-j cell."""
    J = f.resolution
    if not 0 <= j <= J:
        raise ValueError(f"scale j={j} must lie in [0, {J}]")
    means = f.values.reshape(2 ** j, -1).mean(axis=1)
    return DyadicSignal(np.repeat(means, 2 ** (J - j)))


def dyadic_geometric(f: DyadicSignal, j: int) -> float:
    """Largest modulus of an interval mean at scale ``2^{-j}``:
    ``sup_I |I|^{-1} |int_I f|`` over ``I`` in the scale-j dyadic partition."""
    J = f.resolution
    if not 0 <= j <= J:
        raise ValueError(f"scale j={j} must lie in [0, {J}]")
    means = f.values.reshape(2 ** j, -1).mean(axis=1)
    return float(np.max(np.abs(means)))


def dyadic_analytic(f: DyadicSignal, s: float, j: int) -> float:
    """Weighted coefficient seminorm up to scale j:
    ``(sum_{l < 2^j} (1 + l^2)^s |c_l|^2)^(1/2)``."""
    J = f.resolution
    if not 0 <= j <= J:
        raise ValueError(f"scale j={j} must lie in [0, {J}]")
    if not -1.0 <= s <= 1.0:
        raise ValueError(f"order s must lie in [-1, 1], got {s}")
    c = walsh_coefficients(f)[: 2 ** j]
    l = np.arange(c.shape[0], dtype=float)
    return math.sqrt(float(np.sum((1.0 + l * l) ** s * c * c)))


def make_packet_sum(j0: int, alpha: float, J: int) -> DyadicSignal:
    """Rescaled sum of full-interval packets with levels from about
    ``2^{alpha j0}`` up to ``2^{j0} - 1``.

    The lower level is ``ceil(2^{alpha j0}) - 1`` (for integer ``alpha j0``
    the family has the closed two-scale form plus one boundary packet) and
    the result is scaled by ``2^{-j0 (1 - alpha/2)}``, which normalizes the
    scale-j0 analytic seminorm of order -1 to about ``2^{-j0}``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if J < j0:
        raise ValueError(f"resolution J={J} must be at least j0={j0}")
    lmin = math.ceil(2.0 ** (alpha * j0)) - 1
    coeffs = np.zeros(2 ** J)
    coeffs[lmin:2 ** j0] = 1.0
    sig = walsh_synthesize(coeffs)
    scale = 2.0 ** (-j0 * (1.0 - alpha / 2.0))
    return DyadicSignal(scale * sig.values)


def write_signal_csv(f: DyadicSignal, path) -> None:
    """Single-column CSV of the cell values with a ``J=<int>`` header comment."""
    lines = [f"# J={f.resolution}"]
    lines += ["%.17g" % v for v in f.values]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_signal_csv(path) -> DyadicSignal:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# J="):
            raise ValueError("missing J=<int> header comment")
        J = int(header.split("=", 1)[1])
        values = np.array([float(line) for line in fh if line.strip()])
    if values.shape[0] != 2 ** J:
        raise ValueError("value count does not match header resolution")
    return DyadicSignal(values)
