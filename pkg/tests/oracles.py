"""Independent reference computations used to freeze expected values.

Every oracle here avoids the code path it checks: direct quadratic-cost
transforms instead of FFTs, Simpson quadrature of upsampled interpolants
instead of Fourier symbols, arbitrary-precision series instead of the
double-precision Bessel evaluation, and the closed-form whole-space Fourier
integral for the two-scale family.
"""

import numpy as np


def direct_dft(values: np.ndarray, dx: float, xs: np.ndarray,
               freqs: np.ndarray) -> np.ndarray:
    """O(N^2) discrete approximation of int f exp(-i xi x) dx."""
    return dx * np.exp(-1j * np.outer(freqs, xs)) @ values


def ball_average_quadrature(f, r: float, upsample: int = 64) -> np.ndarray:
    """Window averages of the band-limited interpolant of a 1d field by
    composite Simpson on an upsampled grid (no Fourier symbol involved)."""
    n = f.shape[0]
    a, b = f.domain[0]
    length = b - a
    spec = np.fft.fft(f.values)
    nf = n * upsample
    fine = np.zeros(nf, dtype=complex)
    fine[: n // 2] = spec[: n // 2]
    fine[-(n // 2) + 1:] = spec[-(n // 2) + 1:]
    fine[n // 2] = 0.5 * spec[n // 2]
    fine[nf - n // 2] += 0.5 * spec[n // 2]
    vals = np.fft.ifft(fine).real * upsample
    hf = length / nf
    m = int(round(r / hf))
    if abs(m * hf - r) > 1e-12 * r:
        raise ValueError("radius must be a multiple of the fine spacing")
    w = np.ones(2 * m + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= hf / 3.0 / (2.0 * r)
    out = np.empty(n)
    for i in range(n):
        idx = np.arange(i * upsample - m, i * upsample + m + 1) % nf
        out[i] = np.dot(w, vals[idx])
    return out


def two_scale_hm1_integral(j0: int, j1: int) -> float:
    """Whole-space homogeneous H^-1 norm of the two-scale pair via the
    closed-form Fourier transform and piecewise Simpson quadrature."""
    a, b = 2.0 ** -j0, 2.0 ** -j1

    def integrand(xi):
        da = np.where(xi == 0, 1.0, (np.exp(1j * xi * a) - 1) / (1j * xi * a + (xi == 0)))
        db = np.where(xi == 0, 1.0, (np.exp(1j * xi * b) - 1) / (1j * xi * b + (xi == 0)))
        rh = np.abs(da - db) ** 2
        out = np.empty_like(rh)
        small = np.abs(xi) < 1e-9
        out[~small] = rh[~small] / xi[~small] ** 2
        out[small] = ((b - a) / 2.0) ** 2
        return out

    total = 0.0
    cuts = [0.0, 2.0 ** j1, 2.0 ** j0, 200.0 * 2.0 ** j0]
    for (lo, hi), n in zip(zip(cuts, cuts[1:]), (400000, 800000, 800000)):
        xs = np.linspace(lo, hi, 2 * n + 1)
        ys = integrand(xs)
        h = (hi - lo) / (2 * n)
        total += h / 3.0 * (ys[0] + ys[-1] + 4 * ys[1::2].sum() + 2 * ys[2:-1:2].sum())
    return float(np.sqrt(2.0 * total / (2.0 * np.pi)))


def walsh_matrix(J: int) -> np.ndarray:
    """Rows are the full-interval packet profiles built by the literal
    sign recursion (no butterfly)."""
    def pattern(l, depth):
        if l == 0:
            return np.ones(2 ** depth)
        sub = pattern(l // 2, depth - 1)
        return np.concatenate([sub, sub if l % 2 == 0 else -sub])

    return np.stack([pattern(l, J) for l in range(2 ** J)])


def mixed_norm_direct(u, sigma: float, s: float) -> float:
    """Direct quadratic-cost evaluation of the anisotropic channel norm."""
    n = u.n_y
    y = u.y_axis()
    eta = u.eta_values()
    total = 0.0
    for k in u.k_values:
        row = u.row(int(k))
        spec = np.array([np.sum(row * np.exp(-1j * e * y)) for e in eta])
        wk = (1.0 + float(k) ** 2) ** sigma
        weta = (1.0 + eta ** 2) ** s
        total += wk * np.sum(weta * np.abs(spec) ** 2) * u.y_length / n ** 2
    return float(np.sqrt(total))
