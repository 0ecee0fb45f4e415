"""Passive-scalar advection under prescribed cellular/shear flows and the
Gronwall mixing-cost bounds.

The solver is semi-Lagrangian: characteristics are traced backward with a
fourth-order Runge-Kutta step and the scalar is picked up with periodic
bicubic (Catmull-Rom) interpolation in its quasi-monotone form (values are
clipped to the surrounding cell range, so the sup norm cannot grow even on
filaments thinner than the grid).  The scheme is unconditionally stable;
fine filaments created by mixing runs degrade resolution gracefully, which
is monitored by a spectral-tail diagnostic instead of blowing up as
pseudo-spectral advection would.  The time step is limited by the
backward-trace condition ``dt ||grad v||_inf <= 1`` (trajectories stay
single-valued); the mean is re-centered after each step, which keeps it
conserved to rounding.

Velocity fields are closed-form and divergence free by construction (steady
shear, steady cellular, and the staggered alternating cellular pair that
switches stream function every half time unit); their gradients are
analytic, so strain norms carry no differencing error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import GridFunction, ball_average_field, fourier_transform, sobolev_norm
from .mixing_scales import MixingReport, RadiusGrid, functional_profile

__all__ = [
    "VelocityField",
    "advect",
    "strain_linfty",
    "gradient_lp_norm",
    "gronwall_check",
    "mixing_cost_curve",
    "stripe_field",
    "single_mode_field",
    "spectral_tail_fraction",
]

_TWO_PI = 2.0 * math.pi
_KINDS = ("shear", "cellular", "alternating")


@dataclass(frozen=True)
class VelocityField:
    """Closed-form divergence-free flow on the unit torus.

    Kinds: ``shear`` is ``(A sin(2 pi y), 0)``; ``cellular`` derives from the
    stream function ``A sin(2 pi x) sin(2 pi y) / (2 pi)``; ``alternating``
    switches between the cellular cells and the quarter-shifted pair from
    ``A cos(2 pi x) cos(2 pi y) / (2 pi)`` every half time unit.
    """

    kind: str
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown flow kind {self.kind!r}; choose from {_KINDS}")
        if not np.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")
        self._check_divergence_free()

    def _phase(self, t: float) -> str:
        if self.kind != "alternating":
            return self.kind
        return "cellular" if (t % 1.0) < 0.5 else "staggered"

    def velocity(self, t: float, x: np.ndarray, y: np.ndarray) -> tuple:
        a = self.amplitude
        phase = self._phase(t)
        if phase == "shear":
            return a * np.sin(_TWO_PI * y), np.zeros_like(x)
        if phase == "cellular":
            return (a * np.sin(_TWO_PI * x) * np.cos(_TWO_PI * y),
                    -a * np.cos(_TWO_PI * x) * np.sin(_TWO_PI * y))
        # staggered cells, stream function A cos cos / 2 pi
        return (-a * np.cos(_TWO_PI * x) * np.sin(_TWO_PI * y),
                a * np.sin(_TWO_PI * x) * np.cos(_TWO_PI * y))

    def gradient(self, t: float, x: np.ndarray, y: np.ndarray) -> tuple:
        """Analytic entries ``(d1v1, d2v1, d1v2, d2v2)``."""
        a2p = self.amplitude * _TWO_PI
        phase = self._phase(t)
        if phase == "shear":
            zero = np.zeros_like(x)
            return zero, a2p * np.cos(_TWO_PI * y), zero, zero
        sx, cx = np.sin(_TWO_PI * x), np.cos(_TWO_PI * x)
        sy, cy = np.sin(_TWO_PI * y), np.cos(_TWO_PI * y)
        if phase == "cellular":
            return a2p * cx * cy, -a2p * sx * sy, a2p * sx * sy, -a2p * cx * cy
        return a2p * sx * sy, -a2p * cx * cy, a2p * cx * cy, -a2p * sx * sy

    def max_speed(self) -> float:
        return abs(self.amplitude)

    def lipschitz(self) -> float:
        """Upper bound on ``||grad v||_inf``, uniform in time."""
        return abs(self.amplitude) * _TWO_PI

    def _check_divergence_free(self, n: int = 64) -> None:
        x = np.linspace(0.0, 1.0, n, endpoint=False)
        xx, yy = np.meshgrid(x, x, indexing="ij")
        for t in (0.0, 0.75):
            d1v1, _, _, d2v2 = self.gradient(t, xx, yy)
            if np.max(np.abs(d1v1 + d2v2)) > 1e-12 * max(1.0, abs(self.amplitude)):
                raise ValueError(f"flow kind {self.kind!r} is not divergence free")


def strain_linfty(v: VelocityField, t: float, n: int = 256) -> float:
    """Sup over grid samples of the largest entry of ``d_i v_j + d_j v_i``."""
    x = np.linspace(0.0, 1.0, n, endpoint=False)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    d1v1, d2v1, d1v2, d2v2 = v.gradient(t, xx, yy)
    entries = np.stack([2.0 * d1v1, d2v1 + d1v2, 2.0 * d2v2])
    return float(np.max(np.abs(entries)))


def gradient_lp_norm(v: VelocityField, t: float, p: float, n: int = 256) -> float:
    """``L^p`` norm of the pointwise Frobenius size of ``grad v`` on the torus."""
    if p <= 0:
        raise ValueError("p must be positive")
    x = (np.arange(n) + 0.5) / n
    xx, yy = np.meshgrid(x, x, indexing="ij")
    grads = v.gradient(t, xx, yy)
    frob = np.sqrt(sum(g ** 2 for g in grads))
    if math.isinf(p):
        return float(np.max(frob))
    return float((np.mean(frob ** p)) ** (1.0 / p))


# -- semi-Lagrangian advection ------------------------------------------------


def _catmull_rom_weights(t: np.ndarray) -> tuple:
    t2 = t * t
    t3 = t2 * t
    return (-0.5 * t3 + t2 - 0.5 * t,
            1.5 * t3 - 2.5 * t2 + 1.0,
            -1.5 * t3 + 2.0 * t2 + 0.5 * t,
            0.5 * t3 - 0.5 * t2)


def _bicubic_periodic(values: np.ndarray, px: np.ndarray, py: np.ndarray,
                      monotone: bool = True) -> np.ndarray:
    """Catmull-Rom interpolation at fractional index coordinates (periodic).

    With ``monotone`` the result is clipped to the range of the four cell
    corners (quasi-monotone variant), which keeps the sup norm from growing
    on under-resolved filaments while leaving smooth regions third order.
    """
    n0, n1 = values.shape
    ix = np.floor(px).astype(np.int64)
    iy = np.floor(py).astype(np.int64)
    wx = _catmull_rom_weights(px - ix)
    wy = _catmull_rom_weights(py - iy)
    out = np.zeros_like(px)
    for a in range(4):
        rows = (ix + (a - 1)) % n0
        acc = np.zeros_like(px)
        for b in range(4):
            cols = (iy + (b - 1)) % n1
            acc += wy[b] * values[rows, cols]
        out += wx[a] * acc
    if monotone:
        r0, r1 = ix % n0, (ix + 1) % n0
        c0, c1 = iy % n1, (iy + 1) % n1
        corners = np.stack([values[r0, c0], values[r0, c1],
                            values[r1, c0], values[r1, c1]])
        np.clip(out, corners.min(axis=0), corners.max(axis=0), out=out)
    return out


def advect(rho0: GridFunction, v: VelocityField, T: float, dt: float,
           _callback=None) -> GridFunction:
    """Advance the scalar to time ``T`` with steps ``dt`` (``dt`` divides T).

    Raises when ``dt`` exceeds the backward-trace limit ``1 / ||grad v||_inf``.
    ``_callback(step, t, values)`` is invoked after every step when given.
    """
    if rho0.dim != 2 or not rho0.periodic:
        raise ValueError("advection expects a periodic 2d field")
    if dt <= 0 or T < 0:
        raise ValueError("need dt > 0 and T >= 0")
    lim = 1.0 / v.lipschitz() if v.lipschitz() > 0 else math.inf
    if dt > lim * (1.0 + 1e-12):
        raise ValueError(
            f"time step {dt:g} violates the trace condition dt <= {lim:g} "
            "(1 / Lipschitz constant of the flow)")
    n_steps = int(round(T / dt))
    if abs(n_steps * dt - T) > 1e-9 * max(1.0, T):
        raise ValueError("dt must divide T evenly")
    (a1, _), (a2, _) = rho0.domain
    d1, d2 = rho0.spacings
    axes = rho0.axes()
    xx, yy = np.meshgrid(axes[0], axes[1], indexing="ij")
    vals = rho0.values.copy()
    mean0 = vals.mean()
    for step in range(n_steps):
        t1 = (step + 1) * dt
        k1x, k1y = v.velocity(t1, xx, yy)
        k2x, k2y = v.velocity(t1 - 0.5 * dt, xx - 0.5 * dt * k1x, yy - 0.5 * dt * k1y)
        k3x, k3y = v.velocity(t1 - 0.5 * dt, xx - 0.5 * dt * k2x, yy - 0.5 * dt * k2y)
        k4x, k4y = v.velocity(t1 - dt, xx - dt * k3x, yy - dt * k3y)
        depx = xx - dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        depy = yy - dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        vals = _bicubic_periodic(vals, (depx - a1) / d1, (depy - a2) / d2)
        vals += mean0 - vals.mean()
        if _callback is not None:
            _callback(step + 1, t1, vals)
    return rho0.with_values(vals)


def spectral_tail_fraction(f: GridFunction, cut: float = 2.0 / 3.0) -> float:
    """Fraction of non-mean spectral energy above ``cut`` times Nyquist."""
    spec = fourier_transform(f)
    power = np.abs(spec.coefficients) ** 2
    idx = np.meshgrid(*[np.abs(np.fft.fftfreq(n, d=1.0 / n)) for n in f.shape],
                      indexing="ij")
    top = np.maximum.reduce([ix / (n // 2) for ix, n in zip(idx, f.shape)])
    mean_mask = top == 0.0
    total = float(np.sum(power[~mean_mask]))
    if total == 0.0:
        return 0.0
    return float(np.sum(power[top >= cut]) / total)


def stripe_field(n: int = 256) -> GridFunction:
    """The stripe datum ``1_{[0,1/2)}(x2)`` on the unit torus."""
    x = np.arange(n) / n
    vals = np.broadcast_to((x < 0.5).astype(float), (n, n)).copy()
    return GridFunction(vals, ((0.0, 1.0), (0.0, 1.0)), periodic=True)


def single_mode_field(n: int = 256, mode: int = 1) -> GridFunction:
    """``sin(2 pi m x1)`` on the unit torus."""
    x = np.arange(n) / n
    vals = np.sin(_TWO_PI * mode * x)[:, None] * np.ones(n)[None, :]
    return GridFunction(vals, ((0.0, 1.0), (0.0, 1.0)), periodic=True)


def gronwall_check(rho0: GridFunction, v: VelocityField, T: float, dt: float,
                   snapshots: int = 8) -> MixingReport:
    """Compare the measured H^1 growth of the advected scalar against the
    strain-exponential bound.

    The differential inequality ``d/dt ||grad rho||^2 <= strain ||grad rho||^2``
    gives ``||grad rho(T)|| <= exp(strain integral / 2) ||grad rho(0)||``;
    the unhalved exponent that appears in the displayed operator bound is
    recorded alongside as a flagged discrepancy.  Reports are marked invalid
    when more than 10% of the scalar's spectral energy sits in the top third
    of the frequency range.
    """
    grad0 = sobolev_norm(rho0, 1.0, homogeneous=True)
    if grad0 == 0.0:
        raise ValueError("initial datum must have a nonzero gradient")
    stride = max(1, int(round(T / dt)) // snapshots)
    rows = []

    def record(step, t, vals):
        if step % stride == 0 or step == int(round(T / dt)):
            rows.append((t, rho0.with_values(vals.copy())))

    advect(rho0, v, T, dt, _callback=record)
    report = MixingReport(
        "gronwall",
        ("t", "grad_growth", "bound", "pass", "valid"),
    )
    integral = 0.0
    prev_t = 0.0
    start_valid = spectral_tail_fraction(rho0) <= 0.10
    for t, snap in rows:
        # strain is piecewise constant in time for every flow kind
        mid = 0.5 * (prev_t + t)
        integral += strain_linfty(v, mid) * (t - prev_t)
        prev_t = t
        growth = sobolev_norm(snap, 1.0, homogeneous=True) / grad0
        bound = math.exp(0.5 * integral)
        valid = start_valid and spectral_tail_fraction(snap) <= 0.10
        ok = growth <= bound * (1.0 + 1e-9)
        rows_pass = bool(ok and valid)
        report.add_row(float(t), float(growth), float(bound), bool(ok), bool(valid))
        report.passed = report.passed and rows_pass
    report.constants["strain_integral"] = integral
    report.constants["bound_halved_exponent"] = math.exp(0.5 * integral)
    report.constants["bound_displayed_exponent"] = math.exp(integral)
    report.comments.append(
        "growth is asserted against exp(integral/2); the unhalved display "
        "bound exp(integral) is recorded as a flagged discrepancy")
    return report


def mixing_cost_curve(v: VelocityField, p: float, T: float, dt: float,
                      n: int = 256, snapshots: int = 16,
                      declared_constant: float = 0.0) -> MixingReport:
    """Advect the stripe datum and record the mixing cost ratio

        cost(t) / |log eps(t)|,  eps(t) = ||rho(t) - 1/2||_{H^-1},

    asserting it bounded below by ``declared_constant`` over ``[T/2, T]``.
    Also records the geometric bracket (extreme ball averages at radius
    ``eps``) and the comparison bridge between the geometric and analytic
    mixedness hypotheses at ``t = 1`` when it is on the curve.
    """
    rho0 = stripe_field(n)
    n_steps = int(round(T / dt))
    stride = max(1, n_steps // snapshots)
    times: list = []
    snaps: list = []

    def record(step, t, vals):
        if step % stride == 0 or step == n_steps:
            times.append(t)
            snaps.append(rho0.with_values(vals.copy()))

    advect(rho0, v, T, dt, _callback=record)
    report = MixingReport(
        "mixing-cost",
        ("t", "eps_H-1", "cost_Lp", "ratio", "grid_valid"),
    )
    ratios = []
    for t, snap in zip(times, snaps):
        eps = sobolev_norm(snap.with_values(snap.values - snap.mean()),
                           -1.0, homogeneous=True)
        if eps < 1e-12:
            break  # numerical floor; truncate the curve
        # flows are piecewise constant in time, midpoints sample each phase
        k = int(round(t / dt))
        cost = sum(gradient_lp_norm(v, (i + 0.5) * dt, p) * dt for i in range(k))
        denom = abs(math.log(eps))
        ratio = cost / denom if denom > 0 else math.inf
        valid = spectral_tail_fraction(snap) <= 0.10
        if t >= T / 2.0:
            ratios.append(ratio)
        report.add_row(float(t), float(eps), float(cost), float(ratio), bool(valid))
        if abs(t - 1.0) < 0.5 * dt * stride:
            _comparison_bridge(report, snap)
    min_ratio = min(ratios) if ratios else math.inf
    report.constants["min_ratio_second_half"] = min_ratio
    report.passed = min_ratio >= declared_constant
    return report


def _comparison_bridge(report: MixingReport, snap: GridFunction) -> None:
    # geometric hypothesis: some radius eps with g_eps <= eps * sup norm of
    # the recentered stripe; analytic conclusion: H^-1 <= C eps
    f = snap.with_values(snap.values - snap.mean())
    sup = f.max_norm()
    if sup == 0.0:
        return
    radii = RadiusGrid.for_field(f)
    rs, vals = functional_profile(f, radii, "ball")
    suffix = np.maximum.accumulate(vals[::-1])[::-1]
    ok = suffix <= rs * sup
    report.constants["geometric_hypothesis_holds"] = bool(np.any(ok))
    if np.any(ok):
        eps_star = float(rs[np.argmax(ok)])
        h = sobolev_norm(f, -1.0, homogeneous=True)
        report.constants["bridge_eps"] = eps_star
        report.constants["bridge_constant"] = h / (eps_star * sup)
