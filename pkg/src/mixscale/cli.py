"""Experiment runner: reproducible, configured runs with CSV artifacts.

Usage: ``mixscale <experiment> [--key value]...`` with optional ``--config
FILE`` (flat ``key=value`` lines; command-line pairs override the file) and
``--out DIR`` (defaults to ``$MIXSCALE_OUT`` or the working directory).
Every run writes one CSV per report plus ``<experiment>-manifest.json``
listing the full configuration, measured constants and pass/fail flags.
The exit status is nonzero iff an asserted inequality failed.

Randomness comes from a seeded numpy PCG64 generator whose identifier is
recorded in the manifest, so identical configurations produce byte-identical
CSV files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import dyadic_walsh as dw
from . import transport as tr
from .fields import GridFunction, sobolev_norm
from .mixing_scales import (
    MixingReport,
    RadiusGrid,
    fit_exponent,
    functional_profile,
    geometric_scale,
    make_oscillating_sign,
    make_sawtooth,
    make_two_scale,
    verify_upper_estimate,
)
from .mixing_cost import VelocityField, gronwall_check, mixing_cost_curve, \
    single_mode_field, stripe_field

__all__ = ["ExperimentConfig", "run", "main", "EXPERIMENTS"]

RNG_ALGORITHM = "numpy-PCG64"


@dataclass
class ExperimentConfig:
    """Flat parameter set for one experiment run."""

    experiment: str
    params: dict = field(default_factory=dict)
    outdir: str = "."
    seed: int = 0


class UsageError(Exception):
    pass


def _random_mean_zero_field(rng: np.random.Generator, n: int, band: int) -> GridFunction:
    line = np.zeros(n, dtype=complex)
    idx = np.arange(1, band + 1)
    amps = rng.standard_normal(band) + 1j * rng.standard_normal(band)
    line[idx] = amps
    line[-idx] = np.conj(amps)
    values = np.fft.ifft(line).real * n
    return GridFunction(values, ((0.0, 1.0),), periodic=True)


# -- individual experiments ---------------------------------------------------


def _exp_dyadic_estimates(p: dict, rng: np.random.Generator) -> list:
    J = p["J"]
    n = 2 ** J
    tol = p["tol"]
    weights = 1.0 / (1.0 + np.arange(n, dtype=float) ** 2)
    worst = np.zeros((J + 1, 3))
    for _ in range(p["trials"]):
        f = dw.DyadicSignal(rng.standard_normal(n))
        c = dw.walsh_coefficients(f)
        c2 = c * c
        prefix_h = np.concatenate([[0.0], np.cumsum(weights * c2)])
        prefix_e = np.concatenate([[0.0], np.cumsum(c2)])
        h_full = math.sqrt(prefix_h[-1])
        total = prefix_e[-1]
        for j in range(J + 1):
            m = 2 ** j
            g = float(np.max(np.abs(f.values.reshape(m, -1).mean(axis=1))))
            h_j = math.sqrt(prefix_h[m])
            rem = math.sqrt(max(0.0, total - prefix_e[m]))
            worst[j, 0] = max(worst[j, 0], h_j - g)
            worst[j, 1] = max(worst[j, 1], h_full - (g + 2.0 ** (-j) * rem))
            worst[j, 2] = max(worst[j, 2], g - 2.0 ** (1.5 * j) * h_j)
    report = MixingReport(
        "dyadic-estimates",
        ("j", "trials", "excess_h_le_g", "excess_hfull", "excess_g_le_h", "pass"),
    )
    for j in range(J + 1):
        ok = bool(np.all(worst[j] <= tol))
        report.add_row(j, p["trials"], worst[j, 0], worst[j, 1], worst[j, 2], ok)
        report.passed = report.passed and ok
    report.constants["max_violation"] = float(worst.max())
    return [("estimates", report)]


def first_resolved_scale(j0: int, alpha: float) -> int:
    """Smallest dyadic scale at which the packet-sum family has a nonzero
    projection, plus one (so at least half the visible levels are populated).

    At ``floor(alpha j0)`` the family is orthogonal to every cell indicator
    (its levels all sit at or above ``2^{floor(alpha j0)}``), so the scale
    seminorms there are exactly zero and carry no trend information.
    """
    lmin = math.ceil(2.0 ** (alpha * j0)) - 1
    return lmin.bit_length() + 1 if lmin > 0 else 1


def _exp_dyadic_optimal(p: dict, rng) -> list:
    j0s = list(range(p["j0_min"], p["j0_max"] + 1))
    report = MixingReport(
        "dyadic-optimal",
        ("alpha", "j0", "j_floor", "g_floor", "j_eval", "g_eval", "scaled_g"),
    )
    trends = {}
    for alpha, expects_growth, scaled in (
        (0.55, False, False), (0.75, True, False),
        (0.30, False, True), (0.50, True, True),
    ):
        values = []
        for j0 in j0s:
            f = dw.make_packet_sum(j0, alpha, j0)
            j_floor = int(math.floor(alpha * j0))
            g_floor = dw.dyadic_geometric(f, j_floor)
            j_eval = min(first_resolved_scale(j0, alpha), j0)
            g = dw.dyadic_geometric(f, j_eval)
            v = 2.0 ** j_eval * g if scaled else g
            values.append(v)
            report.add_row(alpha, j0, j_floor, g_floor, j_eval, g, 2.0 ** j_eval * g)
        slope, _ = fit_exponent(list(zip([2.0 ** j for j in j0s], values)))
        ordered = values[-1] > values[0] if expects_growth else values[-1] < values[0]
        ok = ordered and ((slope > 0) == expects_growth)
        key = f"slope_alpha_{alpha:g}" + ("_scaled" if scaled else "")
        trends[key] = slope
        report.passed = report.passed and ok
    report.constants.update(trends)
    report.comments.append(
        "trends evaluated at the first resolved scale; at floor(alpha j0) the "
        "family projects to zero (g_floor column) and carries no information")
    return [("optimal", report)]


def _exp_scales_compare(p: dict, rng) -> list:
    out = []
    f = _random_mean_zero_field(rng, p["n"], p["band"])
    radii = RadiusGrid.for_field(f)
    hat_h1 = math.sqrt(2.0 / 3.0 + 2.0)  # tent on [-1,1], L1-normalized
    rep = verify_upper_estimate(f, p["lam"], hat_h1, radii, kind="hat",
                                declared_constant=p["constant"])
    out.append(("upper-estimate", rep))

    saw = make_sawtooth(p["sawtooth_n"], max(1, int(round(2.0 ** (p["sawtooth_n"] / 3.0)))))
    radii_s = RadiusGrid.for_field(saw)
    eps = 2.0 ** (-p["sawtooth_n"])
    rs, vals = functional_profile(saw, radii_s)
    suffix = np.maximum.accumulate(vals[::-1])[::-1]
    rep2 = MixingReport("sawtooth", ("r", "g_r", "bound", "ratio", "pass"))
    worst = 0.0
    for r, g in zip(rs, suffix):
        if r < eps ** 0.4:
            continue
        ratio = g / r
        worst = max(worst, ratio)
        ok = ratio <= p["constant"]
        rep2.add_row(float(r), float(g), float(p["constant"] * r), float(ratio), ok)
        rep2.passed = rep2.passed and ok
    rep2.constants["measured_constant"] = worst
    out.append(("sawtooth", rep2))

    rep3 = MixingReport("oscillating", ("k", "scale_above", "scale_below", "pass"))
    prev = None
    for k in p["k_list"]:
        g = make_oscillating_sign(k)
        radii_g = RadiusGrid.for_field(g)
        hi = geometric_scale(g, 0.6, radii_g)
        lo = geometric_scale(g, 0.4, radii_g)
        ok = hi is not None and (prev is None or hi <= prev * (1.0 + 1e-9))
        prev = hi if hi is not None else prev
        rep3.add_row(k, math.inf if hi is None else hi,
                     math.inf if lo is None else lo, ok)
        rep3.passed = rep3.passed and ok
    out.append(("oscillating", rep3))
    return out


def _exp_two_scale(p: dict, rng) -> list:
    report = MixingReport(
        "two-scale", ("j1", "j0", "h_minus_1", "scaled", "pass"))
    pairs = []
    scaled_vals = []
    for j1 in range(p["j1_min"], p["j1_max"] + 1):
        j0 = j1 + p["gap"]
        f = make_two_scale(j0, j1)
        h = sobolev_norm(f, -1.0, homogeneous=True)
        scaled = h * 2.0 ** (j1 / 2.0)
        pairs.append((2.0 ** (-j1), h))
        scaled_vals.append(scaled)
        report.add_row(j1, j0, h, scaled, True)
    slope, resid = fit_exponent(pairs)
    spread = max(scaled_vals) / min(scaled_vals)
    report.passed = spread <= 4.0 and abs(slope - 0.5) < 0.2
    report.constants["slope"] = slope
    report.constants["spread"] = spread
    report.comments.append(f"exponent={slope!r} residual={resid!r}")
    return [("two-scale", report)]


def _exp_transport_decay(p: dict, rng) -> list:
    times = np.geomspace(1.0, p["tmax"], p["tcount"])
    report = MixingReport("transport-decay", ("t", "L2Hm1", "ratio", "bound"))
    worst = 0.0
    for _ in range(p["trials"]):
        u0 = tr.random_admissible(rng, p["kmax"], p["ny"], p["band"])
        rep = tr.decay_curve(u0, p["s"], times, declared_constant=p["bound"])
        report.rows.extend(rep.rows)
        report.passed = report.passed and rep.passed
        worst = max(worst, rep.constants["measured_constant"])
    report.constants["measured_constant"] = worst
    return [("decay", report)]


def _exp_transport_resonant(p: dict, rng) -> list:
    jmax = p["jmax"]
    alphas = np.array([1.0 / j for j in range(1, jmax + 1)])
    alphas /= np.linalg.norm(alphas)
    t_list = [p["tbase"] * 2 ** j for j in range(1, jmax + 1)]
    u0 = tr.make_resonant_data(alphas, t_list, p["s"])
    denom = tr.mixed_norm(u0, -p["s"], p["s"])
    report = MixingReport("transport-resonant", ("t", "L2Hm1", "ratio", "bound"))
    cmin = math.inf
    for a, t in zip(alphas, t_list):
        norm = tr.mixed_norm(tr.evolve_free(u0, float(t)), 0.0, -1.0)
        c = norm / (a * t ** (-p["s"]) * denom)
        cmin = min(cmin, c)
        report.add_row(float(t), norm, c, p["cmin"])
        report.passed = report.passed and c >= p["cmin"]
    report.constants["measured_constant"] = cmin
    report.constants["normalization"] = denom
    return [("resonant", report)]


def _exp_transport_geometric(p: dict, rng) -> list:
    u0 = tr.make_geometric_lower_data(p["s"], p["jmax"], p["tbase"])
    report = MixingReport(
        "transport-geometric",
        ("t", "r", "square_avg", "ball_avg", "bound", "ratio", "pass"),
    )
    cmin = math.inf
    for j in range(1, p["jmax"] + 1):
        rep = tr.geometric_lower_check(u0, p["s"], j, p["tbase"],
                                       declared_constant=p["cmin"])
        report.rows.extend(rep.rows)
        report.passed = report.passed and rep.passed
        cmin = min(cmin, rep.constants["measured_constant"])
    report.constants["measured_constant"] = cmin
    return [("geometric", report)]


def _exp_cost_gronwall(p: dict, rng) -> list:
    out = []
    data = {"stripe": stripe_field(p["n"]), "mode": single_mode_field(p["n"])}
    for kind in ("shear", "cellular", "alternating"):
        v = VelocityField(kind, p["amplitude"])
        for name, rho0 in data.items():
            rep = gronwall_check(rho0, v, p["T"], p["dt"])
            out.append((f"gronwall-{kind}-{name}", rep))
    return out


def _exp_cost_curve(p: dict, rng) -> list:
    v = VelocityField(p["flow"], p["amplitude"])
    rep = mixing_cost_curve(v, p["p"], p["T"], p["dt"], n=p["n"],
                            declared_constant=p["cmin"])
    return [("cost-curve", rep)]


EXPERIMENTS = {
    "dyadic-estimates": (_exp_dyadic_estimates, {
        "J": (int, 12), "trials": (int, 1000), "tol": (float, 1e-10)}),
    "dyadic-optimal": (_exp_dyadic_optimal, {
        "j0_min": (int, 8), "j0_max": (int, 16)}),
    "scales-compare": (_exp_scales_compare, {
        "n": (int, 4096), "band": (int, 64), "lam": (float, 1.0),
        "constant": (float, 10.0), "sawtooth_n": (int, 7),
        "k_list": (lambda s: [int(x) for x in str(s).split(";")], [8, 16, 32, 64])}),
    "two-scale": (_exp_two_scale, {
        "j1_min": (int, 4), "j1_max": (int, 10), "gap": (int, 6)}),
    "transport-decay": (_exp_transport_decay, {
        "s": (float, 0.5), "tmax": (float, 100.0), "tcount": (int, 15),
        "trials": (int, 20), "kmax": (int, 8), "ny": (int, 4096),
        "band": (int, 64), "bound": (float, 4.0)}),
    "transport-resonant": (_exp_transport_resonant, {
        "s": (float, 0.5), "jmax": (int, 6), "tbase": (int, 8),
        "cmin": (float, 0.25)}),
    "transport-geometric": (_exp_transport_geometric, {
        "s": (float, 0.25), "jmax": (int, 4), "tbase": (int, 32),
        "cmin": (float, 0.125)}),
    "cost-gronwall": (_exp_cost_gronwall, {
        "T": (float, 2.0), "dt": (float, 1.0 / 64.0), "n": (int, 256),
        "amplitude": (float, 1.0)}),
    "cost-curve": (_exp_cost_curve, {
        "flow": (str, "alternating"), "p": (float, 2.0), "T": (float, 2.0),
        "dt": (float, 1.0 / 64.0), "n": (int, 256), "amplitude": (float, 1.0),
        "cmin": (float, 0.05)}),
}


def _parse_config_file(path: str) -> dict:
    raw = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"malformed config line {line!r}: expected key=value")
            key, value = line.split("=", 1)
            raw[key.strip()] = value.strip()
    return raw


def _coerce(experiment: str, raw: dict) -> dict:
    _, schema = EXPERIMENTS[experiment]
    params = {key: default for key, (_, default) in schema.items()}
    for key, value in raw.items():
        if key not in schema:
            raise UsageError(
                f"unknown parameter {key!r} for experiment {experiment!r}; "
                f"valid keys: {', '.join(sorted(schema))}")
        conv = schema[key][0]
        try:
            params[key] = conv(value)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"invalid value for {key!r}: {value!r} ({exc})")
    return params


def run(config: ExperimentConfig) -> int:
    """Execute one experiment; write CSVs and a manifest, return exit status."""
    if config.experiment not in EXPERIMENTS:
        raise UsageError(
            f"unknown experiment {config.experiment!r}; valid experiments: "
            + ", ".join(sorted(EXPERIMENTS)))
    runner, _ = EXPERIMENTS[config.experiment]
    rng = np.random.default_rng(config.seed)
    os.makedirs(config.outdir, exist_ok=True)
    reports = runner(config.params, rng)
    manifest = {
        "experiment": config.experiment,
        "seed": config.seed,
        "rng": RNG_ALGORITHM,
        "config": {k: repr(v) for k, v in sorted(config.params.items())},
        "reports": {},
    }
    all_ok = True
    for name, report in reports:
        path = os.path.join(config.outdir, f"{config.experiment}-{name}.csv")
        report.write_csv(path)
        manifest["reports"][name] = {
            "csv": os.path.basename(path),
            "passed": bool(report.passed),
            "constants": {k: repr(float(v)) for k, v in sorted(report.constants.items())},
        }
        all_ok = all_ok and report.passed
    with open(os.path.join(config.outdir, f"{config.experiment}-manifest.json"),
              "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0 if all_ok else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mixscale",
        description="Mixing-scale experiments with CSV artifacts.")
    parser.add_argument("experiment", help="experiment name, e.g. dyadic-estimates")
    parser.add_argument("--config", help="flat key=value parameter file")
    parser.add_argument("--out", default=os.environ.get("MIXSCALE_OUT", "."),
                        help="output directory (default: $MIXSCALE_OUT or .)")
    parser.add_argument("--seed", type=int, default=0)
    args, extra = parser.parse_known_args(argv)
    try:
        if args.experiment not in EXPERIMENTS:
            raise UsageError(
                f"unknown experiment {args.experiment!r}; valid experiments: "
                + ", ".join(sorted(EXPERIMENTS)))
        raw = {}
        if args.config:
            raw.update(_parse_config_file(args.config))
        if len(extra) % 2 != 0:
            raise UsageError(f"dangling option in {extra!r}; use --key value pairs")
        for flag, value in zip(extra[0::2], extra[1::2]):
            if not flag.startswith("--"):
                raise UsageError(f"expected --key, got {flag!r}")
            raw[flag[2:]] = value
        params = _coerce(args.experiment, raw)
        config = ExperimentConfig(args.experiment, params, args.out, args.seed)
        return run(config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
