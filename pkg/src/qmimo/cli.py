"""Command-line front end.

Four subcommands: ``rate-sweep`` tabulates closed-form (and optionally
simulated) rate against SNR for a list of converter pairings,
``contour`` tabulates the closed-form rate over a resolution grid,
``plan`` runs the converter-resolution planners, and ``validate`` runs
the built-in numerical cross-check suites.

Experiment commands read a flat key = value config file (see
docs/config.md); every key has a command-line flag of the same name
that wins over the file.  SNR is given in dB and converted once at
parse time.  CSV outputs use 12 significant digits and carry a header
comment with the resolved configuration and seed, so a result file
describes the run that produced it.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .analysis import (
    InfeasibleBudget,
    asymptotic_rate,
    benchmark_rates,
    high_snr_loss_dac,
    plan_adc_bits,
    plan_dac_bits,
    plan_dac_bits_approx,
    rate_loss_dac,
)
from .config import SystemConfig
from .montecarlo import SimulationError, estimate_rate
from .precoding import wishart_trace
from .quantization import REFERENCE_DISTORTION, design_lloyd_max, quantize_real
from .rng import substream

__all__ = ["main", "ConfigError"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SIMULATION = 3
EXIT_INFEASIBLE = 4
EXIT_VALIDATION = 5


class ConfigError(Exception):
    """Configuration file or flag value rejected, with location info."""


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _parse_bits(text: str):
    text = text.strip().lower()
    if text == "inf":
        return math.inf
    try:
        bits = int(text)
    except ValueError:
        raise ConfigError(f"bits must be an integer or 'inf', got {text!r}") from None
    if bits < 1:
        raise ConfigError(f"bits must be >= 1, got {bits}")
    return bits


def _format_bits(bits) -> str:
    return "inf" if bits == math.inf else str(bits)


def _parse_converters(text: str):
    """Comma list of dac:adc resolution pairs, e.g. 'inf:inf,3:6'."""
    pairs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 2:
            raise ConfigError(f"converter setting must look like DAC:ADC, got {item!r}")
        pairs.append((_parse_bits(parts[0]), _parse_bits(parts[1])))
    if not pairs:
        raise ConfigError("converter list is empty")
    return pairs


def _parse_snr_grid(text: str):
    """Either 'lo:hi:npoints' (inclusive, evenly spaced) or a comma list, in dB."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"snr grid range must be lo:hi:npoints, got {text!r}")
        try:
            lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ConfigError(f"bad snr grid range {text!r}") from None
        if n < 1:
            raise ConfigError(f"snr grid needs at least one point, got {n}")
        if n == 1 and lo != hi:
            raise ConfigError(f"single-point snr grid must have lo == hi, got {text!r}")
        return [float(v) for v in np.linspace(lo, hi, n)]
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad snr grid {text!r}") from None
    if not values:
        raise ConfigError("snr grid is empty")
    return values


def _parse_bit_grid(text: str):
    """Comma list of bits, with 'lo-hi' integer ranges, e.g. '1-8,inf'."""
    grid = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "-" in item and not item.startswith("-"):
            lo_text, hi_text = item.split("-", 1)
            try:
                lo, hi = int(lo_text), int(hi_text)
            except ValueError:
                raise ConfigError(f"bad bits range {item!r}") from None
            if not 1 <= lo <= hi:
                raise ConfigError(f"bad bits range {item!r}")
            grid.extend(range(lo, hi + 1))
        else:
            grid.append(_parse_bits(item))
    if not grid:
        raise ConfigError("bits grid is empty")
    return grid


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}") from None


def read_kv_file(path) -> dict[str, tuple[str, int]]:
    """Parse a flat key = value file into {key: (raw value, line number)}."""
    entries: dict[str, tuple[str, int]] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw.strip()!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw.strip()!r}")
        if key in entries:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        entries[key] = (value, lineno)
    return entries


# Per-command config schema: key -> (value parser, required, default).
SWEEP_SCHEMA = {
    "n_antennas": (_parse_int, True, None),
    "n_users": (_parse_int, True, None),
    "snr_db_grid": (_parse_snr_grid, True, None),
    "converters": (_parse_converters, True, None),
    "n_trials": (_parse_int, False, 500),
    "symbols_per_trial": (_parse_int, False, 2000),
    "seed": (_parse_int, True, None),
    "mode": (str, False, "true-quantizer"),
    "simulate": (_parse_bool, False, False),
    "workers": (_parse_int, False, 1),
    "output": (str, True, None),
    "dump": (str, False, None),
}

CONTOUR_SCHEMA = {
    "n_antennas": (_parse_int, True, None),
    "n_users": (_parse_int, True, None),
    "snr_db": (_parse_float, True, None),
    "dac_bits_grid": (_parse_bit_grid, True, None),
    "adc_bits_grid": (_parse_bit_grid, True, None),
    "seed": (_parse_int, True, None),
    "output": (str, True, None),
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved experiment configuration."""

    command: str
    values: dict

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None


def resolve_config(path, args: argparse.Namespace, schema: dict, command: str) -> RunConfig:
    """Merge config file and flag overrides against one command's schema."""
    entries = read_kv_file(path) if path is not None else {}
    for key, (_, lineno) in entries.items():
        if key not in schema:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    resolved = {}
    for key, (parse, required, default) in schema.items():
        override = getattr(args, key, None)
        if override is not None:
            resolved[key] = parse(override) if isinstance(override, str) else override
        elif key in entries:
            raw, lineno = entries[key]
            try:
                resolved[key] = parse(raw)
            except ConfigError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
        elif required:
            raise ConfigError(f"{path or 'config'}: missing required key {key!r}")
        else:
            resolved[key] = default
    return RunConfig(command=command, values=resolved)


def _system_config(run: RunConfig, snr_db: float, dac_bits, adc_bits) -> SystemConfig:
    try:
        return SystemConfig.with_snr(
            run.n_antennas, run.n_users, 10.0 ** (snr_db / 10.0),
            dac_bits=dac_bits, adc_bits=adc_bits,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _header_comment(run: RunConfig, keys) -> str:
    parts = []
    for key in keys:
        value = run.values[key]
        if key == "converters":
            text = ",".join(f"{_format_bits(da)}:{_format_bits(ad)}" for da, ad in value)
        elif key in ("dac_bits_grid", "adc_bits_grid"):
            text = ",".join(_format_bits(b) for b in value)
        elif key == "snr_db_grid":
            text = ",".join(_fmt(v) for v in value)
        elif isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = _fmt(value)
        else:
            text = str(value)
        parts.append(f"{key}={text}")
    return f"# qmimo {run.command} " + " ".join(parts)


def cmd_rate_sweep(args: argparse.Namespace) -> int:
    run = resolve_config(args.config, args, SWEEP_SCHEMA, "rate-sweep")
    if run.mode not in ("true-quantizer", "bussgang-linear", "per-term-analytic"):
        raise ConfigError(f"unknown simulation mode {run.mode!r}")
    snr_grid = run.snr_db_grid
    lines = [_header_comment(run, [k for k in SWEEP_SCHEMA
                                   if k not in ("workers", "output", "dump")])]
    lines.append("snr_db,closed_form_rate,sim_rate_mean,sim_rate_se,label")
    n_blocks = len(run.converters) * len(snr_grid)
    for setting_index, (dac_bits, adc_bits) in enumerate(run.converters):
        label = f"{_format_bits(dac_bits)}:{_format_bits(adc_bits)}"
        for snr_index, snr_db in enumerate(snr_grid):
            cfg = _system_config(run, snr_db, dac_bits, adc_bits)
            closed = asymptotic_rate(cfg)
            sim_mean = sim_se = ""
            if run.simulate:
                block = setting_index * len(snr_grid) + snr_index
                dump_path = _dump_path(run.dump, block, n_blocks)
                est = estimate_rate(
                    cfg, run.n_trials, run.symbols_per_trial, run.mode,
                    run.seed, stream_key=(block,), n_workers=run.workers,
                    dump_path=dump_path,
                )
                sim_mean = _fmt(est.rate)
                sim_se = _fmt(est.standard_error)
            lines.append(f"{_fmt(snr_db)},{_fmt(closed)},{sim_mean},{sim_se},{label}")
    _write_lines(run.output, lines)
    return EXIT_OK


def _dump_path(template, block: int, n_blocks: int):
    if template is None:
        return None
    if n_blocks == 1:
        return template
    stem, dot, suffix = str(template).rpartition(".")
    if not dot:
        return f"{template}_b{block}"
    return f"{stem}_b{block}.{suffix}"


def _write_lines(path, lines) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_contour(args: argparse.Namespace) -> int:
    run = resolve_config(args.config, args, CONTOUR_SCHEMA, "contour")
    lines = [_header_comment(run, [k for k in CONTOUR_SCHEMA if k != "output"])]
    lines.append("b_da,b_ad,rate")
    for dac_bits in run.dac_bits_grid:
        for adc_bits in run.adc_bits_grid:
            cfg = _system_config(run, run.snr_db, dac_bits, adc_bits)
            lines.append(
                f"{_format_bits(dac_bits)},{_format_bits(adc_bits)},"
                f"{_fmt(asymptotic_rate(cfg))}"
            )
    _write_lines(run.output, lines)
    return EXIT_OK


def _load_as_fraction(beta: float) -> tuple[int, int]:
    frac = Fraction(beta).limit_denominator(10**6)
    return frac.numerator, frac.denominator


def cmd_plan(args: argparse.Namespace) -> int:
    if (args.fixed_adc is None) == (args.fixed_dac is None):
        raise ConfigError("exactly one of --fixed-adc or --fixed-dac is required")
    if args.loss is None or args.loss <= 0:
        raise ConfigError("--loss must be a positive rate budget in bits/s/Hz")
    beta = args.beta
    if beta is None or not 0.0 < beta < 1.0:
        raise ConfigError("--beta must lie in (0, 1)")
    rows: list[tuple[str, str]] = []
    if args.fixed_adc is not None:
        adc_bits = _parse_bits(args.fixed_adc)
        if adc_bits == math.inf:
            raise ConfigError("--fixed-adc must be finite for DAC planning")
        planned = plan_dac_bits(adc_bits, args.loss, beta)
        rows.append(("planned_dac_bits_exact", str(planned)))
        rows.append(("planned_dac_bits_approx_a",
                     str(plan_dac_bits_approx(adc_bits, args.loss, beta, "a"))))
        rows.append(("planned_dac_bits_approx_b",
                     str(plan_dac_bits_approx(adc_bits, args.loss, beta, "b"))))
        rows.append(("high_snr_loss_approx_rho",
                     _fmt(high_snr_loss_dac(planned, adc_bits, beta, "approx"))))
        rows.append(("high_snr_loss_table_rho",
                     _fmt(high_snr_loss_dac(planned, adc_bits, beta, "table"))))
        if args.snr_check is not None:
            cfg = _plan_config(beta, args.snr_check, planned, adc_bits)
            rows.append((f"loss_at_{_fmt(args.snr_check)}_db",
                         _fmt(rate_loss_dac(cfg))))
    else:
        dac_bits = _parse_bits(args.fixed_dac)
        if dac_bits == math.inf:
            raise ConfigError("--fixed-dac must be finite for ADC planning")
        planned = plan_adc_bits(dac_bits, args.loss, beta)
        rows.append(("planned_adc_bits", str(planned)))
        # The ADC-side budget formula is approximate; report the implied
        # loss by evaluating the exact closed forms deep in the
        # SNR-limited regime (90 dB stands in for the limit).
        cfg_high = _plan_config(beta, 90.0, dac_bits, planned)
        report = benchmark_rates(cfg_high)
        rows.append(("high_snr_loss_evaluated",
                     _fmt(report.rate_dac_limited - report.rate)))
        if args.snr_check is not None:
            cfg = _plan_config(beta, args.snr_check, dac_bits, planned)
            report = benchmark_rates(cfg)
            rows.append((f"loss_at_{_fmt(args.snr_check)}_db",
                         _fmt(report.rate_dac_limited - report.rate)))
    for key, value in rows:
        print(f"{key}: {value}")
    if args.output:
        _write_lines(args.output,
                     ["quantity,value"] + [f"{k},{v}" for k, v in rows])
    return EXIT_OK


def _plan_config(beta: float, snr_db: float, dac_bits, adc_bits) -> SystemConfig:
    n_users, n_antennas = _load_as_fraction(beta)
    return SystemConfig.with_snr(
        n_antennas, n_users, 10.0 ** (snr_db / 10.0),
        dac_bits=dac_bits, adc_bits=adc_bits,
    )


VALIDATE_SCHEMA = {
    "n_antennas": (_parse_int, False, 128),
    "n_users": (_parse_int, False, 16),
    "seed": (_parse_int, False, 0),
}


def cmd_validate(args: argparse.Namespace) -> int:
    run = resolve_config(args.config, args, VALIDATE_SCHEMA, "validate")
    failures = 0
    for name, passed, detail in (
        _suite_quantizer_table(),
        _suite_wishart(run),
        _suite_bussgang_orthogonality(run),
        _suite_reduction_identities(run),
    ):
        print(f"{name}: {'PASS' if passed else 'FAIL'} ({detail})")
        failures += 0 if passed else 1
    return EXIT_OK if failures == 0 else EXIT_VALIDATION


def _suite_quantizer_table():
    worst_bits, worst = 0, 0.0
    for bits, reference in REFERENCE_DISTORTION.items():
        deviation = abs(design_lloyd_max(bits).rho / reference - 1.0)
        if deviation > worst:
            worst_bits, worst = bits, deviation
    detail = (f"max relative deviation {worst:.3e} at {worst_bits} bits, "
              f"limit 2e-02")
    return "quantizer-table", worst < 0.02, detail


def _suite_wishart(run: RunConfig):
    n, m = run.n_antennas, run.n_users
    rng = substream(run.seed, 0)
    total = 0.0
    n_draws = 200
    for _ in range(n_draws):
        h = (rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))) / math.sqrt(2.0)
        total += wishart_trace(h)
    expected = m / (n - m)
    deviation = abs(total / n_draws / expected - 1.0)
    detail = (f"mean inverse-Gram trace over {n_draws} draws deviates "
              f"{deviation:.3e} from {expected:.6g}, limit 2e-02")
    return "wishart-trace", deviation < 0.02, detail


def _suite_bussgang_orthogonality(run: RunConfig):
    rng = substream(run.seed, 1)
    worst = 0.0
    n_samples = 10**6
    for bits in (2, 4, 6):
        codebook = design_lloyd_max(bits)
        z = rng.normal(size=n_samples)
        error = quantize_real(z, codebook) - (1.0 - codebook.rho) * z
        corr = abs(float(np.dot(error, z))
                   / math.sqrt(float(np.dot(error, error)) * float(np.dot(z, z))))
        worst = max(worst, corr)
    detail = f"max |corr(error, input)| {worst:.3e} at 1e6 samples, limit 1e-02"
    return "bussgang-orthogonality", worst < 0.01, detail


def _suite_reduction_identities(run: RunConfig):
    rng = substream(run.seed, 2)
    worst = 0.0
    for _ in range(1000):
        gain = float(rng.uniform(1.0, 64.0))
        g0 = float(10.0 ** rng.uniform(-2.0, 3.0))
        rho_da = float(rng.uniform(0.0, 0.5))
        rho_ad = float(rng.uniform(0.0, 0.5))

        def siqnr(rd, ra):
            return ((1.0 - ra) * (1.0 - rd) * gain * g0
                    / (rd * g0 + ra * (1.0 - rd) * gain * g0 + 1.0))

        alpha_ad = (1.0 - rho_ad) / (rho_ad * gain * g0 + 1.0)
        alpha_da = (1.0 - rho_da) / (rho_da * g0 + 1.0)
        checks = (
            abs(siqnr(0.0, rho_ad) - alpha_ad * gain * g0) / (alpha_ad * gain * g0),
            abs(siqnr(rho_da, 0.0) - alpha_da * gain * g0) / (alpha_da * gain * g0),
            abs(siqnr(0.0, 0.0) - gain * g0) / (gain * g0),
        )
        worst = max(worst, *checks)
    detail = f"max relative defect {worst:.3e} over 1000 points, limit 1e-12"
    return "reduction-identities", worst < 1e-12, detail


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmimo",
        description="Rate analysis for massive MIMO downlinks with "
                    "low-resolution DACs and ADCs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("rate-sweep", help="rate vs SNR per converter pairing")
    sweep.add_argument("config", nargs="?", default=None,
                       help="key = value config file (flags override it)")
    sweep.add_argument("--n-antennas", dest="n_antennas")
    sweep.add_argument("--n-users", dest="n_users")
    sweep.add_argument("--snr-db-grid", dest="snr_db_grid",
                       help="lo:hi:npoints or comma list, in dB")
    sweep.add_argument("--converters", dest="converters",
                       help="comma list of DAC:ADC bits, e.g. inf:inf,3:6")
    sweep.add_argument("--n-trials", dest="n_trials")
    sweep.add_argument("--symbols-per-trial", dest="symbols_per_trial")
    sweep.add_argument("--seed", dest="seed")
    sweep.add_argument("--mode", dest="mode",
                       choices=["true-quantizer", "bussgang-linear", "per-term-analytic"])
    sweep.add_argument("--simulate", dest="simulate",
                       action=argparse.BooleanOptionalAction, default=None)
    sweep.add_argument("--workers", dest="workers")
    sweep.add_argument("--output", dest="output")
    sweep.add_argument("--dump", dest="dump",
                       help="raw per-trial record file (suffixed per grid "
                            "block when the sweep has several)")
    sweep.set_defaults(func=cmd_rate_sweep)

    contour = sub.add_parser("contour", help="closed-form rate over a bits grid")
    contour.add_argument("config", nargs="?", default=None)
    contour.add_argument("--n-antennas", dest="n_antennas")
    contour.add_argument("--n-users", dest="n_users")
    contour.add_argument("--snr-db", dest="snr_db")
    contour.add_argument("--dac-bits-grid", dest="dac_bits_grid")
    contour.add_argument("--adc-bits-grid", dest="adc_bits_grid")
    contour.add_argument("--seed", dest="seed")
    contour.add_argument("--output", dest="output")
    contour.set_defaults(func=cmd_contour)

    plan = sub.add_parser("plan", help="smallest resolution for a loss budget")
    group = plan.add_mutually_exclusive_group(required=True)
    group.add_argument("--fixed-adc", dest="fixed_adc",
                       help="ADC bits; plans the DAC side")
    group.add_argument("--fixed-dac", dest="fixed_dac",
                       help="DAC bits; plans the ADC side")
    plan.add_argument("--loss", dest="loss", type=float, required=True,
                      help="rate loss budget in bits/s/Hz")
    plan.add_argument("--beta", dest="beta", type=float, required=True,
                      help="user load M/N in (0, 1)")
    plan.add_argument("--snr-check", dest="snr_check", type=float,
                      help="also evaluate the exact loss at this SNR (dB)")
    plan.add_argument("--output", dest="output", help="optional CSV copy")
    plan.set_defaults(func=cmd_plan)

    validate = sub.add_parser("validate", help="run numerical cross-check suites")
    validate.add_argument("config", nargs="?", default=None)
    validate.add_argument("--n-antennas", dest="n_antennas")
    validate.add_argument("--n-users", dest="n_users")
    validate.add_argument("--seed", dest="seed")
    validate.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleBudget as exc:
        print(f"infeasible budget: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SimulationError as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
