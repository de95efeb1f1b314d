"""Scenario runner.

Configure a drive sequence in a JSON file, sweep phase / kick number /
quasimomentum, and write the resulting momentum distributions, mean-momentum
series and current fits as CSV files plus a machine-readable JSON summary.
Identical configs (including ensemble seeds) produce byte-identical CSVs.

Subcommands:
    simulate <config>                run a scenario
    validate <config>                check a config without running it
    preset <name> --out <dir>        materialize and run a shipped scenario

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import kernels
from .analytic import resonant_probability_row
from .bessel import BesselTable
from .core import (ExperimentSequence, PhysicalParams, ScaledParams,
                   new_ladder_state, scaled_period)
from .observables import beta_gaussian, beta_grid, beta_uniform, fit_current
from .prep import prepare_superposition
from .propagator import (DELTA_PULSE, PulseProfile, SubstepError,
                         TruncationError, iterate_periods)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3

SCHEMA_VERSION = 1
PRESET_NAMES = ("figure2", "figure4", "dephasing")
#: Preset runs must agree with the closed-form route to this level.
PRESET_DEVIATION_LIMIT = 1e-10

CONTROL_KEY = "control"


class ConfigError(ValueError):
    """Invalid scenario configuration; `diagnostics` lists field-level messages."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass(frozen=True)
class ScenarioConfig:
    """A fully resolved, validated scenario."""

    physical: PhysicalParams
    sequence: ExperimentSequence
    phases: tuple[tuple[str, float], ...]  # (token, radians)
    kick_counts: tuple[int, ...]
    betas: tuple[float, ...]
    include_control: bool
    margin: int
    substeps: int
    norm_tolerance: float
    out_dir: str
    out_format: str


def parse_angle(value, field: str, errors: list[str]):
    """Accept an angle as radians (number) or as a multiple of pi ("0.5pi")."""
    if isinstance(value, bool):
        errors.append(f"{field}: expected an angle, got {value!r}")
        return None
    if isinstance(value, (int, float)):
        return float(value), repr(float(value))
    if isinstance(value, str):
        token = value.strip().replace(" ", "")
        if token.endswith("pi"):
            head = token[:-2]
            if head in ("", "+"):
                return math.pi, token
            if head == "-":
                return -math.pi, token
            try:
                return float(head) * math.pi, token
            except ValueError:
                errors.append(f"{field}: cannot parse angle {value!r}")
                return None
        try:
            return float(token), token
        except ValueError:
            errors.append(f"{field}: cannot parse angle {value!r} "
                          "(use radians or an 'Xpi' multiple)")
            return None
    errors.append(f"{field}: expected a number or 'Xpi' string, "
                  f"got {type(value).__name__}")
    return None


def _section(raw: dict, name: str, errors: list[str]):
    value = raw.get(name)
    if value is None:
        errors.append(f"{name}: missing section")
        return {}
    if not isinstance(value, dict):
        errors.append(f"{name}: expected an object")
        return {}
    return value


def _number(section: dict, section_name: str, key: str, errors: list[str],
            default=None, minimum=None, exclusive_minimum=None):
    field = f"{section_name}.{key}"
    if key not in section:
        if default is not None:
            return default
        errors.append(f"{field}: missing")
        return None
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"{field}: expected a number, got {value!r}")
        return None
    value = float(value)
    if minimum is not None and value < minimum:
        errors.append(f"{field}: must be >= {minimum}, got {value}")
        return None
    if exclusive_minimum is not None and value <= exclusive_minimum:
        errors.append(f"{field}: must be > {exclusive_minimum}, got {value}")
        return None
    return value


def _integer(section: dict, section_name: str, key: str, errors: list[str],
             default=None, minimum=None):
    field = f"{section_name}.{key}"
    if key not in section:
        if default is not None:
            return default
        errors.append(f"{field}: missing")
        return None
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, int):
        errors.append(f"{field}: expected an integer, got {value!r}")
        return None
    if minimum is not None and value < minimum:
        errors.append(f"{field}: must be >= {minimum}, got {value}")
        return None
    return value


def _duration(section: dict, section_name: str, key: str, talbot: float,
              errors: list[str]):
    """A duration as {"talbot_units": x} or {"seconds": y}, returned in seconds.

    talbot_units keeps exactly resonant configs exactly resonant: 1.0 maps to
    the Talbot time bit-for-bit.
    """
    field = f"{section_name}.{key}"
    value = section.get(key)
    if not isinstance(value, dict) or len(value) != 1 or \
            next(iter(value)) not in ("talbot_units", "seconds"):
        errors.append(f"{field}: expected exactly one of "
                      "{'talbot_units': x} or {'seconds': y}")
        return None
    unit, amount = next(iter(value.items()))
    if isinstance(amount, bool) or not isinstance(amount, (int, float)):
        errors.append(f"{field}.{unit}: expected a number, got {amount!r}")
        return None
    amount = float(amount)
    if amount < 0:
        errors.append(f"{field}.{unit}: must be >= 0, got {amount}")
        return None
    return amount * talbot if unit == "talbot_units" else amount


def _check_unknown(section: dict, section_name: str, allowed, errors: list[str]):
    for key in section:
        if key not in allowed:
            errors.append(f"{section_name}.{key}: unknown field")


def resolve_config(raw) -> ScenarioConfig:
    """Validate a parsed JSON document and resolve it into a ScenarioConfig.

    Collects every diagnostic it can before raising ConfigError.
    """
    errors: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigError(["top level: expected a JSON object"])
    _check_unknown(raw, "top level",
                   ("schema_version", "physical", "sequence", "sweep",
                    "numerics", "output"), errors)
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        errors.append(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")

    physical_raw = _section(raw, "physical", errors)
    _check_unknown(physical_raw, "physical",
                   ("recoil_frequency_rad_s", "lattice_wavenumber_per_m"), errors)
    recoil = _number(physical_raw, "physical", "recoil_frequency_rad_s", errors,
                     exclusive_minimum=0.0)
    wavenumber = _number(physical_raw, "physical", "lattice_wavenumber_per_m",
                         errors, default=-1.0, exclusive_minimum=0.0)
    physical = None
    if recoil is not None:
        kwargs = {"recoil_freq": recoil}
        if wavenumber != -1.0:
            kwargs["lattice_wavenumber"] = wavenumber
        physical = PhysicalParams(**kwargs)
    talbot = physical.talbot_time if physical is not None else 1.0

    sequence_raw = _section(raw, "sequence", errors)
    _check_unknown(sequence_raw, "sequence",
                   ("kick_strength", "kick_period", "pulse_width",
                    "bragg_area", "bragg_duration_s", "phase_delay_s"), errors)
    kick_strength = _number(sequence_raw, "sequence", "kick_strength", errors,
                            minimum=0.0)
    kick_period = _duration(sequence_raw, "sequence", "kick_period", talbot, errors)
    pulse_width = _duration(sequence_raw, "sequence", "pulse_width", talbot, errors)
    bragg_area = None
    if "bragg_area" in sequence_raw:
        parsed = parse_angle(sequence_raw["bragg_area"], "sequence.bragg_area", errors)
        if parsed is not None:
            bragg_area = parsed[0]
    else:
        bragg_area = math.pi / 2
    bragg_duration = _number(sequence_raw, "sequence", "bragg_duration_s",
                             errors, default=60e-6, minimum=0.0)
    phase_delay = _number(sequence_raw, "sequence", "phase_delay_s", errors,
                          default=0.0, minimum=0.0)

    sweep_raw = _section(raw, "sweep", errors)
    _check_unknown(sweep_raw, "sweep",
                   ("phases", "kick_counts", "beta", "include_control"), errors)
    phases: list[tuple[str, float]] = []
    phase_list = sweep_raw.get("phases")
    if not isinstance(phase_list, list) or not phase_list:
        errors.append("sweep.phases: expected a non-empty list of angles")
    else:
        for i, item in enumerate(phase_list):
            parsed = parse_angle(item, f"sweep.phases[{i}]", errors)
            if parsed is not None:
                value, token = parsed
                if any(tok == token for tok, _ in phases):
                    errors.append(f"sweep.phases[{i}]: duplicate phase {token!r}")
                else:
                    phases.append((token, value))

    kick_counts: list[int] = []
    count_list = sweep_raw.get("kick_counts")
    if not isinstance(count_list, list) or not count_list:
        errors.append("sweep.kick_counts: expected a non-empty list of integers")
    else:
        for i, item in enumerate(count_list):
            if isinstance(item, bool) or not isinstance(item, int) or item < 0:
                errors.append(f"sweep.kick_counts[{i}]: expected an integer >= 0, "
                              f"got {item!r}")
            else:
                kick_counts.append(item)
        kick_counts = sorted(set(kick_counts))

    betas = _resolve_betas(sweep_raw.get("beta"), errors)

    include_control = sweep_raw.get("include_control", False)
    if not isinstance(include_control, bool):
        errors.append("sweep.include_control: expected true or false")
        include_control = False

    numerics_raw = raw.get("numerics", {})
    if not isinstance(numerics_raw, dict):
        errors.append("numerics: expected an object")
        numerics_raw = {}
    _check_unknown(numerics_raw, "numerics",
                   ("margin", "substeps", "norm_tolerance"), errors)
    margin = _integer(numerics_raw, "numerics", "margin", errors,
                      default=60, minimum=0)
    substeps = _integer(numerics_raw, "numerics", "substeps", errors,
                        default=16, minimum=1)
    norm_tol = _number(numerics_raw, "numerics", "norm_tolerance", errors,
                       default=1e-12, exclusive_minimum=0.0)

    output_raw = raw.get("output", {})
    if not isinstance(output_raw, dict):
        errors.append("output: expected an object")
        output_raw = {}
    _check_unknown(output_raw, "output", ("directory", "format"), errors)
    out_dir = output_raw.get("directory", ".")
    if not isinstance(out_dir, str) or not out_dir:
        errors.append("output.directory: expected a non-empty string")
        out_dir = "."
    out_format = output_raw.get("format", "csv")
    if out_format != "csv":
        errors.append(f"output.format: only 'csv' is supported, got {out_format!r}")

    sequence = None
    if not errors:
        try:
            sequence = ExperimentSequence(
                bragg_duration=bragg_duration,
                bragg_area=bragg_area,
                phase_delay=phase_delay,
                kick_count=max(kick_counts),
                kick_period=kick_period,
                pulse_width=pulse_width,
                kick_strength=kick_strength,
            )
        except ValueError as exc:
            errors.append(f"sequence: {exc}")

    if errors:
        raise ConfigError(errors)
    return ScenarioConfig(
        physical=physical,
        sequence=sequence,
        phases=tuple(phases),
        kick_counts=tuple(kick_counts),
        betas=tuple(float(b) for b in betas),
        include_control=include_control,
        margin=margin,
        substeps=substeps,
        norm_tolerance=norm_tol,
        out_dir=out_dir,
        out_format=out_format,
    )


def _resolve_betas(spec, errors: list[str]):
    if spec is None:
        return (0.0,)
    if not isinstance(spec, dict) or "kind" not in spec:
        errors.append("sweep.beta: expected an object with a 'kind' field")
        return ()
    kind = spec["kind"]
    try:
        if kind == "fixed":
            _check_unknown(spec, "sweep.beta", ("kind", "value"), errors)
            value = _number(spec, "sweep.beta", "value", errors, default=0.0)
            if value is None or not (-0.5 <= value < 0.5):
                errors.append(f"sweep.beta.value: must lie in [-1/2, 1/2), got {value}")
                return ()
            return (value,)
        if kind == "grid":
            _check_unknown(spec, "sweep.beta", ("kind", "count"), errors)
            count = _integer(spec, "sweep.beta", "count", errors, minimum=1)
            return () if count is None else tuple(beta_grid(count))
        if kind == "uniform":
            _check_unknown(spec, "sweep.beta", ("kind", "count", "seed"), errors)
            count = _integer(spec, "sweep.beta", "count", errors, minimum=1)
            seed = _integer(spec, "sweep.beta", "seed", errors, minimum=0)
            if count is None or seed is None:
                return ()
            return tuple(beta_uniform(count, seed))
        if kind == "gaussian":
            _check_unknown(spec, "sweep.beta", ("kind", "count", "sigma", "seed"),
                           errors)
            count = _integer(spec, "sweep.beta", "count", errors, minimum=1)
            sigma = _number(spec, "sweep.beta", "sigma", errors, minimum=0.0)
            seed = _integer(spec, "sweep.beta", "seed", errors, minimum=0)
            if count is None or sigma is None or seed is None:
                return ()
            return tuple(beta_gaussian(count, sigma, seed))
    except ValueError as exc:
        errors.append(f"sweep.beta: {exc}")
        return ()
    errors.append(f"sweep.beta.kind: expected fixed|grid|uniform|gaussian, "
                  f"got {kind!r}")
    return ()


def load_config(path: str) -> ScenarioConfig:
    """Read, parse and resolve a scenario config file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError([f"{path}: {exc.strerror or exc}"]) from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            [f"{path}: line {exc.lineno}, column {exc.colno}: "
             f"invalid JSON ({exc.msg})"]) from exc
    return resolve_config(raw)


def validate_config(path: str) -> list[str]:
    """Schema and invariant check without running; empty list means ok."""
    try:
        load_config(path)
    except ConfigError as exc:
        return exc.diagnostics
    return []


def _fmt(x) -> str:
    return repr(float(x))


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path: str, header: list[str], rows) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _atomic_write(path, buffer.getvalue())


def _evolve_and_record(state, K, tau, profile, t_max, snap_at, norm_tol):
    """One member's evolution: mean-momentum series plus probability snapshots."""
    momenta = state.momenta
    series = np.empty(t_max + 1)
    probs = state.probabilities()
    series[0] = float(np.dot(momenta, probs))
    snaps = {0: probs} if 0 in snap_at else {}
    for t, psi in enumerate(
            iterate_periods(state, K, tau, t_max, profile, norm_tol), start=1):
        probs = np.abs(psi) ** 2
        series[t] = float(np.dot(momenta, probs))
        if t in snap_at:
            snaps[t] = probs
    return series, snaps


def run_scenario(config: ScenarioConfig, out_dir: str | None = None,
                 fit_min_kick: int = 1) -> dict:
    """Execute a resolved scenario and write its data files.

    Produces distributions.csv, mean_momentum.csv, fits.csv (plus
    control_mean_momentum.csv when the no-Bragg control is enabled) and,
    last, summary.json with the fitted slopes and the maximum deviation of
    the numerical route from the closed-form route at exact resonance.
    """
    started = time.perf_counter()
    out = out_dir or config.out_dir
    os.makedirs(out, exist_ok=True)

    seq = config.sequence
    scaled = ScaledParams(kick_strength=seq.kick_strength,
                          scaled_period=scaled_period(seq.kick_period,
                                                      config.physical))
    K = scaled.kick_strength
    tau = scaled.scaled_period
    scaled_width = (0.0 if seq.pulse_width == 0.0
                    else scaled_period(seq.pulse_width, config.physical))
    profile = (DELTA_PULSE if scaled_width == 0.0
               else PulseProfile("rectangular", scaled_width, config.substeps))
    t_max = max(config.kick_counts)
    snap_at = set(config.kick_counts)
    reach = math.ceil(K * t_max) + config.margin
    n_lo, n_hi = -1 - reach, reach
    indices = np.arange(n_lo, n_hi + 1)
    at_resonance = (tau == 4.0 * math.pi) and profile.is_delta

    dist_rows = []
    series_rows = []
    fit_rows = []
    slopes: dict[str, float | None] = {}
    max_deviation = None

    def record_deviation(numeric, analytic):
        nonlocal max_deviation
        deviation = float(np.abs(numeric - analytic).max())
        if max_deviation is None or deviation > max_deviation:
            max_deviation = deviation

    def fit_slopes(label_token, averaged):
        points = [(t, averaged[t]) for t in range(fit_min_kick, t_max + 1)]
        if len(points) >= 2:
            fit = fit_current(points)
            fit_rows.append([label_token, _fmt(fit.slope), _fmt(fit.intercept),
                             _fmt(fit.residual_rms), fit.points_used])
            slopes[label_token] = fit.slope
        else:
            slopes[label_token] = None

    for token, phi in config.phases:
        member_series = np.empty((len(config.betas), t_max + 1))
        for i, beta in enumerate(config.betas):
            state = prepare_superposition(phi, n_lo, n_hi, beta=beta)
            series, snaps = _evolve_and_record(
                state, K, tau, profile, t_max, snap_at, config.norm_tolerance)
            member_series[i] = series
            for t in sorted(snaps):
                probs = snaps[t]
                dist_rows.extend(
                    [_fmt(phi), t, int(n), _fmt(beta), _fmt(p)]
                    for n, p in zip(indices, probs))
                if at_resonance and beta == 0.0:
                    record_deviation(
                        probs, resonant_probability_row(n_lo, n_hi, K, t, phi))
        averaged = member_series.mean(axis=0)
        series_rows.extend([_fmt(phi), t, _fmt(averaged[t])]
                           for t in range(t_max + 1))
        fit_slopes(token, averaged)

    control_rows = []
    if config.include_control:
        member_series = np.empty((len(config.betas), t_max + 1))
        for i, beta in enumerate(config.betas):
            state = new_ladder_state(n_lo, n_hi, beta=beta, seed_index=0)
            series, snaps = _evolve_and_record(
                state, K, tau, profile, t_max, snap_at, config.norm_tolerance)
            member_series[i] = series
            if at_resonance and beta == 0.0:
                for t in sorted(snaps):
                    table = BesselTable.build(K * t, n_lo, n_hi)
                    record_deviation(snaps[t], table.values ** 2)
        averaged = member_series.mean(axis=0)
        control_rows = [[t, _fmt(averaged[t])] for t in range(t_max + 1)]
        fit_slopes(CONTROL_KEY, averaged)

    _write_csv(os.path.join(out, "distributions.csv"),
               ["phi", "kick", "n", "beta", "probability"], dist_rows)
    _write_csv(os.path.join(out, "mean_momentum.csv"),
               ["phi", "kick", "mean_p"], series_rows)
    if config.include_control:
        _write_csv(os.path.join(out, "control_mean_momentum.csv"),
                   ["kick", "mean_p"], control_rows)
    _write_csv(os.path.join(out, "fits.csv"),
               ["series", "slope", "intercept", "residual_rms", "points_used"],
               fit_rows)

    summary = {
        "schema_version": SCHEMA_VERSION,
        "slopes": slopes,
        "max_abs_deviation": max_deviation,
        "runtime_s": time.perf_counter() - started,
        "kernel_backend": kernels.BACKEND,
        "scaled_params": {
            "kick_strength": scaled.kick_strength,
            "scaled_period": scaled.scaled_period,
            "pulse_width": scaled_width,
        },
    }
    _atomic_write(os.path.join(out, "summary.json"),
                  json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def _preset_resource(name: str):
    return resources.files("kickedbec").joinpath("presets").joinpath(f"{name}.json")


def _cmd_simulate(args) -> int:
    config = load_config(args.config)
    summary = run_scenario(config, out_dir=args.out,
                           fit_min_kick=args.fit_min_kick)
    deviation = summary["max_abs_deviation"]
    deviation_text = ("n/a" if deviation is None else f"{deviation:.3e}")
    print(f"wrote {args.out or config.out_dir}: slopes={summary['slopes']} "
          f"analytic-vs-numeric deviation={deviation_text}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    diagnostics = validate_config(args.config)
    if not diagnostics:
        print("ok")
        return EXIT_OK
    for line in diagnostics:
        print(line, file=sys.stderr)
    return EXIT_CONFIG


def _cmd_preset(args) -> int:
    text = _preset_resource(args.name).read_text(encoding="utf-8")
    config = resolve_config(json.loads(text))
    os.makedirs(args.out, exist_ok=True)
    _atomic_write(os.path.join(args.out, f"{args.name}.json"), text)
    summary = run_scenario(config, out_dir=args.out)
    deviation = summary["max_abs_deviation"]
    if deviation is not None and deviation >= PRESET_DEVIATION_LIMIT:
        print(f"preset {args.name}: analytic-vs-numeric deviation {deviation:.3e} "
              f"exceeds {PRESET_DEVIATION_LIMIT:.1e}", file=sys.stderr)
        return EXIT_NUMERICS
    deviation_text = ("n/a" if deviation is None else f"{deviation:.3e}")
    print(f"preset {args.name} -> {args.out}: slopes={summary['slopes']} "
          f"analytic-vs-numeric deviation={deviation_text}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kickedbec",
        description="Momentum-ladder simulator for a Bragg-prepared, "
                    "lattice-kicked condensate.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a scenario config")
    p_sim.add_argument("config", help="path to a scenario JSON file")
    p_sim.add_argument("--out", default=None,
                       help="output directory (overrides output.directory)")
    p_sim.add_argument("--fit-min-kick", type=int, default=1,
                       help="first kick number included in current fits "
                            "(default 1; use 3 to drop the low-diffusion "
                            "first kicks)")
    p_sim.set_defaults(func=_cmd_simulate)

    p_val = sub.add_parser("validate", help="check a config without running")
    p_val.add_argument("config", help="path to a scenario JSON file")
    p_val.set_defaults(func=_cmd_validate)

    p_pre = sub.add_parser("preset", help="materialize and run a shipped scenario")
    p_pre.add_argument("name", choices=PRESET_NAMES)
    p_pre.add_argument("--out", required=True, help="output directory")
    p_pre.set_defaults(func=_cmd_preset)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for line in exc.diagnostics:
            print(line, file=sys.stderr)
        return EXIT_CONFIG
    except (TruncationError, SubstepError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
