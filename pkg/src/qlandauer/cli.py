"""Command-line front end.

Subcommands: verify, sweep-temp, sweep-theta, crossings, readout, run.
Configuration comes from defaults, then an optional flat key = value file,
then command-line overrides, in that precedence.  Exit codes: 0 success,
1 validation error, 2 numerical failure (a divergent quantity requested in
numeric table form, a failed equality check, or fit non-convergence under
--strict).
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .info import UnitSystem
from .ion import ETA_DEFAULT, OMEGA_DEFAULT, OMEGA_Z_DEFAULT, PulseParams
from .protocol import (
    NBAR_GRID_DEFAULT,
    THETA_GRID_DEFAULT,
    REALISTIC_IMPERFECTIONS,
    ExperimentConfig,
    Imperfections,
    find_entropy_zero_crossings,
    format_ledger_summary,
    format_sweep_table,
    provenance_line,
    run_erasure,
    simulated_readout_run,
    sweep_temperature,
    sweep_theta,
)

VERIFY_RESIDUAL_BOUND = 1e-9

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2

# key -> (parser, default); None defaults mean "derived at build time".
CONFIG_KEYS = {
    "theta_c": (float, math.pi / 2),
    "nbar0": (float, 0.074),
    "eta": (float, ETA_DEFAULT),
    "omega": (float, OMEGA_DEFAULT),
    "phi": (float, 0.0),
    "t_pulse": (float, None),          # None -> pi/(eta*omega)
    "omega_z": (float, OMEGA_Z_DEFAULT),
    "n_max": (int, None),              # None -> automatic sizing
    "shots": (int, 0),
    "seed": (int, 2024),
    "readout_points": (int, 30),
    "readout_span": (float, None),     # None -> 6 * t_op
    "gamma0": (float, 0.0),
    "decay_alpha": (float, 0.7),
    "n_fit": (int, None),              # None -> default_n_fit rule
    "init_fidelity": (float, 1.0),
    "detection_epsilon": (float, 0.0),
    "cool_nbar": (float, 0.0),
    "nbar_min": (float, NBAR_GRID_DEFAULT[0]),
    "nbar_max": (float, NBAR_GRID_DEFAULT[1]),
    "nbar_points": (int, NBAR_GRID_DEFAULT[2]),
    "theta_min": (float, THETA_GRID_DEFAULT[0]),
    "theta_max": (float, THETA_GRID_DEFAULT[1]),
    "theta_points": (int, THETA_GRID_DEFAULT[2]),
}

SUBCOMMANDS = ("verify", "sweep-temp", "sweep-theta", "crossings", "readout", "run")


class CliError(Exception):
    """Validation failure; message names the offending key or value."""


class NumericalFailure(Exception):
    """A numeric result was requested but only a flagged value exists."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qlandauer", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="subcommand")
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name, add_help=True)
        sp.add_argument("--config", dest="config_path", default=None,
                        help="flat key = value config file")
        sp.add_argument("--output", "-o", dest="output_path", default=None,
                        help="write results here instead of stdout")
        sp.add_argument("--format", choices=("table", "structured"), default=None,
                        help="output format (default: table for sweeps, structured otherwise)")
        sp.add_argument("--realistic", action="store_true",
                        help="enable the quoted hardware imperfection preset")
        sp.add_argument("--strict", action="store_true",
                        help="treat fit non-convergence as a numerical failure")
        for key, (kind, _) in CONFIG_KEYS.items():
            sp.add_argument(f"--{key.replace('_', '-')}", dest=key, type=kind,
                            default=None, metavar=key.upper())
    return parser


def parse_config_file(path: str) -> dict:
    """Flat key = value lines; # starts a comment; unknown keys are errors."""
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key = value, got {raw.strip()!r}")
        key, _, text = line.partition("=")
        key, text = key.strip(), text.strip()
        if key not in CONFIG_KEYS:
            raise CliError(f"{path}:{lineno}: unknown config key {key!r}")
        kind, _ = CONFIG_KEYS[key]
        try:
            values[key] = kind(text)
        except ValueError as exc:
            raise CliError(f"{path}:{lineno}: bad value for {key}: {text!r}") from exc
    return values


def load_config(config_path: str | None, overrides: dict,
                realistic: bool = False) -> tuple[ExperimentConfig, dict]:
    """Merge defaults <- config file <- CLI overrides and validate.

    Returns the experiment config plus the raw merged key map (the sweep
    grid keys live only in the latter).  With ``realistic`` the quoted
    imperfection preset provides the baseline; explicitly set keys still win.
    """
    values = {key: default for key, (_, default) in CONFIG_KEYS.items()}
    explicit: set[str] = set()
    if config_path is not None:
        file_values = parse_config_file(config_path)
        values.update(file_values)
        explicit |= set(file_values)
    cli_values = {k: v for k, v in overrides.items() if v is not None}
    values.update(cli_values)
    explicit |= set(cli_values)

    base = REALISTIC_IMPERFECTIONS if realistic else Imperfections()
    imperfections = Imperfections(
        init_fidelity=values["init_fidelity"] if "init_fidelity" in explicit else base.init_fidelity,
        detection_epsilon=values["detection_epsilon"] if "detection_epsilon" in explicit else base.detection_epsilon,
        cool_nbar=values["cool_nbar"] if "cool_nbar" in explicit else base.cool_nbar,
    )

    duration = values["t_pulse"]
    if duration is None:
        duration = math.pi / (values["eta"] * values["omega"])
    try:
        pulse = PulseParams(eta=values["eta"], omega=values["omega"],
                            phi=values["phi"], duration=duration)
        readout_pulse = PulseParams(eta=values["eta"], omega=values["omega"],
                                    phi=values["phi"], duration=0.0)
        config = ExperimentConfig(
            theta_c=values["theta_c"],
            nbar0=values["nbar0"],
            pulse=pulse,
            readout_pulse=readout_pulse,
            n_max=values["n_max"],
            shots=values["shots"],
            seed=values["seed"],
            readout_points=values["readout_points"],
            readout_span=values["readout_span"],
            gamma0=values["gamma0"],
            decay_alpha=values["decay_alpha"],
            n_fit=values["n_fit"],
            imperfections=imperfections,
        )
        config.validate()
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    return config, values


def _emit(text: str, output_path: str | None) -> None:
    if output_path is None:
        sys.stdout.write(text)
    else:
        with open(output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _require_numeric(ledger, fmt: str) -> None:
    if ledger.divergent and fmt == "table":
        raise NumericalFailure(
            "ledger contains divergent quantities (nbar0 = 0); "
            "use --format structured to display them as flags"
        )


def _row_table(rows, command: str, config: ExperimentConfig) -> str:
    return format_sweep_table(rows, provenance_line(command, config))


def _cmd_verify(config: ExperimentConfig, values: dict, fmt: str) -> str:
    ledger, _, _ = run_erasure(config)
    fmt = fmt or "structured"
    _require_numeric(ledger, fmt)
    text = format_ledger_summary(ledger, config, provenance_line("verify", config),
                                 units=UnitSystem(values["omega_z"]))
    if ledger.divergent:
        text += "verified = divergent\n"
    else:
        ok = abs(ledger.residual) < VERIFY_RESIDUAL_BOUND
        text += f"verified = {'yes' if ok else 'no'}\n"
        if not ok:
            raise NumericalFailure(
                f"equality residual {ledger.residual:.3e} exceeds {VERIFY_RESIDUAL_BOUND}"
            )
    return text


def _cmd_run(config: ExperimentConfig, values: dict, fmt: str) -> str:
    fmt = fmt or "structured"
    row = simulated_readout_run(config)
    ledger, _, _ = run_erasure(config)
    _require_numeric(ledger, fmt)
    if fmt == "table":
        return _row_table([row], "run", config)
    text = format_ledger_summary(ledger, config, provenance_line("run", config),
                                 units=UnitSystem(values["omega_z"]))
    text += (
        f"exact_mean_phonon_pre = {row.exact_mean_phonon_pre!r}\n"
        f"fitted_mean_phonon_pre = {row.fitted_mean_phonon_pre!r}\n"
        f"exact_mean_phonon_post = {row.exact_mean_phonon!r}\n"
        f"fitted_mean_phonon_post = {row.fitted_mean_phonon!r}\n"
        f"delta_q_estimate_q0 = {row.delta_q_estimate!r}\n"
        f"readout_model_error = {row.readout_model_error!r}\n"
        f"shots = {config.shots!r}\n"
    )
    return text


def _cmd_readout(config: ExperimentConfig, values: dict, fmt: str, strict: bool) -> str:
    row = simulated_readout_run(config)
    fmt = fmt or "structured"
    if strict and not row.fit_converged:
        raise NumericalFailure("phonon fit hit the iteration cap without converging")
    if fmt == "table":
        return _row_table([row], "readout", config)
    lines = [provenance_line("readout", config)]
    for name in ("value", "nbar0", "exact_mean_phonon_pre", "fitted_mean_phonon_pre",
                 "exact_mean_phonon", "fitted_mean_phonon", "delta_q_estimate",
                 "readout_model_error"):
        val = getattr(row, name)
        lines.append(f"{name} = {'divergent' if val is None else repr(float(val))}")
    lines.append(f"fit_converged = {'yes' if row.fit_converged else 'no'}")
    return "\n".join(lines) + "\n"


def _cmd_sweep_temp(config: ExperimentConfig, values: dict, fmt: str) -> str:
    lo, hi, n = values["nbar_min"], values["nbar_max"], values["nbar_points"]
    if not 0 < lo <= hi:
        raise CliError(f"invalid nbar grid: nbar_min={lo}, nbar_max={hi}")
    if n < 1:
        raise CliError(f"nbar_points must be >= 1, got {n}")
    grid = np.geomspace(lo, hi, n)
    rows = sweep_temperature(config, grid)
    return _row_table(rows, "sweep-temp", config)


def _cmd_sweep_theta(config: ExperimentConfig, values: dict, fmt: str) -> str:
    lo, hi, n = values["theta_min"], values["theta_max"], values["theta_points"]
    if not 0 <= lo <= hi <= math.pi:
        raise CliError(f"invalid theta grid: theta_min={lo}, theta_max={hi}")
    if n < 1:
        raise CliError(f"theta_points must be >= 1, got {n}")
    grid = np.linspace(lo, hi, n)
    rows = sweep_theta(config, grid)
    return _row_table(rows, "sweep-theta", config)


def _cmd_crossings(config: ExperimentConfig, values: dict, fmt: str) -> str:
    theta_low, theta_high = find_entropy_zero_crossings(config)
    lines = [
        provenance_line("crossings", config),
        f"nbar0 = {config.effective_nbar0!r}",
        f"theta_low = {'absent' if theta_low is None else repr(theta_low)}",
        f"theta_high = {'absent' if theta_high is None else repr(theta_high)}",
    ]
    return "\n".join(lines) + "\n"


def parse_and_dispatch(argv: list[str]) -> int:
    """Parse arguments, run the subcommand, write results; return exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.subcommand is None:
            raise CliError("a subcommand is required: " + ", ".join(SUBCOMMANDS))
        overrides = {key: getattr(args, key) for key in CONFIG_KEYS}
        config, values = load_config(args.config_path, overrides, args.realistic)
        fmt = args.format
        if args.subcommand == "verify":
            text = _cmd_verify(config, values, fmt)
        elif args.subcommand == "run":
            text = _cmd_run(config, values, fmt)
        elif args.subcommand == "readout":
            text = _cmd_readout(config, values, fmt, args.strict)
        elif args.subcommand == "sweep-temp":
            text = _cmd_sweep_temp(config, values, fmt)
        elif args.subcommand == "sweep-theta":
            text = _cmd_sweep_theta(config, values, fmt)
        else:
            text = _cmd_crossings(config, values, fmt)
        _emit(text, args.output_path)
        return EXIT_OK
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
