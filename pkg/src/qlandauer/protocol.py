"""End-to-end erasure experiments: single runs, sweeps, zero crossings.

The pipeline per run: prepare the qubit via carrier rotation (angle theta_c)
on a possibly imperfectly initialized level, dephase, attach the thermal
reservoir, drive the red sideband for the configured pulse length, then
evaluate the erasure-equality ledger.  Every result is a pure function of
the config (and seed, when shots are drawn), so runs are reproducible
bit for bit and sweep rows may execute in any order.
"""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .info import LandauerLedger, UnitSystem, landauer_ledger, temperature_from_nbar
from .ion import (
    FockTruncation,
    JointState,
    PulseParams,
    carrier_rotation,
    dephase_qubit,
    evolve,
    jc_block_unitary,
    kron,
    thermal_state,
)
from .linalg import DensityMatrix
from .readout import (
    default_n_fit,
    detection_flip,
    exact_trace,
    fit_phonon_populations,
    model_trace,
    sample_shots,
)

# Default sweep grids: logarithmic in nbar for the temperature sweep,
# linear in theta_c for the initial-state sweep.
NBAR_GRID_DEFAULT = (0.01, 2.0, 25)
THETA_GRID_DEFAULT = (0.0, math.pi, 49)

CROSSING_TOL_RAD = 1e-4


@dataclass(frozen=True)
class Imperfections:
    """Optional hardware imperfection knobs; all off in the ideal pipeline."""

    init_fidelity: float = 1.0      # weight on the correct level before the carrier
    detection_epsilon: float = 0.0  # symmetric readout misclassification
    cool_nbar: float = 0.0          # occupation floor left by cooling

    def validate(self) -> None:
        if not 0.0 <= self.init_fidelity <= 1.0:
            raise ValueError(f"init_fidelity must be in [0, 1], got {self.init_fidelity}")
        if not 0.0 <= self.detection_epsilon <= 1.0:
            raise ValueError(
                f"detection_epsilon must be in [0, 1], got {self.detection_epsilon}"
            )
        if self.cool_nbar < 0:
            raise ValueError(f"cool_nbar must be >= 0, got {self.cool_nbar}")


# Quoted hardware values for the realistic preset.
REALISTIC_IMPERFECTIONS = Imperfections(
    init_fidelity=0.989, detection_epsilon=0.0022, cool_nbar=0.030
)


@dataclass(frozen=True)
class ExperimentConfig:
    """One erasure experiment: preparation angle, reservoir occupation,
    drive parameters, truncation, readout settings, imperfections."""

    theta_c: float = math.pi / 2
    nbar0: float = 0.074
    pulse: PulseParams = PulseParams()
    readout_pulse: PulseParams = PulseParams()
    n_max: int | None = None            # None -> automatic sizing from nbar0
    shots: int = 0                      # 0 -> noiseless sentinel
    seed: int = 2024
    readout_points: int = 30
    readout_span: float | None = None   # None -> 6 * t_op of the readout pulse
    gamma0: float = 0.0
    decay_alpha: float = 0.7
    n_fit: int | None = None            # None -> default_n_fit rule
    imperfections: Imperfections = Imperfections()

    def validate(self) -> None:
        if self.nbar0 < 0:
            raise ValueError(f"nbar0 must be >= 0, got {self.nbar0}")
        if self.shots < 0:
            raise ValueError(f"shots must be >= 0, got {self.shots}")
        if self.readout_points < 2:
            raise ValueError(f"readout_points must be >= 2, got {self.readout_points}")
        if self.readout_span is not None and self.readout_span <= 0:
            raise ValueError(f"readout_span must be > 0, got {self.readout_span}")
        if self.gamma0 < 0:
            raise ValueError(f"gamma0 must be >= 0, got {self.gamma0}")
        if self.n_fit is not None and self.n_fit < 1:
            raise ValueError(f"n_fit must be >= 1, got {self.n_fit}")
        if self.n_max is not None and self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        self.imperfections.validate()

    @property
    def effective_nbar0(self) -> float:
        """Reservoir occupation actually reached: cooling floor applies."""
        return max(self.nbar0, self.imperfections.cool_nbar)

    def truncation(self) -> FockTruncation:
        if self.n_max is not None:
            return FockTruncation(self.n_max)
        return FockTruncation.for_nbar(self.effective_nbar0)

    def readout_times(self) -> np.ndarray:
        span = self.readout_span
        if span is None:
            span = 6.0 * self.readout_pulse.t_op
        return np.linspace(0.0, span, self.readout_points)


@dataclass(frozen=True)
class SweepRow:
    """One point of a sweep (or a single readout run) in output order."""

    variable: str                   # "temperature" or "theta_c"
    value: float
    nbar0: float
    temperature: float | None
    lhs: float | None
    rhs: float | None
    delta_s: float
    mutual_info: float
    relative_entropy: float | None
    residual: float | None
    exact_mean_phonon: float
    fitted_mean_phonon: float | None = None
    exact_mean_phonon_pre: float | None = None
    fitted_mean_phonon_pre: float | None = None
    delta_q_estimate: float | None = None
    readout_model_error: float | None = None
    fit_converged: bool | None = None


def run_erasure(config: ExperimentConfig) -> tuple[LandauerLedger, JointState, JointState]:
    """Execute one erasure and evaluate its ledger.

    Returns (ledger, initial joint state, final joint state); the initial
    state is the post-dephasing, pre-pulse product state.
    """
    config.validate()
    trunc = config.truncation()
    nbar = config.effective_nbar0

    fidelity = config.imperfections.init_fidelity
    qubit0 = np.diag([fidelity, 1.0 - fidelity]).astype(complex)
    u_c = carrier_rotation(config.theta_c)
    qubit = u_c @ qubit0 @ u_c.conj().T

    joint = JointState(
        DensityMatrix(kron(qubit, thermal_state(nbar, trunc).matrix)), trunc.n_max
    )
    initial = dephase_qubit(joint)

    u_red = jc_block_unitary("red", config.pulse, trunc)
    final = evolve(initial, u_red)
    return landauer_ledger(initial, final, nbar), initial, final


def _ledger_row(variable: str, value: float, config: ExperimentConfig) -> SweepRow:
    ledger, _, _ = run_erasure(config)
    return SweepRow(
        variable=variable,
        value=value,
        nbar0=config.effective_nbar0,
        temperature=ledger.temperature,
        lhs=ledger.lhs,
        rhs=ledger.rhs,
        delta_s=ledger.delta_s,
        mutual_info=ledger.mutual_info,
        relative_entropy=ledger.relative_entropy,
        residual=ledger.residual,
        exact_mean_phonon=ledger.e_final,
    )


def sweep_temperature(config: ExperimentConfig, nbar_list) -> list[SweepRow]:
    """Equality test across reservoir temperatures: one row per nbar0 at
    theta_c = pi/2 and a pi-pulse erasure."""
    rows = []
    for nbar in nbar_list:
        if nbar <= 0:
            raise ValueError(f"sweep nbar values must be > 0, got {nbar}")
        cfg = dataclasses.replace(
            config,
            nbar0=float(nbar),
            theta_c=math.pi / 2,
            pulse=config.pulse.with_duration(config.pulse.t_op),
        )
        rows.append(_ledger_row("temperature", temperature_from_nbar(cfg.effective_nbar0), cfg))
    return rows


def sweep_theta(config: ExperimentConfig, theta_list) -> list[SweepRow]:
    """Equality test across initial states: one row per theta_c at fixed
    nbar0 and a pi-pulse erasure."""
    rows = []
    for theta in theta_list:
        if not 0.0 <= theta <= math.pi:
            raise ValueError(f"theta values must lie in [0, pi], got {theta}")
        cfg = dataclasses.replace(
            config,
            theta_c=float(theta),
            pulse=config.pulse.with_duration(config.pulse.t_op),
        )
        rows.append(_ledger_row("theta_c", float(theta), cfg))
    return rows


def default_nbar_grid() -> np.ndarray:
    lo, hi, n = NBAR_GRID_DEFAULT
    return np.geomspace(lo, hi, n)


def default_theta_grid() -> np.ndarray:
    lo, hi, n = THETA_GRID_DEFAULT
    return np.linspace(lo, hi, n)


def find_entropy_zero_crossings(
    config: ExperimentConfig,
) -> tuple[float | None, float | None]:
    """Zero crossings of the system entropy decrease over theta_c.

    Bisects delta_s(theta_c) on [0, pi/2] and [pi/2, pi] to CROSSING_TOL_RAD.
    A bracket with no sign change reports that crossing as absent (None).
    """
    cfg0 = dataclasses.replace(
        config, pulse=config.pulse.with_duration(config.pulse.t_op)
    )

    def delta_s(theta: float) -> float:
        ledger, _, _ = run_erasure(dataclasses.replace(cfg0, theta_c=theta))
        return ledger.delta_s

    def bisect(lo: float, hi: float) -> float | None:
        f_lo, f_hi = delta_s(lo), delta_s(hi)
        if f_lo == 0.0 or f_hi == 0.0 or (f_lo > 0) == (f_hi > 0):
            return None
        while hi - lo > CROSSING_TOL_RAD:
            mid = (lo + hi) / 2.0
            f_mid = delta_s(mid)
            if f_mid == 0.0:
                return mid
            if (f_mid > 0) == (f_lo > 0):
                lo, f_lo = mid, f_mid
            else:
                hi, f_hi = mid, f_mid
        return (lo + hi) / 2.0

    return bisect(0.0, math.pi / 2.0), bisect(math.pi / 2.0, math.pi)


def simulated_readout_run(config: ExperimentConfig) -> SweepRow:
    """Full pipeline including the phonon readout.

    Runs the erasure, then probes the pre-erasure and post-erasure reservoir
    states with blue-sideband traces (readout preparation resets the qubit
    to |down> without disturbing the reservoir), optionally applies detection
    error and shot noise, and fits both traces on the probability simplex.
    Reports fitted vs exact mean phonon numbers, the heat estimate from the
    fits, and the worst-case deviation of the down-only readout model from
    the exact post-erasure trace (residual up population and correlations).
    """
    ledger, initial, final = run_erasure(config)
    trunc = FockTruncation(initial.n_max)
    times = config.readout_times()
    nbar = config.effective_nbar0
    eps = config.imperfections.detection_epsilon

    def probe(reservoir: DensityMatrix, n_fit: int, seed: int):
        down = np.zeros((2, 2), dtype=complex)
        down[0, 0] = 1.0
        joint = JointState(DensityMatrix(kron(down, reservoir.matrix)), trunc.n_max)
        trace = exact_trace(joint, config.readout_pulse, times)
        if eps > 0:
            trace = detection_flip(trace, eps)
        if config.shots > 0:
            trace = sample_shots(trace, config.shots, seed)
        return fit_phonon_populations(
            trace, config.readout_pulse, n_fit, config.gamma0, config.decay_alpha
        )

    n_fit_pre = config.n_fit if config.n_fit is not None else default_n_fit(nbar)
    n_fit_post = config.n_fit if config.n_fit is not None else default_n_fit(nbar + 1.0)

    rho_r_post = final.reduced_fock()
    fit_pre = probe(initial.reduced_fock(), n_fit_pre, config.seed)
    fit_post = probe(rho_r_post, n_fit_post, config.seed + 1)

    # How far the down-only incoherent model is from the exact readout of the
    # actual correlated post-erasure state.
    exact_post = exact_trace(final, config.readout_pulse, times)
    post_pops = rho_r_post.matrix.diagonal().real
    modeled = model_trace(
        post_pops / post_pops.sum(), config.readout_pulse, times,
        config.gamma0, config.decay_alpha,
    )
    model_error = float(np.max(np.abs(exact_post.p_down - modeled.p_down)))

    return SweepRow(
        variable="theta_c",
        value=config.theta_c,
        nbar0=nbar,
        temperature=ledger.temperature,
        lhs=ledger.lhs,
        rhs=ledger.rhs,
        delta_s=ledger.delta_s,
        mutual_info=ledger.mutual_info,
        relative_entropy=ledger.relative_entropy,
        residual=ledger.residual,
        exact_mean_phonon=ledger.e_final,
        fitted_mean_phonon=fit_post.mean_phonon,
        exact_mean_phonon_pre=ledger.e_initial,
        fitted_mean_phonon_pre=fit_pre.mean_phonon,
        delta_q_estimate=fit_post.mean_phonon - fit_pre.mean_phonon,
        readout_model_error=model_error,
        fit_converged=fit_pre.converged and fit_post.converged,
    )


# ---------------------------------------------------------------------------
# Delimited-text emission (plotting-tool-ready) with provenance headers.

SWEEP_COLUMNS = (
    "variable", "value", "nbar0", "temperature", "lhs", "rhs", "delta_s",
    "mutual_info", "relative_entropy", "residual", "exact_mean_phonon",
    "fitted_mean_phonon", "exact_mean_phonon_pre", "fitted_mean_phonon_pre",
    "delta_q_estimate", "readout_model_error", "fit_converged",
)


def config_digest(config: ExperimentConfig) -> str:
    """Short deterministic hash of the full configuration."""
    canonical = repr(config).encode("utf-8")
    return hashlib.sha256(canonical).hexdigest()[:12]


def provenance_line(command: str, config: ExperimentConfig) -> str:
    return f"# qlandauer {command} config={config_digest(config)} seed={config.seed}"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return repr(float(value))


def format_sweep_table(rows, provenance: str) -> str:
    lines = [provenance, ",".join(SWEEP_COLUMNS)]
    for row in rows:
        lines.append(",".join(_cell(getattr(row, col)) for col in SWEEP_COLUMNS))
    return "\n".join(lines) + "\n"


def parse_sweep_table(text: str) -> tuple[str, list[SweepRow]]:
    """Inverse of format_sweep_table (round-trip safe)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    provenance = ""
    while lines and lines[0].startswith("#"):
        provenance = lines.pop(0)
    if not lines or lines[0] != ",".join(SWEEP_COLUMNS):
        raise ValueError("missing or unexpected sweep table header")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        if len(cells) != len(SWEEP_COLUMNS):
            raise ValueError(f"row has {len(cells)} cells, expected {len(SWEEP_COLUMNS)}")
        kwargs = {}
        for col, cell in zip(SWEEP_COLUMNS, cells):
            if col == "variable":
                kwargs[col] = cell
            elif col == "fit_converged":
                kwargs[col] = None if cell == "" else bool(float(cell))
            else:
                kwargs[col] = None if cell == "" else float(cell)
        rows.append(SweepRow(**kwargs))
    return provenance, rows


def format_ledger_summary(ledger: LandauerLedger, config: ExperimentConfig,
                          provenance: str,
                          units: UnitSystem | None = None) -> str:
    """Self-describing structured-text summary of one run's ledger.

    With a UnitSystem the dimensionless Q0/T0 quantities are also shown in
    joules and microkelvin.
    """

    def fmt(value) -> str:
        return "divergent" if value is None else repr(float(value))

    lines = [
        provenance,
        f"theta_c = {config.theta_c!r}",
        f"nbar0 = {config.effective_nbar0!r}",
        f"pulse_duration_us = {config.pulse.duration!r}",
        f"eta = {config.pulse.eta!r}",
        f"omega_rad_per_us = {config.pulse.omega!r}",
        f"n_max = {config.truncation().n_max!r}",
        f"e_initial_q0 = {fmt(ledger.e_initial)}",
        f"e_final_q0 = {fmt(ledger.e_final)}",
        f"delta_q_q0 = {fmt(ledger.delta_q)}",
        f"temperature_t0 = {fmt(ledger.temperature)}",
        f"lhs = {fmt(ledger.lhs)}",
        f"delta_s_nats = {fmt(ledger.delta_s)}",
        f"mutual_info_nats = {fmt(ledger.mutual_info)}",
        f"relative_entropy_nats = {fmt(ledger.relative_entropy)}",
        f"rhs = {fmt(ledger.rhs)}",
        f"residual = {fmt(ledger.residual)}",
    ]
    if units is not None:
        lines.append(f"q0_joule = {units.q0_joule!r}")
        lines.append(f"t0_micro_kelvin = {units.t0_kelvin * 1e6!r}")
        temp_uk = None if ledger.temperature is None \
            else ledger.temperature * units.t0_kelvin * 1e6
        lines.append(f"temperature_micro_kelvin = {fmt(temp_uk)}")
        lines.append(f"delta_q_joule = {ledger.delta_q * units.q0_joule!r}")
    return "\n".join(lines) + "\n"
