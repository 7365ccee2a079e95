"""Simulated measurement chain for the phonon-number probe.

A blue-sideband pulse of variable length maps phonon populations onto the
qubit excitation probability; the populations are then recovered from the
time trace by least squares over the probability simplex, with the sideband
frequencies eta*Omega*sqrt(n+1) held fixed (calibrated, not fitted).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ion import FockTruncation, JointState, PulseParams, jc_block_unitary

FIT_MAX_ITERATIONS = 100_000
FIT_OBJECTIVE_TOL = 1e-14

TRACE_HEADER = "time_us,p_down,shots"


@dataclass(frozen=True)
class RabiTrace:
    """Excitation-probability record: strictly increasing times (us), the
    qubit-down probabilities, shot count per point (0 = noiseless), seed."""

    times: np.ndarray
    p_down: np.ndarray
    shots_per_point: int = 0
    seed: int | None = None

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        p = np.array(self.p_down, dtype=float)
        if t.ndim != 1 or p.shape != t.shape:
            raise ValueError("times and p_down must be 1-d arrays of equal length")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        if np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
            raise ValueError("p_down entries must lie in [0, 1]")
        t.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "p_down", p)

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class PhononFit:
    """Recovered phonon distribution and its first moment."""

    populations: np.ndarray     # p_0 .. p_{n_fit}, on the simplex
    n_fit: int
    mean_phonon: float
    residual_norm: float        # RMS of model - data
    decay_gamma0: float
    decay_alpha: float
    converged: bool = True

    def __post_init__(self):
        pops = np.array(self.populations, dtype=float)
        pops.flags.writeable = False
        object.__setattr__(self, "populations", pops)


def default_n_fit(nbar_expected: float) -> int:
    """Fit cutoff heuristic: max(8, ceil(5 * expected mean occupation))."""
    return max(8, math.ceil(5.0 * nbar_expected))


def exact_trace(rho: JointState, p: PulseParams, times) -> RabiTrace:
    """Noiseless qubit-down population under the blue sideband, per time.

    Honors whatever the joint state contains: residual up population and
    qubit-reservoir correlations all enter the trace.
    """
    times = np.asarray(times, dtype=float)
    trunc = FockTruncation(rho.n_max)
    d = trunc.dim
    m = rho.state.matrix
    values = np.empty(len(times))
    for i, t in enumerate(times):
        u = jc_block_unitary("blue", p.with_duration(float(t)), trunc)
        down_rows = u[:d]
        values[i] = np.einsum("ij,jk,ik->", down_rows, m, down_rows.conj()).real
    return RabiTrace(times=times, p_down=np.clip(values, 0.0, 1.0))


def model_trace(populations, p: PulseParams, times, gamma0: float = 0.0,
                alpha: float = 0.7) -> RabiTrace:
    """Incoherent-sum model trace for a qubit starting in |down>:

        p_down(t) = sum_n p_n [1 + cos(eta*Omega*sqrt(n+1) t) e^{-gamma_n t}] / 2

    with per-level decay gamma_n = gamma0 * (n+1)^alpha.
    """
    pops = np.asarray(populations, dtype=float)
    if np.any(pops < -1e-12) or abs(pops.sum() - 1.0) > 1e-9:
        raise ValueError("populations must be a probability vector")
    times = np.asarray(times, dtype=float)
    a = _design_matrix(len(pops) - 1, p, times, gamma0, alpha)
    return RabiTrace(times=times, p_down=np.clip(a @ pops, 0.0, 1.0))


def sample_shots(trace: RabiTrace, shots: int, seed: int) -> RabiTrace:
    """Replace each point by a binomial draw divided by the shot count."""
    if trace.shots_per_point != 0:
        raise ValueError("sample_shots expects a noiseless input trace")
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    counts = rng.binomial(shots, trace.p_down)
    return RabiTrace(times=trace.times, p_down=counts / shots,
                     shots_per_point=shots, seed=seed)


def detection_flip(trace: RabiTrace, epsilon: float) -> RabiTrace:
    """Symmetric misclassification: p -> (1 - eps) p + eps (1 - p)."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    p = (1.0 - epsilon) * trace.p_down + epsilon * (1.0 - trace.p_down)
    return RabiTrace(times=trace.times, p_down=p,
                     shots_per_point=trace.shots_per_point, seed=trace.seed)


def fit_phonon_populations(trace: RabiTrace, p: PulseParams, n_fit: int,
                           gamma0: float = 0.0, alpha: float = 0.7) -> PhononFit:
    """Least-squares phonon populations over the probability simplex.

    Minimizes ||model(p_vec) - trace||_2 subject to p_n >= 0, sum p_n = 1,
    via accelerated projected gradient on the fixed cosine design matrix.
    The problem is a small convex QP, so the solver either converges (the
    objective stops improving by more than FIT_OBJECTIVE_TOL) or the result
    is flagged non-converged and carries the best iterate.
    """
    if n_fit < 1:
        raise ValueError(f"n_fit must be >= 1, got {n_fit}")
    if len(trace) < n_fit + 1:
        raise ValueError(
            f"trace has {len(trace)} points, fewer than n_fit + 1 = {n_fit + 1}"
        )
    a = _design_matrix(n_fit, p, trace.times, gamma0, alpha)
    pops, converged = _simplex_least_squares(a, trace.p_down)
    resid = a @ pops - trace.p_down
    return PhononFit(
        populations=pops,
        n_fit=n_fit,
        mean_phonon=float(np.dot(np.arange(n_fit + 1), pops)),
        residual_norm=float(np.sqrt(np.mean(resid**2))),
        decay_gamma0=gamma0,
        decay_alpha=alpha,
        converged=converged,
    )


def _design_matrix(n_fit: int, p: PulseParams, times: np.ndarray,
                   gamma0: float, alpha: float) -> np.ndarray:
    n = np.arange(n_fit + 1)
    freqs = p.eta * p.omega * np.sqrt(n + 1.0)
    gammas = gamma0 * (n + 1.0) ** alpha
    t = np.asarray(times, dtype=float)[:, None]
    return (1.0 + np.cos(freqs * t) * np.exp(-gammas * t)) / 2.0


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x : x >= 0, sum x = 1} (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, len(v) + 1)
    rho = k[u - css / k > 0][-1]
    theta = css[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


FIT_DISPLACEMENT_TOL = 1e-11


def _simplex_least_squares(a: np.ndarray, y: np.ndarray,
                           max_iter: int = FIT_MAX_ITERATIONS,
                           tol: float = FIT_OBJECTIVE_TOL) -> tuple[np.ndarray, bool]:
    """min 0.5 ||a x - y||^2 over the simplex, by projected gradient descent.

    Step 1/L with L the largest eigenvalue of a.T a makes every iteration a
    strict descent, so the objective-improvement criterion is sound; the
    displacement gate keeps nearly-flat directions iterating until the
    projected-gradient fixed point is reached to parameter accuracy far
    beyond the round-trip requirement.
    """
    ata = a.T @ a
    aty = a.T @ y
    step = 1.0 / float(np.linalg.eigvalsh(ata)[-1])

    def objective(x):
        r = a @ x - y
        return 0.5 * float(r @ r)

    x = np.full(a.shape[1], 1.0 / a.shape[1])
    f_x = objective(x)
    for _ in range(max_iter):
        x_new = project_to_simplex(x - step * (ata @ x - aty))
        f_new = objective(x_new)
        displacement = float(np.max(np.abs(x_new - x)))
        improvement = f_x - f_new
        x, f_x = x_new, f_new
        if improvement < tol and displacement < FIT_DISPLACEMENT_TOL:
            return x, True
    return x, False


def write_trace(trace: RabiTrace, path) -> None:
    """Write a trace as delimited text with the required header line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRACE_HEADER + "\n")
        for t, pd in zip(trace.times, trace.p_down):
            fh.write(f"{t:.17g},{pd:.17g},{trace.shots_per_point}\n")


def read_trace(path) -> RabiTrace:
    """Read a trace written by write_trace; the header line is mandatory."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != TRACE_HEADER:
            raise ValueError(f"expected header {TRACE_HEADER!r}, got {header!r}")
        times, p_down, shots = [], [], []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            t, pd, s = line.split(",")
            times.append(float(t))
            p_down.append(float(pd))
            shots.append(int(s))
    per_point = shots[0] if shots else 0
    if shots and any(s != per_point for s in shots):
        raise ValueError("inconsistent shot counts within one trace file")
    return RabiTrace(times=np.array(times), p_down=np.array(p_down),
                     shots_per_point=per_point)
