"""Information-thermodynamic functionals and the erasure-equality ledger.

Entropies are in nats (natural logarithm throughout).  Reservoir energies
are in units of Q0 = hbar*omega_z, temperatures in units of T0 = Q0/k_B,
which makes every ledger term dimensionless.

Two Hamiltonians share a symbol in common usage; here they are kept apart:
H_res = Q0 * n_hat generates the reservoir energy, while the red-sideband
interaction (ion module) drives the erasure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import LOG_EIGENVALUE_CUTOFF, DensityMatrix, hermitian_eig
from .ion import OMEGA_Z_DEFAULT, JointState

HBAR_JS = 1.054571817e-34
KB_J_PER_K = 1.380649e-23

# rho1 weight tolerated on a zero eigenvalue of rho2 before the relative
# entropy is declared divergent.
SUPPORT_TOL = 1e-12


class ZeroTemperatureError(ValueError):
    """Raised where a 1/T quantity is requested at nbar = 0."""


class SupportViolationError(ValueError):
    """Relative entropy diverges: rho1 has weight outside the support of rho2."""


@dataclass(frozen=True)
class UnitSystem:
    """Display conversions for the internal Q0/T0 unit normalization."""

    omega_z: float = OMEGA_Z_DEFAULT  # rad/us

    @property
    def q0_joule(self) -> float:
        return HBAR_JS * self.omega_z * 1e6  # rad/us -> rad/s

    @property
    def t0_kelvin(self) -> float:
        return self.q0_joule / KB_J_PER_K


@dataclass(frozen=True)
class LandauerLedger:
    """The four erasure-equality terms plus energies and the residual.

    Divergent entries (zero-temperature reservoir) are carried as None,
    never as floating-point infinities: temperature, lhs, relative_entropy,
    rhs and residual all flag together.
    """

    delta_q: float                      # E_f - E_0, units of Q0
    temperature: float | None           # units of T0
    lhs: float | None                   # delta_q / (k_B T), dimensionless
    delta_s: float                      # nats
    mutual_info: float                  # nats
    relative_entropy: float | None      # nats
    rhs: float | None                   # delta_s + mutual_info + relative_entropy
    residual: float | None              # lhs - rhs
    e_initial: float                    # units of Q0
    e_final: float                      # units of Q0

    @property
    def divergent(self) -> bool:
        return self.lhs is None


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """-sum(lam * ln lam) over eigenvalues above the zero cutoff, in nats."""
    w = np.linalg.eigvalsh(rho.matrix)
    w = w[w > LOG_EIGENVALUE_CUTOFF]
    return float(-np.sum(w * np.log(w)))


def mutual_information(rho: JointState) -> float:
    """S(rho_S) + S(rho_R) - S(rho_SR) of a joint qubit-reservoir state."""
    return (
        von_neumann_entropy(rho.reduced_qubit())
        + von_neumann_entropy(rho.reduced_fock())
        - von_neumann_entropy(rho.state)
    )


def relative_entropy(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """D(rho1 || rho2) = Tr[rho1 ln rho1] - Tr[rho1 ln rho2], in nats.

    Evaluated in the eigenbasis of each argument.  If rho2 has a zero
    eigenvalue (below the cutoff) carrying rho1 weight above SUPPORT_TOL,
    the divergence is reported as SupportViolationError rather than as an
    overflowing float.
    """
    if rho1.dim != rho2.dim:
        raise ValueError(f"dimension mismatch: {rho1.dim} vs {rho2.dim}")
    tr_rho1_log_rho1 = -von_neumann_entropy(rho1)

    spectrum_ref = hermitian_eig(rho2.matrix)
    weights = np.einsum(
        "ki,kl,li->i", spectrum_ref.eigenvectors.conj(), rho1.matrix, spectrum_ref.eigenvectors
    ).real
    on_support = spectrum_ref.eigenvalues > LOG_EIGENVALUE_CUTOFF
    off_weight = float(np.sum(weights[~on_support]))
    if off_weight > SUPPORT_TOL:
        raise SupportViolationError(
            f"rho1 carries weight {off_weight:.3e} outside the support of rho2"
        )
    tr_rho1_log_rho2 = float(
        np.sum(weights[on_support] * np.log(spectrum_ref.eigenvalues[on_support]))
    )
    return tr_rho1_log_rho1 - tr_rho1_log_rho2


def reservoir_energy(rho_r: DensityMatrix) -> float:
    """Mean phonon number sum(n <n|rho|n>), i.e. Tr[H_res rho] in Q0 units."""
    diag = rho_r.matrix.diagonal().real
    return float(np.dot(np.arange(rho_r.dim), diag))


def _thermal_log_weights(nbar: float, dim: int) -> np.ndarray:
    """ln p_n of the truncated renormalized Gibbs state, computed in log
    space so weights far below double-precision eigenvalue resolution keep
    exact logarithms (needed for the equality at very low nbar)."""
    n = np.arange(dim)
    log_w = n * (math.log(nbar) - math.log1p(nbar)) - math.log1p(nbar)
    peak = log_w.max()
    log_norm = peak + math.log(np.exp(log_w - peak).sum())
    return log_w - log_norm


def temperature_from_nbar(nbar: float) -> float:
    """T = T0 / ln(1 + 1/nbar), in units of T0.  Diverging 1/T at nbar = 0
    is signalled as ZeroTemperatureError so callers must branch."""
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    if nbar == 0:
        raise ZeroTemperatureError("nbar = 0 means zero temperature; 1/T diverges")
    return 1.0 / math.log1p(1.0 / nbar)


def landauer_ledger(initial: JointState, final: JointState, nbar0: float) -> LandauerLedger:
    """Evaluate every term of the erasure equality for one initial/final pair.

    ``initial`` must be a product of a qubit-diagonal state with the thermal
    reservoir at ``nbar0`` and ``final`` unitarily related to it; neither is
    checked, the residual certifies both.  At nbar0 = 0 the 1/T side and the
    relative entropy diverge together and are flagged as None.
    """
    if initial.n_max != final.n_max:
        raise ValueError("initial and final states live on different truncations")

    rho_s = initial.reduced_qubit()
    rho_r = initial.reduced_fock()
    rho_s_f = final.reduced_qubit()
    rho_r_f = final.reduced_fock()

    e_initial = reservoir_energy(rho_r)
    e_final = reservoir_energy(rho_r_f)
    delta_q = e_final - e_initial

    delta_s = von_neumann_entropy(rho_s) - von_neumann_entropy(rho_s_f)
    mutual = mutual_information(final)

    if nbar0 == 0:
        return LandauerLedger(
            delta_q=delta_q, temperature=None, lhs=None,
            delta_s=delta_s, mutual_info=mutual,
            relative_entropy=None, rhs=None, residual=None,
            e_initial=e_initial, e_final=e_final,
        )

    temperature = temperature_from_nbar(nbar0)
    lhs = delta_q / temperature
    # D(rho'_R || rho_R) against the Gibbs reference, with Tr[rho'_R ln rho_R]
    # taken from the analytic log weights: the reference is diagonal and
    # strictly positive, so only the diagonal of rho'_R enters and the term
    # stays exact even where weights underflow the eigenvalue log cutoff.
    log_ref = _thermal_log_weights(nbar0, initial.n_max + 1)
    cross_term = float(np.dot(rho_r_f.matrix.diagonal().real, log_ref))
    rel_ent = -von_neumann_entropy(rho_r_f) - cross_term
    rhs = delta_s + mutual + rel_ent
    return LandauerLedger(
        delta_q=delta_q, temperature=temperature, lhs=lhs,
        delta_s=delta_s, mutual_info=mutual,
        relative_entropy=rel_ent, rhs=rhs, residual=lhs - rhs,
        e_initial=e_initial, e_final=e_final,
    )
