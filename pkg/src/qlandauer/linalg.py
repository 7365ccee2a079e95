"""Dense complex linear algebra for small Hilbert spaces (dim <~ 200).

Everything here is a pure function of immutable inputs.  Density matrices
are validated on construction and frozen, so values can be shared freely
between threads or sweep workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Validation tolerances: elementwise Hermiticity, trace deviation, and the
# allowance for eigenvalues slightly negative from roundoff.
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
EIGENVALUE_FLOOR = -1e-10

# Eigenvalues at or below this are treated as exact zeros in logarithms
# (0 log 0 := 0 downstream).  Keeps entropies of nearly pure states finite.
LOG_EIGENVALUE_CUTOFF = 1e-14


def _as_complex_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square complex matrix, got shape {a.shape}")
    return a


def is_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    """Max-abs elementwise check of m against its conjugate transpose."""
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive-semidefinite, unit-trace complex matrix.

    The universal state carrier.  Construction validates all three
    invariants and freezes the underlying array.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_complex_matrix(self.matrix)
        if not is_hermitian(m, HERMITICITY_TOL):
            dev = np.max(np.abs(m - m.conj().T))
            raise ValueError(f"density matrix not Hermitian (max deviation {dev:.3e})")
        tr = m.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr:.12g} differs from 1 beyond {TRACE_TOL}")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < EIGENVALUE_FLOOR:
            raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Spectrum:
    """Hermitian eigendecomposition: ascending eigenvalues, orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; dimensions multiply."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(rho: DensityMatrix, dim_a: int, dim_b: int, keep: str) -> DensityMatrix:
    """Reduced state of one factor of a bipartite density matrix.

    ``keep`` selects the retained subsystem, "A" (first factor, dimension
    ``dim_a``) or "B" (second factor, dimension ``dim_b``).
    """
    if keep not in ("A", "B"):
        raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
    if dim_a < 1 or dim_b < 1 or rho.dim != dim_a * dim_b:
        raise ValueError(
            f"dimension mismatch: state dim {rho.dim} != dim_a*dim_b = {dim_a}*{dim_b}"
        )
    r = rho.matrix.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        reduced = np.einsum("ikjk->ij", r)
    else:
        reduced = np.einsum("kikj->ij", r)
    return DensityMatrix(reduced)


def hermitian_eig(h: np.ndarray, tol: float = 1e-10) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix (ascending eigenvalues)."""
    h = _as_complex_matrix(h)
    if not is_hermitian(h, tol):
        raise ValueError("hermitian_eig requires a Hermitian input")
    w, v = np.linalg.eigh(h)
    return Spectrum(eigenvalues=w, eigenvectors=v)


def expm_i_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i h t) for Hermitian h, via eigendecomposition.  Unitary result."""
    spectrum = hermitian_eig(h)
    phases = np.exp(-1j * spectrum.eigenvalues * t)
    v = spectrum.eigenvectors
    return (v * phases) @ v.conj().T


def entropy_log(rho: DensityMatrix) -> np.ndarray:
    """log(rho) on the support of rho (natural logarithm).

    Eigenvalues at or below ``LOG_EIGENVALUE_CUTOFF`` are treated as exact
    zeros and contribute nothing; with the 0 log 0 := 0 convention this is
    what entropy traces downstream require.
    """
    spectrum = hermitian_eig(rho.matrix)
    w = spectrum.eigenvalues
    logw = np.where(w > LOG_EIGENVALUE_CUTOFF, np.log(np.maximum(w, LOG_EIGENVALUE_CUTOFF)), 0.0)
    v = spectrum.eigenvectors
    return (v * logw) @ v.conj().T
