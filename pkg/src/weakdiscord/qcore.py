"""Dense linear algebra and entropy primitives for bipartite density matrices.

Matrices are plain complex ``numpy`` arrays. A :class:`DensityMatrix` wraps
one together with its bipartition ``(dim_a, dim_b)``; subsystem A is always
the first tensor factor.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-8
MAX_DIM = 128

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class StateError(ValueError):
    """Raised when a matrix violates a density-matrix invariant."""


class Spectrum(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator on A (x) B.

    Construction validates every invariant and raises :class:`StateError`
    naming the violated tolerance.
    """

    mat: np.ndarray
    dim_a: int
    dim_b: int

    def __post_init__(self):
        mat = _frozen(self.mat)
        object.__setattr__(self, "mat", mat)
        if self.dim_a < 1 or self.dim_b < 1:
            raise StateError(f"subsystem dimensions must be positive, got ({self.dim_a}, {self.dim_b})")
        dim = self.dim_a * self.dim_b
        if mat.ndim != 2 or mat.shape != (dim, dim):
            raise StateError(
                f"matrix shape {mat.shape} does not match dimA*dimB = {self.dim_a}*{self.dim_b}"
            )
        if dim > MAX_DIM:
            raise StateError(f"dimension {dim} exceeds the supported maximum {MAX_DIM}")
        herm = np.max(np.abs(mat - mat.conj().T))
        if herm > HERMITIAN_TOL:
            raise StateError(f"not Hermitian: max|rho - rho^dag| = {herm:.3e} > {HERMITIAN_TOL:g}")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise StateError(f"trace {tr:.15g} differs from 1 by more than {TRACE_TOL:g}")
        lmin = np.linalg.eigvalsh(mat)[0]
        if lmin < -PSD_TOL:
            raise StateError(f"not positive semidefinite: smallest eigenvalue {lmin:.3e} < -{PSD_TOL:g}")

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    @classmethod
    def from_ket(cls, psi, dim_a: int, dim_b: int) -> DensityMatrix:
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), dim_a, dim_b)


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product; block ``(i, j)`` of the result is ``a[i, j] * b``."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(rho: DensityMatrix, keep: str) -> DensityMatrix:
    """Reduced state on subsystem ``keep`` ('A' or 'B')."""
    if rho.mat.shape != (rho.dim, rho.dim):
        raise StateError("matrix dimension does not match dimA*dimB")
    t = rho.mat.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    if keep == "A":
        return DensityMatrix(np.einsum("ijkj->ik", t), rho.dim_a, 1)
    if keep == "B":
        return DensityMatrix(np.einsum("ijik->jk", t), 1, rho.dim_b)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def eigh(m) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    herm = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if herm > HERMITIAN_TOL:
        raise ValueError(f"matrix is not Hermitian (max deviation {herm:.3e})")
    w, v = np.linalg.eigh(m)
    return Spectrum(w[::-1].copy(), v[:, ::-1].copy())


def entropy_of_spectrum(eigenvalues) -> float:
    """Shannon entropy in bits of a (near-)probability vector.

    Entries in ``[-PSD_TOL, 0)`` are treated as zero.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size and lam.min() < -PSD_TOL:
        raise StateError(f"eigenvalue {lam.min():.3e} below -{PSD_TOL:g}")
    lam = lam[lam > 0]
    return max(0.0, float(-np.sum(lam * np.log2(lam))))


def vn_entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy in bits."""
    return entropy_of_spectrum(np.linalg.eigvalsh(rho.mat))


def purity(rho: DensityMatrix) -> float:
    # tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(rho.mat) ** 2))


def expect(o, rho: DensityMatrix) -> float:
    """tr(O rho) for Hermitian ``o``; the imaginary residue is dropped."""
    o = np.asarray(o, dtype=complex)
    if o.shape != rho.mat.shape:
        raise StateError(f"operator shape {o.shape} does not match state shape {rho.mat.shape}")
    # tr(O rho) = sum_ij O_ij rho_ji
    return float(np.einsum("ij,ji->", o, rho.mat).real)


def load_density_matrix(path) -> DensityMatrix:
    """Read ``{"dimA", "dimB", "re", "im"}`` JSON and validate it."""
    with open(path) as fh:
        doc = json.load(fh)
    return density_matrix_from_dict(doc)


def density_matrix_from_dict(doc: dict) -> DensityMatrix:
    try:
        dim_a, dim_b = int(doc["dimA"]), int(doc["dimB"])
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise StateError(f"malformed density-matrix document: {exc}") from exc
    if re.shape != im.shape:
        raise StateError(f"'re' shape {re.shape} and 'im' shape {im.shape} differ")
    return DensityMatrix(re + 1j * im, dim_a, dim_b)


def density_matrix_to_dict(rho: DensityMatrix) -> dict:
    return {
        "dimA": rho.dim_a,
        "dimB": rho.dim_b,
        "re": rho.mat.real.tolist(),
        "im": rho.mat.imag.tolist(),
    }


def save_density_matrix(rho: DensityMatrix, path) -> None:
    with open(path, "w") as fh:
        json.dump(density_matrix_to_dict(rho), fh, indent=1)
        fh.write("\n")
