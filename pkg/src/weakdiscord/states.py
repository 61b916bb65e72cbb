"""State families: Bell-diagonal, Werner, Haar-random mixed/pure and DQC1."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import entr

from .qcore import PAULIS, DensityMatrix, StateError, tensor_product

SIMPLEX_TOL = 1e-12
UNITARY_TOL = 1e-10
MAX_DQC1_QUBITS = 6
DIAGONAL_DISTRIBUTION = "iid Uniform(0,1), normalized to unit trace"


@dataclass(frozen=True)
class BellDiagonalParams:
    """Correlation coefficients of a Bell-diagonal state.

    Any triple with |c1|+|c2|+|c3| <= 1 is accepted; so is every other triple
    whose Bell-basis eigenvalues are nonnegative (the tetrahedron spanned by
    the four Bell states, e.g. (1, -1, 1)).
    """

    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        lam = bell_eigenvalues(self)
        if lam.min() < -SIMPLEX_TOL:
            raise StateError(f"c = {self.c} gives Bell-basis eigenvalue {lam.min():.3e} < 0")

    @property
    def c(self) -> tuple[float, float, float]:
        return (self.c1, self.c2, self.c3)


@dataclass(frozen=True)
class RandomStateSpec:
    rank: int
    seed: int

    def __post_init__(self):
        if self.rank not in (1, 2, 3, 4):
            raise ValueError(f"rank must be in 1..4, got {self.rank}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


class BellAnalytics(NamedTuple):
    mutual_info: float
    max_J: float
    discord: float
    axis: int


def bell_diagonal(p: BellDiagonalParams) -> DensityMatrix:
    mat = np.eye(4, dtype=complex)
    for c, s in zip(p.c, PAULIS):
        mat = mat + c * tensor_product(s, s)
    return DensityMatrix(mat / 4, 2, 2)


def bell_eigenvalues(p: BellDiagonalParams) -> np.ndarray:
    """Eigenvalues lambda_ab, ordered (a, b) = 00, 01, 10, 11."""
    c1, c2, c3 = p.c
    out = []
    for a in (0, 1):
        for b in (0, 1):
            out.append(0.25 * (1 + (-1) ** a * c1 - (-1) ** (a + b) * c2 + (-1) ** b * c3))
    return np.array(out)


def bell_analytics(p: BellDiagonalParams) -> BellAnalytics:
    """Closed-form mutual information, max J and discord.

    ``axis`` is the index (0-based) of the largest |c_j|, first one on ties.
    """
    lam = bell_eigenvalues(p)
    lam = np.where(lam < 0, 0.0, lam)
    # I = sum lam log2(4 lam) = 2 - H(lam)
    mi = 2.0 - float(entr(lam).sum()) / math.log(2)
    absc = [abs(c) for c in p.c]
    axis = absc.index(max(absc))
    cs = absc[axis]
    # (1+c)log2(1+c)/2 + (1-c)log2(1-c)/2 = 1 - H((1+c)/2, (1-c)/2)
    half = np.array([(1 + cs) / 2, (1 - cs) / 2])
    max_j = 1.0 - float(entr(half).sum()) / math.log(2)
    return BellAnalytics(mi, max_j, mi - max_j, axis)


def werner(c: float) -> DensityMatrix:
    if 3 * abs(c) > 1.0 + SIMPLEX_TOL:
        raise StateError(f"Werner parameter c = {c} violates 3|c| <= 1")
    return bell_diagonal(BellDiagonalParams(c, c, c))


def _haar(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_unitary(dim: int, seed: int) -> np.ndarray:
    """Haar-distributed unitary from the QR decomposition of a Ginibre matrix."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return _haar(dim, np.random.default_rng(seed))


def random_mixed(spec: RandomStateSpec) -> DensityMatrix:
    """Two-qubit state of exact rank: random diagonal spectrum rotated by a Haar unitary."""
    rng = np.random.default_rng(spec.seed)
    w = rng.uniform(size=spec.rank)
    diag = np.zeros(4)
    diag[: spec.rank] = w / w.sum()
    u = _haar(4, rng)
    mat = (u * diag) @ u.conj().T
    mat = 0.5 * (mat + mat.conj().T)
    return DensityMatrix(mat, 2, 2)


def random_pure(dim_a: int, dim_b: int, seed: int) -> DensityMatrix:
    if dim_a < 1 or dim_b < 1:
        raise ValueError("dimensions must be >= 1")
    rng = np.random.default_rng(seed)
    d = dim_a * dim_b
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return DensityMatrix.from_ket(psi, dim_a, dim_b)


def random_bell_params(seed: int, region: str = "positive") -> BellDiagonalParams:
    """Uniformly distributed valid triple.

    ``region="positive"`` samples all Bell-diagonal states (flat Dirichlet
    spectrum, which is uniform on the tetrahedron of valid c);
    ``region="octahedron"`` restricts to |c1|+|c2|+|c3| <= 1.
    """
    rng = np.random.default_rng(seed)
    if region == "positive":
        lam = rng.dirichlet(np.ones(4))
        # invert lambda_ab = 1/4 [1 + (-1)^a c1 - (-1)^(a+b) c2 + (-1)^b c3], order 00, 01, 10, 11
        c1 = lam[0] + lam[1] - lam[2] - lam[3]
        c2 = -lam[0] + lam[1] + lam[2] - lam[3]
        c3 = lam[0] - lam[1] + lam[2] - lam[3]
        return BellDiagonalParams(float(c1), float(c2), float(c3))
    if region != "octahedron":
        raise ValueError(f"unknown region {region!r}")
    while True:
        c = rng.uniform(-1.0, 1.0, size=3)
        if np.abs(c).sum() <= 1.0:
            return BellDiagonalParams(*map(float, c))


def dqc1(u) -> DensityMatrix:
    """State of the clean qubit (A) and n-qubit register (B) after the controlled-U."""
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    if u.shape != (d, d) or d < 2 or d & (d - 1):
        raise StateError(f"unitary must be square with power-of-two dimension, got shape {u.shape}")
    n = d.bit_length() - 1
    if n > MAX_DQC1_QUBITS:
        raise StateError(f"register of {n} qubits exceeds the supported {MAX_DQC1_QUBITS}")
    dev = np.max(np.abs(u.conj().T @ u - np.eye(d)))
    if dev > UNITARY_TOL:
        raise StateError(f"input is not unitary: max|U^dag U - 1| = {dev:.3e}")
    eye = np.eye(d)
    mat = np.block([[eye, u.conj().T], [u, eye]]) / (2 * d)
    return DensityMatrix(mat, 2, d)
