"""Weak values under post-selection and the resulting weak discord.

The post-selection operator interpolates between the state itself
(``alpha = 0``, no disturbance) and the identity (``alpha = 1``, ordinary
projective statistics)::

    P_f = (1 - alpha) rho + alpha * 1
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correlations import DiscordResult, QubitMeasurement, discord, mutual_information
from .qcore import PSD_TOL, DensityMatrix, StateError, expect, partial_trace, purity, tensor_product, vn_entropy

ORTHOGONAL_TOL = 1e-12
IMAG_TOL = 1e-9
COINCIDENCE_TOL = 1e-10
PROB_TOL = 1e-9
COND_LIMIT = 1e12


class TraceOrthogonalError(ValueError):
    """Post-selection has (numerically) zero overlap with the state."""


@dataclass(frozen=True)
class PostSelection:
    alpha: float
    pf: np.ndarray

    @property
    def complement(self) -> np.ndarray:
        return np.eye(self.pf.shape[0]) - self.pf


@dataclass(frozen=True)
class WeakObservable:
    """O = sum_k a_k Pi_k (x) 1_B for orthogonal projectors Pi_k on A."""

    projectors: tuple
    eigenvalues: tuple

    def __post_init__(self):
        d = len(self.projectors)
        if d != len(self.eigenvalues):
            raise ValueError("need one eigenvalue per projector")
        if len(set(self.eigenvalues)) != d:
            raise ValueError("eigenvalues must be pairwise distinct")
        projs = [np.asarray(p, dtype=complex) for p in self.projectors]
        if np.max(np.abs(sum(projs) - np.eye(d))) > 1e-12:
            raise ValueError("projectors do not sum to the identity")
        for j, pj in enumerate(projs):
            for k, pk in enumerate(projs):
                target = pk if j == k else 0.0
                if np.max(np.abs(pj @ pk - target)) > 1e-12:
                    raise ValueError("projectors are not mutually orthogonal idempotents")

    @classmethod
    def from_measurement(cls, m: QubitMeasurement) -> WeakObservable:
        return cls(m.projectors(), (1.0, -1.0))

    @classmethod
    def from_basis(cls, basis) -> WeakObservable:
        """Rank-1 projectors onto the columns of a unitary, eigenvalues 0..d-1."""
        basis = np.asarray(basis, dtype=complex)
        projs = tuple(np.outer(basis[:, k], basis[:, k].conj()) for k in range(basis.shape[1]))
        return cls(projs, tuple(float(k) for k in range(basis.shape[1])))

    def operator(self, dim_b: int, power: int = 1) -> np.ndarray:
        op = sum(a**power * p for a, p in zip(self.eigenvalues, self.projectors))
        return tensor_product(op, np.eye(dim_b))


@dataclass(frozen=True)
class WeakDiscordResult:
    weak_probs: tuple
    weak_discord: float
    coincides: bool
    prob_valid: bool
    weak_value: float
    discord: DiscordResult


def _check_alpha(alpha: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")


def make_post_selection(rho: DensityMatrix, alpha: float) -> PostSelection:
    _check_alpha(alpha)
    eye = np.eye(rho.dim)
    pf = (1.0 - alpha) * rho.mat + alpha * eye
    pf.setflags(write=False)
    for name, op in (("P_f", pf), ("complement", (1.0 - alpha) * (eye - rho.mat))):
        lmin = np.linalg.eigvalsh(op)[0]
        if lmin < -PSD_TOL:
            raise StateError(f"{name} is not positive semidefinite (eigenvalue {lmin:.3e})")
    return PostSelection(alpha, pf)


def weak_expect(o, rho: DensityMatrix, ps: PostSelection) -> float:
    """tr(P_f O rho) / tr(P_f rho)."""
    o = np.asarray(o, dtype=complex)
    if o.shape != rho.mat.shape:
        raise StateError(f"operator shape {o.shape} does not match state shape {rho.mat.shape}")
    den = np.trace(ps.pf @ rho.mat)
    if abs(den) <= ORTHOGONAL_TOL:
        raise TraceOrthogonalError(f"tr(P_f rho) = {abs(den):.3e}; trace-orthogonal post-selection")
    val = np.trace(ps.pf @ o @ rho.mat) / den
    if abs(val.imag) > IMAG_TOL:
        raise ValueError(f"weak value has imaginary part {val.imag:.3e}")
    return float(val.real)


def _qubit_operator(rho: DensityMatrix, m: QubitMeasurement) -> np.ndarray:
    return tensor_product(m.observable(), np.eye(rho.dim_b))


def qubit_weak_value(rho: DensityMatrix, m: QubitMeasurement, alpha: float) -> float:
    """Closed-form weak value of (Pi_+ - Pi_-) (x) 1 for the qubit post-selection."""
    _check_alpha(alpha)
    if rho.dim_a != 2:
        raise StateError(f"measured subsystem A must be a qubit, got dimA = {rho.dim_a}")
    o = _qubit_operator(rho, m)
    rho2 = rho.mat @ rho.mat
    o_rho2 = float(np.einsum("ij,ji->", o, rho2).real)
    beta = 1.0 - alpha
    return (beta * o_rho2 + alpha * expect(o, rho)) / (beta * purity(rho) + alpha)


def coincidence_condition(rho: DensityMatrix, o) -> bool:
    """Whether tr(O rho^2) = <O> tr(rho^2), which forces <O>_w = <O> for every alpha."""
    o = np.asarray(o, dtype=complex)
    if o.shape != rho.mat.shape:
        raise StateError(f"operator shape {o.shape} does not match state shape {rho.mat.shape}")
    lhs = float(np.einsum("ij,ji->", o, rho.mat @ rho.mat).real)
    return abs(lhs - expect(o, rho) * purity(rho)) <= COINCIDENCE_TOL


def weak_probabilities(rho: DensityMatrix, wo: WeakObservable, ps: PostSelection):
    """Weak outcome probabilities from the weak moments <O^n>_w, n = 0..d_A-1.

    Returns ``(probs, valid)``; ``valid`` is false when any probability falls
    outside [0, 1] by more than 1e-9. Values are never clipped.
    """
    d = len(wo.eigenvalues)
    if d != rho.dim_a:
        raise StateError(f"observable acts on dimension {d}, subsystem A has {rho.dim_a}")
    if d == 2 and tuple(wo.eigenvalues) == (1.0, -1.0):
        ow = weak_expect(wo.operator(rho.dim_b), rho, ps)
        probs = np.array([0.5 * (1.0 + ow), 0.5 * (1.0 - ow)])
    else:
        a = np.array(wo.eigenvalues, dtype=float)
        vander = np.vander(a, d, increasing=True).T
        cond = np.linalg.cond(vander)
        if not np.isfinite(cond) or cond > COND_LIMIT:
            raise np.linalg.LinAlgError(f"moment system is ill-conditioned (cond = {cond:.3e})")
        moments = np.array([weak_expect(wo.operator(rho.dim_b, n), rho, ps) for n in range(d)])
        probs = np.linalg.solve(vander, moments)
    valid = bool(np.all(probs >= -PROB_TOL) and np.all(probs <= 1.0 + PROB_TOL))
    return probs, valid


def weak_discord(rho: DensityMatrix, alpha: float, result: DiscordResult | None = None) -> WeakDiscordResult:
    """Weak discord in the basis that maximizes J for ordinary discord.

    Only the outcome probabilities are replaced by their weak estimates;
    the conditioned entropies of B are those of the projective measurement.
    Pass ``result`` to reuse an already optimized basis.
    """
    _check_alpha(alpha)
    if result is None:
        result = discord(rho)
    m = result.optimal
    ow = qubit_weak_value(rho, m, alpha)
    probs = (0.5 * (1.0 + ow), 0.5 * (1.0 - ow))
    coincides = coincidence_condition(rho, _qubit_operator(rho, m))
    # S(A) - S(AB) + sum_k p_k^w S_k, written relative to D = S(A) - S(AB) + sum_k p_k S_k
    shift = sum((pw - p) * s for pw, p, s in zip(probs, result.probs, result.cond_entropies))
    return WeakDiscordResult(probs, result.discord + shift, coincides, True, ow, result)


def weak_discord_from_moments(rho: DensityMatrix, alpha: float, result: DiscordResult | None = None) -> float:
    """Weak discord evaluated literally through the moment inversion.

    Independent of the qubit closed form used by :func:`weak_discord`.
    """
    if result is None:
        result = discord(rho)
    ps = make_post_selection(rho, alpha)
    probs, valid = weak_probabilities(rho, WeakObservable.from_measurement(result.optimal), ps)
    if not valid:
        raise ValueError("weak probabilities fall outside [0, 1]; weak discord undefined")
    s_a = vn_entropy(partial_trace(rho, "A"))
    return s_a - vn_entropy(rho) + float(np.dot(probs, result.cond_entropies))


def post_measurement_state(rho: DensityMatrix, alpha: float) -> DensityMatrix:
    ps = make_post_selection(rho, alpha)
    out = ps.pf @ rho.mat @ ps.pf.conj().T
    norm = np.trace(out).real
    if norm <= ORTHOGONAL_TOL:
        raise TraceOrthogonalError(f"tr(P_f rho P_f^dag) = {norm:.3e}")
    out = out / norm
    return DensityMatrix(0.5 * (out + out.conj().T), rho.dim_a, rho.dim_b)


def alternative_weak_discord(rho: DensityMatrix, alpha: float) -> float:
    """I(A:B) - [S(rho_B) - S(rho'_B)] with rho' the post-selected joint state.

    Not the default notion of weak discord; it ignores which outcome on A
    was inferred and tracks only the disturbance.
    """
    post = post_measurement_state(rho, alpha)
    s_b = vn_entropy(partial_trace(rho, "B"))
    s_b_post = vn_entropy(partial_trace(post, "B"))
    return mutual_information(rho) - (s_b - s_b_post)


def disturbance_probability(rho: DensityMatrix, alpha: float) -> float:
    """Probability tr(P_f rho P_f^dag) that the post-selection succeeds."""
    ps = make_post_selection(rho, alpha)
    return float(np.trace(ps.pf @ rho.mat @ ps.pf.conj().T).real)
