"""Entropic correlations, projective conditional entropy and discord.

Discord is optimized over projective qubit measurements on A, parametrized
by the Bloch angles of the measurement axis. The optimizer evaluates the
conditional entropy through the local/correlation decomposition of the
state; :func:`conditional_entropy` evaluates the same quantity through the
explicit post-measurement states and serves as the reference route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .qcore import PAULIS, DensityMatrix, StateError, expect, partial_trace, tensor_product, vn_entropy

GRID_THETA = 64
GRID_PHI = 128
N_STARTS = 5
J_TOL = 1e-10
ANGLE_TOL = 1e-7
TIE_TOL = 1e-12
ZERO_PROB = 1e-12
CLAMP_TOL = 1e-9


@dataclass(frozen=True)
class QubitMeasurement:
    """Projective measurement on a qubit along the Bloch axis (theta, phi)."""

    theta: float
    phi: float

    @property
    def axis(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    def observable(self) -> np.ndarray:
        """n.sigma, i.e. Pi_+ - Pi_-."""
        nx, ny, nz = self.axis
        return nx * PAULIS[0] + ny * PAULIS[1] + nz * PAULIS[2]

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        ns = self.observable()
        eye = np.eye(2, dtype=complex)
        return 0.5 * (eye + ns), 0.5 * (eye - ns)

    def canonical(self) -> QubitMeasurement:
        """Equivalent measurement with theta in [0, pi/2].

        Reflecting through the origin swaps the two outcomes but leaves the
        measurement (and J) unchanged.
        """
        theta = self.theta % (2 * math.pi)
        phi = self.phi
        if theta > math.pi:
            theta, phi = 2 * math.pi - theta, phi + math.pi
        if theta > math.pi / 2:
            theta, phi = math.pi - theta, phi + math.pi
        phi %= 2 * math.pi
        if theta < 1e-12:
            theta, phi = 0.0, 0.0
        elif abs(theta - math.pi / 2) < 1e-15 and phi >= math.pi:
            phi -= math.pi
        return QubitMeasurement(float(theta), float(phi))


@dataclass(frozen=True)
class DiscordResult:
    mutual_info: float
    max_J: float
    discord: float
    optimal: QubitMeasurement
    probs: tuple[float, float]
    cond_entropies: tuple[float, float]
    cond_entropy: float = field(default=0.0)


def _require_qubit_a(rho: DensityMatrix) -> None:
    if rho.dim_a != 2:
        raise StateError(f"measured subsystem A must be a qubit, got dimA = {rho.dim_a}")


def mutual_information(rho: DensityMatrix) -> float:
    s_a = vn_entropy(partial_trace(rho, "A"))
    s_b = vn_entropy(partial_trace(rho, "B"))
    return s_a + s_b - vn_entropy(rho)


def measurement_outcome(rho: DensityMatrix, m: QubitMeasurement, k: str):
    """Probability and conditioned state of B for outcome ``k`` ('+' or '-').

    Returns ``(prob, None)`` when the outcome has probability below 1e-12.
    """
    _require_qubit_a(rho)
    if k not in ("+", "-"):
        raise ValueError(f"outcome must be '+' or '-', got {k!r}")
    proj = m.projectors()[0 if k == "+" else 1]
    big = tensor_product(proj, np.eye(rho.dim_b))
    prob = expect(big, rho)
    if prob < ZERO_PROB:
        return prob, None
    post = big @ rho.mat @ big
    t = post.reshape(2, rho.dim_b, 2, rho.dim_b)
    cond = np.einsum("ijik->jk", t) / prob
    # reduce numerical asymmetry before validation
    cond = 0.5 * (cond + cond.conj().T)
    return prob, DensityMatrix(cond, 1, rho.dim_b)


def conditional_entropy(rho: DensityMatrix, m: QubitMeasurement) -> float:
    """S(B|A) for the projective measurement ``m`` on A."""
    total = 0.0
    for k in ("+", "-"):
        prob, cond = measurement_outcome(rho, m, k)
        if cond is not None:
            total += prob * vn_entropy(cond)
    return total


def classical_work(rho: DensityMatrix, m: QubitMeasurement) -> float:
    """Work (units of k_B T ln 2) a local demon measuring A along ``m`` extracts."""
    _require_qubit_a(rho)
    s_a = vn_entropy(partial_trace(rho, "A"))
    return math.log2(rho.dim) - s_a - conditional_entropy(rho, m)


def quantum_work(rho: DensityMatrix) -> float:
    """Work a demon with access to the joint system extracts."""
    return math.log2(rho.dim) - vn_entropy(rho)


def _plogp_sum(mu: float) -> float:
    return mu * math.log2(mu) if mu > 0.0 else 0.0


class _CondEntropyEvaluator:
    """Fast S(B|A) as a function of the measurement angles.

    For an axis n, the unnormalized conditioned states of B are
    (rho_B +/- sum_i n_i T_i) / 2 with T_i = tr_A[(sigma_i x 1) rho].
    A qubit B uses the closed-form 2x2 spectrum.
    """

    def __init__(self, rho: DensityMatrix):
        _require_qubit_a(rho)
        self.dim_b = rho.dim_b
        t = rho.mat.reshape(2, rho.dim_b, 2, rho.dim_b)
        self.rho_b = np.einsum("ijik->jk", t)
        self.t_ops = [np.einsum("ki,ijkl->jl", s, t) for s in PAULIS]
        if self.dim_b == 2:
            # Bloch data: rho = 1/4 [1 + a.s x 1 + 1 x b.s + sum T_ij s_i x s_j]
            self.a = np.array([np.trace(op).real for op in self.t_ops])
            self.b = np.array([np.trace(self.rho_b @ s).real for s in PAULIS])
            self.corr = np.array([[np.trace(op @ s).real for s in PAULIS] for op in self.t_ops])
            self._a = self.a.tolist()
            self._b = self.b.tolist()
            self._c = self.corr.tolist()

    def __call__(self, theta: float, phi: float) -> float:
        st = math.sin(theta)
        n = (st * math.cos(phi), st * math.sin(phi), math.cos(theta))
        if self.dim_b != 2:
            return float(self.grid(np.array([theta]), np.array([phi]))[0])
        a, b, c = self._a, self._b, self._c
        na = n[0] * a[0] + n[1] * a[1] + n[2] * a[2]
        total = 0.0
        for sgn in (1.0, -1.0):
            tr = 1.0 + sgn * na
            vx = b[0] + sgn * (n[0] * c[0][0] + n[1] * c[1][0] + n[2] * c[2][0])
            vy = b[1] + sgn * (n[0] * c[0][1] + n[1] * c[1][1] + n[2] * c[2][1])
            vz = b[2] + sgn * (n[0] * c[0][2] + n[1] * c[1][2] + n[2] * c[2][2])
            r = math.sqrt(vx * vx + vy * vy + vz * vz)
            p = 0.5 * tr
            total += p * math.log2(p) if p > 0.0 else 0.0
            total -= _plogp_sum(0.25 * (tr + r)) + _plogp_sum(0.25 * (tr - r))
        return total

    def grid(self, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
        """Vectorized evaluation over matching arrays of angles."""
        st = np.sin(theta)
        n = np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)
        total = np.zeros(theta.shape)
        if self.dim_b == 2:
            na = n @ self.a
            ct = n @ self.corr
            for sgn in (1.0, -1.0):
                tr = 1.0 + sgn * na
                r = np.linalg.norm(self.b + sgn * ct, axis=-1)
                mu = 0.25 * np.stack([tr + r, tr - r])
                p = 0.5 * tr
                total += _xlog2x(p) - _xlog2x(mu).sum(axis=0)
            return total
        nt = np.einsum("...i,ijk->...jk", n, np.array(self.t_ops))
        for sgn in (1.0, -1.0):
            mats = 0.5 * (self.rho_b + sgn * nt)
            mu = np.linalg.eigvalsh(mats)
            p = mu.sum(axis=-1)
            total += _xlog2x(p) - _xlog2x(mu).sum(axis=-1)
        return total


def _xlog2x(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    pos = x > 0.0
    return np.where(pos, x * np.log2(np.where(pos, x, 1.0)), 0.0)


def _best_by_tiebreak(cands):
    """Pick the max-J candidate; near-equal J resolved by smallest (theta, phi)."""
    best_j = max(j for j, _ in cands)
    tied = [m for j, m in cands if j >= best_j - TIE_TOL]
    return best_j, min(tied, key=lambda m: (m.theta, m.phi))


def optimize_measurement(rho: DensityMatrix, grid_theta: int = GRID_THETA, grid_phi: int = GRID_PHI,
                         n_starts: int = N_STARTS) -> QubitMeasurement:
    """Measurement on A minimizing S(B|A): coarse grid then Nelder-Mead polish."""
    cond = _CondEntropyEvaluator(rho)
    thetas = np.linspace(0.0, math.pi / 2, grid_theta)
    phis = np.arange(grid_phi) * (2 * math.pi / grid_phi)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    vals = cond.grid(tt.ravel(), pp.ravel())
    # ascending S(B|A), then theta, then phi
    order = np.lexsort((pp.ravel(), tt.ravel(), vals))[:n_starts]
    step_t = thetas[1] - thetas[0]
    step_p = phis[1] - phis[0]

    def f(x):
        return cond(x[0], x[1])

    cands = []
    for idx in order:
        x0 = np.array([tt.ravel()[idx], pp.ravel()[idx]])
        simplex = np.array([x0, x0 + [step_t, 0.0], x0 + [0.0, step_p]])
        res = minimize(f, x0, method="Nelder-Mead",
                       options={"xatol": ANGLE_TOL, "fatol": J_TOL, "initial_simplex": simplex,
                                "maxiter": 2000})
        if res.fun <= vals[idx]:
            m, val = QubitMeasurement(*res.x), res.fun
        else:
            m, val = QubitMeasurement(*x0), vals[idx]
        cands.append((-float(val), m.canonical()))
    return _best_by_tiebreak(cands)[1]


def discord(rho: DensityMatrix, measurement: QubitMeasurement | None = None) -> DiscordResult:
    """Projective-measurement discord with A as the measured qubit.

    ``measurement`` skips the optimization and evaluates at a fixed basis.
    """
    _require_qubit_a(rho)
    m = optimize_measurement(rho) if measurement is None else measurement
    s_b = vn_entropy(partial_trace(rho, "B"))
    mi = mutual_information(rho)
    ents = []
    for k in ("+", "-"):
        _, st = measurement_outcome(rho, m, k)
        ents.append(0.0 if st is None else vn_entropy(st))
    ev = expect(tensor_product(m.observable(), np.eye(rho.dim_b)), rho)
    probs = (0.5 * (1.0 + ev), 0.5 * (1.0 - ev))
    cond_s = probs[0] * ents[0] + probs[1] * ents[1]
    max_j = s_b - cond_s
    d = mi - max_j
    if -CLAMP_TOL <= d < 0.0:
        d = 0.0
    return DiscordResult(mi, max_j, d, m, probs, tuple(ents), cond_s)
