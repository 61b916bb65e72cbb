import math
import pickle
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from weakdiscord.correlations import discord
from weakdiscord.qcore import StateError, partial_trace, purity, vn_entropy
from weakdiscord.states import (
    BellDiagonalParams,
    RandomStateSpec,
    bell_analytics,
    bell_diagonal,
    bell_eigenvalues,
    dqc1,
    haar_unitary,
    random_bell_params,
    random_mixed,
    random_pure,
    werner,
)
from weakdiscord.weak import coincidence_condition, weak_discord


def h2(x):
    return -sum(p * math.log2(p) for p in (x, 1 - x) if p > 0)


class TestBellDiagonal:
    def test_origin(self):
        rho = bell_diagonal(BellDiagonalParams(0, 0, 0))
        np.testing.assert_allclose(rho.mat, np.eye(4) / 4, atol=1e-16)

    def test_bell_state_vertex(self):
        p = BellDiagonalParams(1, -1, 1)
        np.testing.assert_allclose(sorted(bell_eigenvalues(p)), [0, 0, 0, 1], atol=1e-15)
        psi = np.array([1, 0, 0, 1]) / math.sqrt(2)
        np.testing.assert_allclose(bell_diagonal(p).mat, np.outer(psi, psi), atol=1e-15)

    def test_spectrum_matches_formula(self):
        for seed in range(50):
            p = random_bell_params(seed)
            got = np.sort(np.linalg.eigvalsh(bell_diagonal(p).mat))
            np.testing.assert_allclose(got, np.sort(bell_eigenvalues(p)), atol=1e-10)

    def test_rejects_nonpositive(self):
        with pytest.raises(StateError):
            BellDiagonalParams(1, 1, 1)

    def test_octahedron_always_valid(self):
        for seed in range(50):
            p = random_bell_params(seed, region="octahedron")
            assert sum(abs(c) for c in p.c) <= 1
            assert bell_eigenvalues(p).min() >= 0

    def test_marginals_maximally_mixed(self):
        rho = bell_diagonal(random_bell_params(3))
        assert vn_entropy(partial_trace(rho, "A")) == pytest.approx(1.0, abs=1e-12)
        assert vn_entropy(partial_trace(rho, "B")) == pytest.approx(1.0, abs=1e-12)


class TestBellAnalytics:
    def test_origin(self):
        assert bell_analytics(BellDiagonalParams(0, 0, 0))[:3] == pytest.approx((0, 0, 0), abs=1e-15)

    def test_bell_state(self):
        assert bell_analytics(BellDiagonalParams(1, -1, 1))[:3] == pytest.approx((2, 1, 1), abs=1e-15)

    def test_single_axis(self):
        an = bell_analytics(BellDiagonalParams(0.5, 0, 0))
        lam = [3 / 8, 3 / 8, 1 / 8, 1 / 8]
        i_expected = sum(x * math.log2(4 * x) for x in lam)
        j_expected = 0.5 * (1.5 * math.log2(1.5) + 0.5 * math.log2(0.5))
        assert an.mutual_info == pytest.approx(i_expected, abs=1e-14)
        assert an.max_J == pytest.approx(j_expected, abs=1e-14)
        assert an.axis == 0

    def test_tie_break(self):
        assert bell_analytics(BellDiagonalParams(0.2, -0.3, 0.3)).axis == 1

    def test_max_j_is_one_minus_binary_entropy(self):
        for seed in range(10):
            p = random_bell_params(seed)
            cs = max(abs(c) for c in p.c)
            assert bell_analytics(p).max_J == pytest.approx(1 - h2((1 + cs) / 2), abs=1e-13)

    def test_optimizer_agrees(self):
        for seed in range(100):
            p = random_bell_params(1000 + seed)
            assert discord(bell_diagonal(p)).discord == pytest.approx(bell_analytics(p).discord, abs=1e-6)


class TestWerner:
    def test_zero(self):
        np.testing.assert_allclose(werner(0).mat, np.eye(4) / 4, atol=1e-16)

    def test_boundary(self):
        w = np.linalg.eigvalsh(werner(1 / 3).mat)
        assert abs(w.min()) < 1e-12

    def test_negative_boundary(self):
        c = -1 / 3
        expected = sorted([(1 + c) / 4] * 3 + [(1 - 3 * c) / 4])
        np.testing.assert_allclose(np.linalg.eigvalsh(werner(c).mat), expected, atol=1e-12)

    def test_equals_bell_diagonal(self):
        assert np.array_equal(werner(0.2).mat, bell_diagonal(BellDiagonalParams(0.2, 0.2, 0.2)).mat)

    @pytest.mark.parametrize("c", [0.34, -0.5])
    def test_range(self, c):
        with pytest.raises(StateError, match=r"3\|c\|"):
            werner(c)


class TestHaar:
    def test_scalar(self):
        u = haar_unitary(1, 5)
        assert u.shape == (1, 1) and abs(abs(u[0, 0]) - 1) < 1e-12

    @pytest.mark.parametrize("dim", [2, 4, 16, 64])
    def test_unitary(self, dim):
        u = haar_unitary(dim, dim)
        assert np.max(np.abs(u.conj().T @ u - np.eye(dim))) < 1e-10

    def test_first_moment(self):
        # |U00|^2 is Uniform(0, 1) for Haar U(2): mean 1/2, variance 1/12
        n = 10_000
        vals = np.array([abs(haar_unitary(2, s)[0, 0]) ** 2 for s in range(n)])
        assert abs(vals.mean() - 0.5) < 3 * math.sqrt(1 / 12 / n)

    def test_seeded(self):
        assert np.array_equal(haar_unitary(4, 77), haar_unitary(4, 77))
        assert not np.array_equal(haar_unitary(4, 77), haar_unitary(4, 78))


class TestRandomStates:
    def test_rank_one_is_pure(self):
        for s in range(10):
            assert purity(random_mixed(RandomStateSpec(1, s))) == pytest.approx(1.0, abs=1e-12)

    def test_full_rank(self):
        for s in range(10):
            assert np.linalg.eigvalsh(random_mixed(RandomStateSpec(4, s)).mat).min() > 0

    @pytest.mark.parametrize("rank", [1, 2, 3, 4])
    def test_exact_rank(self, rank):
        for s in range(25):
            w = np.linalg.eigvalsh(random_mixed(RandomStateSpec(rank, 31 * s + rank)).mat)
            assert np.sum(w > 1e-10) == rank

    def test_bit_exact_across_threads(self):
        specs = [RandomStateSpec(1 + i % 4, 2**63 + i) for i in range(40)]
        serial = [pickle.dumps(random_mixed(s).mat) for s in specs]
        with ThreadPoolExecutor(4) as pool:
            threaded = [pickle.dumps(r.mat) for r in pool.map(random_mixed, specs)]
        assert serial == threaded

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            RandomStateSpec(5, 0)
        with pytest.raises(ValueError):
            RandomStateSpec(2, -1)

    def test_random_pure(self):
        for da, db in [(2, 2), (2, 3), (3, 5)]:
            rho = random_pure(da, db, da * db)
            assert purity(rho) == pytest.approx(1.0, abs=1e-12)

    def test_pure_discord_is_entanglement_entropy(self):
        for s in range(20):
            rho = random_pure(2, 2, 300 + s)
            w = np.linalg.eigvalsh(partial_trace(rho, "A").mat)
            ent = -sum(x * math.log2(x) for x in w if x > 0)
            assert discord(rho).discord == pytest.approx(ent, abs=1e-4)

    def test_pure_coincidence(self, rng):
        rho = random_pure(2, 2, 4)
        for _ in range(5):
            z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            assert coincidence_condition(rho, z + z.conj().T)


class TestDQC1:
    def test_identity_factorizes(self):
        rho = dqc1(np.eye(2))
        plus = np.full((2, 2), 0.5)
        np.testing.assert_allclose(rho.mat, np.kron(plus, np.eye(2) / 2), atol=1e-16)
        assert discord(rho).discord == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_square_proportional(self, n):
        rho = dqc1(haar_unitary(2**n, 40 + n))
        assert np.max(np.abs(rho.mat @ rho.mat - rho.mat / 2**n)) < 1e-10
        assert purity(rho) == pytest.approx(2.0**-n, abs=1e-10)
        np.testing.assert_allclose(partial_trace(rho, "B").mat, np.eye(2**n) / 2**n, atol=1e-10)

    def test_weak_discord_equals_discord(self):
        rho = dqc1(haar_unitary(4, 8))
        r = discord(rho)
        for a in (0.1, 0.5, 0.9):
            assert weak_discord(rho, a, r).weak_discord == pytest.approx(r.discord, abs=1e-12)

    def test_rejects_non_unitary(self):
        with pytest.raises(StateError, match="unitary"):
            dqc1(np.ones((2, 2)))

    def test_rejects_bad_size(self):
        with pytest.raises(StateError):
            dqc1(np.eye(3))
        with pytest.raises(StateError, match="exceeds"):
            dqc1(np.eye(2**7))
