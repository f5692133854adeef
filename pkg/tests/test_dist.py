import math

import numpy as np
import pytest

import oracles
from imab.dist import (
    ArmInstance,
    Pmf,
    alias_draw,
    binary_entropy,
    entropy,
    kl_bernoulli,
    make_spiked_pmf,
    sample,
    tv_distance,
    zeta,
)


class TestPmf:
    def test_valid(self):
        p = Pmf([0.2, 0.3, 0.5])
        assert p.alphabet_size == 3
        assert p.support_size == 3
        assert not p.probs.flags.writeable

    def test_zero_entries_allowed(self):
        p = Pmf([0.0, 1.0, 0.0])
        assert p.alphabet_size == 3
        assert p.support_size == 1

    @pytest.mark.parametrize("bad", [[0.5, 0.6], [-0.1, 1.1], [], [np.nan, 1.0], [0.5, 0.5 - 1e-9]])
    def test_rejects_invalid(self, bad):
        with pytest.raises(ValueError):
            Pmf(bad)

    def test_sum_tolerance(self):
        Pmf([0.5, 0.5 + 5e-13])
        with pytest.raises(ValueError):
            Pmf([0.5, 0.5 + 5e-12])

    def test_constructors(self):
        assert Pmf.bernoulli(0.25) == Pmf([0.75, 0.25])
        assert Pmf.point_mass(2, 4) == Pmf([0, 0, 1, 0])
        np.testing.assert_allclose(Pmf.uniform(4).probs, 0.25)

    def test_hashable(self):
        assert len({Pmf.bernoulli(0.25), Pmf([0.75, 0.25])}) == 1


class TestEntropy:
    TABLE = [
        (Pmf.bernoulli(0.25), 0.5623),
        (Pmf.bernoulli(0.01), 0.0560),
        (Pmf.bernoulli(0.1), 0.3251),
        (Pmf([0.125, 0.125, 0.75]), 0.7356),
        (Pmf([0.005, 0.005, 0.99]), 0.0629),
    ]

    @pytest.mark.parametrize("pmf, expected", TABLE)
    def test_tabulated(self, pmf, expected):
        assert abs(entropy(pmf) - expected) <= 5e-5

    def test_point_mass(self):
        assert entropy(Pmf.point_mass(3, 5)) == 0.0

    def test_uniform_max(self):
        for m in (2, 3, 17, 1000):
            assert entropy(Pmf.uniform(m)) == pytest.approx(math.log(m), abs=1e-12)

    def test_matches_oracle(self, rng):
        for _ in range(20):
            w = rng.random(rng.integers(2, 30))
            p = Pmf(w / math.fsum(w))
            assert entropy(p) == pytest.approx(oracles.entropy(p.probs), abs=1e-13)

    def test_permutation_invariant(self, rng):
        w = rng.random(12)
        p = w / w.sum()
        assert entropy(Pmf(p)) == pytest.approx(entropy(Pmf(rng.permutation(p))), abs=1e-14)


class TestBinaryEntropy:
    def test_values(self):
        assert binary_entropy(0.5) == pytest.approx(math.log(2), abs=1e-15)
        assert binary_entropy(0.0) == 0.0
        assert abs(binary_entropy(0.01) - 0.0560) <= 5e-5
        assert abs(binary_entropy(0.1) - 0.3251) <= 5e-5

    def test_symmetric_and_matches_entropy(self):
        for p in np.linspace(0, 1, 41):
            assert binary_entropy(p) == pytest.approx(binary_entropy(1 - p), abs=1e-15)
            assert binary_entropy(p) == pytest.approx(entropy(Pmf([1 - p, p])), abs=1e-15)

    @pytest.mark.parametrize("p", [-0.01, 1.01])
    def test_range(self, p):
        with pytest.raises(ValueError):
            binary_entropy(p)


class TestKl:
    def test_examples(self):
        assert kl_bernoulli(0.3, 0.3) == 0.0
        assert kl_bernoulli(0.5, 0.0) == math.inf
        assert kl_bernoulli(0.5, 1.0) == math.inf
        assert kl_bernoulli(0.01, 0.25) == pytest.approx(0.242667, abs=1e-5)

    def test_zero_convention(self):
        assert kl_bernoulli(0.0, 0.3) == pytest.approx(math.log(1 / 0.7), rel=1e-14)

    def test_grid_against_oracle(self):
        grid = np.linspace(0, 1, 21)
        for p in grid:
            for q in grid[1:-1]:
                d = kl_bernoulli(p, q)
                assert d >= 0.0
                assert (d == 0.0) == (p == q)
                assert d == pytest.approx(oracles.kl_bernoulli(p, q), rel=1e-12, abs=1e-15)

    def test_range(self):
        with pytest.raises(ValueError):
            kl_bernoulli(1.2, 0.5)


class TestZetaTv:
    def test_zeta(self):
        assert zeta(Pmf.uniform(3)) == pytest.approx(2 / 3, abs=1e-15)
        assert zeta(Pmf.point_mass(0, 4)) == 0.0

    def test_zeta_renyi(self, rng):
        w = rng.random(9)
        p = w / w.sum()
        h2 = -math.log(float(np.sum(p ** 2)))
        assert zeta(Pmf(p)) == pytest.approx(1 - math.exp(-h2), abs=1e-14)

    def test_tv(self):
        assert tv_distance(Pmf.bernoulli(0.25), Pmf.bernoulli(0.01)) == pytest.approx(0.48, abs=1e-15)
        assert tv_distance(Pmf.point_mass(0, 3), Pmf.point_mass(2, 3)) == 2.0
        p = Pmf([0.2, 0.8])
        assert tv_distance(p, p) == 0.0

    def test_tv_mismatch(self):
        with pytest.raises(ValueError):
            tv_distance(Pmf.uniform(2), Pmf.uniform(3))

    def test_tv_metric(self, rng):
        for _ in range(50):
            p, q, r = (Pmf(w / w.sum()) for w in rng.random((3, 6)))
            assert tv_distance(p, q) == pytest.approx(tv_distance(q, p), abs=1e-15)
            assert tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-15
            assert 0.0 <= tv_distance(p, q) <= 2.0


class TestSampling:
    def test_point_mass(self, rng):
        p = Pmf.point_mass(3, 5)
        assert all(sample(p, rng) == 3 for _ in range(200))

    def test_bernoulli_frequency(self):
        p = Pmf.bernoulli(0.25)
        prob, alias = p.alias_table
        u = np.random.default_rng(1).random(10 ** 6)
        ones = sum(alias_draw(prob, alias, x) for x in u[:200_000])
        # vectorized path for the remaining draws
        m = len(prob)
        j = np.minimum((u[200_000:] * m).astype(int), m - 1)
        frac = u[200_000:] * m - j
        rest = np.where(frac < prob[j], j, alias[j]).sum()
        assert abs((ones + rest) / 10 ** 6 - 0.25) <= 0.002

    def test_alias_exact(self, rng):
        w = rng.random(7)
        p = Pmf(w / w.sum())
        prob, alias = p.alias_table
        implied = np.zeros(7)
        for j in range(7):
            implied[j] += prob[j] / 7
            implied[alias[j]] += (1 - prob[j]) / 7
        np.testing.assert_allclose(implied, p.probs, atol=1e-15)

    def test_deterministic(self):
        p = Pmf.bernoulli(0.25)
        a = [sample(p, np.random.default_rng(5)) for _ in range(1)]
        r1, r2 = np.random.default_rng(9), np.random.default_rng(9)
        assert [sample(p, r1) for _ in range(5)] == [sample(p, r2) for _ in range(5)]
        assert a == [sample(p, np.random.default_rng(5))]


class TestSpiked:
    def test_setup7_arms(self, rng):
        p = make_spiked_pmf(10 ** 4, 5e-3, rng)
        assert p.probs[-1] == 0.995
        assert math.fsum(p.probs[:-1]) == pytest.approx(5e-3, rel=1e-12)
        assert zeta(p) <= 0.01
        q = make_spiked_pmf(10 ** 4, 1e-4, rng)
        assert zeta(q) <= 2e-4

    def test_two_symbols(self, rng):
        p = make_spiked_pmf(2, 0.1, rng)
        np.testing.assert_allclose(p.probs, [0.1, 0.9], atol=1e-15)

    @pytest.mark.parametrize("mass", [0.0, 1.0, -0.2])
    def test_rejects(self, rng, mass):
        with pytest.raises(ValueError):
            make_spiked_pmf(10, mass, rng)


class TestArmInstance:
    def test_cached(self):
        arm = ArmInstance(Pmf([0.125, 0.125, 0.75]))
        assert arm.entropy_nats == entropy(arm.pmf)
        assert arm.zeta == zeta(arm.pmf)
        assert arm.support_size == 3
        assert arm.alphabet_size == 3
