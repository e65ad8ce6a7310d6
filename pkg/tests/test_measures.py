import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entclass import measures, states
from entclass.measures import Bipartition, all_bipartitions
from entclass.states import ket_to_dm, random_mixed, random_pure, validate


def ket(n, terms):
    v = np.zeros(2 ** n, dtype=np.complex128)
    for bits, amp in terms.items():
        v[int(bits, 2)] = amp
    return v / np.linalg.norm(v)


BELL = ket(2, {"00": 1, "11": 1})
GHZ3 = ket(3, {"000": 1, "111": 1})
W3 = ket(3, {"001": 1, "010": 1, "100": 1})
GHZ4 = ket(4, {"0000": 1, "1111": 1})
W4 = ket(4, {"0001": 1, "0010": 1, "0100": 1, "1000": 1})
X4 = ket(4, {"0000": 1, "0111": 1, "1011": 1, "1101": 1, "1110": 1})
V4 = ket(4, {"1000": 1, "0100": 1, "0010": 1, "0001": 1, "1111": 1})


def werner(p):
    psi_minus = ket(2, {"01": 1, "10": -1})
    rho = p * np.outer(psi_minus, psi_minus.conj()) + (1 - p) * np.eye(4) / 4
    return validate(rho, 2)


class TestBipartitions:
    def test_counts(self):
        assert len(all_bipartitions(2)) == 1
        assert len(all_bipartitions(3)) == 3
        assert len(all_bipartitions(4)) == 7

    def test_zero_always_left(self):
        for n in (2, 3, 4):
            for p in all_bipartitions(n):
                assert 0 in p.left
                assert sorted(p.left + p.right) == list(range(n))

    def test_rejects_overlap(self):
        with pytest.raises(ValueError):
            Bipartition(left=(0, 1), right=(1, 2))

    def test_rejects_empty_side(self):
        with pytest.raises(ValueError):
            Bipartition(left=(), right=(0, 1))


class TestWootters:
    def test_bell_is_one(self):
        assert abs(measures.wootters_concurrence(ket_to_dm(BELL, 2)) - 1.0) < 1e-6

    def test_product_is_zero(self):
        assert measures.wootters_concurrence(ket_to_dm(ket(2, {"00": 1}), 2)) < 1e-6

    def test_werner_closed_form(self):
        for p in np.linspace(0, 1, 21):
            expected = max(0.0, (3 * p - 1) / 2)
            got = measures.wootters_concurrence(werner(p))
            assert abs(got - expected) < 1e-8, f"p={p}"

    def test_werner_monotone_above_threshold(self):
        vals = [measures.wootters_concurrence(werner(p)) for p in np.linspace(1 / 3, 1, 20)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_rejects_wrong_size(self):
        with pytest.raises(ValueError):
            measures.wootters_concurrence(ket_to_dm(GHZ3, 3))


class TestIConcurrence:
    def test_ghz3_one_vs_rest(self):
        dm = ket_to_dm(GHZ3, 3)
        p = Bipartition(left=(0,), right=(1, 2))
        assert abs(measures.i_concurrence(dm, p) - 1.0) < 1e-6

    def test_product_zero(self):
        dm = ket_to_dm(ket(2, {"10": 1}), 2)
        p = Bipartition(left=(0,), right=(1,))
        assert measures.i_concurrence(dm, p) < 1e-6

    def test_bell_equals_wootters_on_pure(self):
        dm = ket_to_dm(BELL, 2)
        p = Bipartition(left=(0,), right=(1,))
        assert abs(measures.i_concurrence(dm, p) - measures.wootters_concurrence(dm)) < 1e-9


class TestLowerBound:
    def test_matches_squared_i_concurrence_on_pure(self):
        rng = np.random.default_rng(0)
        for n in (2, 3, 4):
            for _ in range(25):
                dm = random_pure(n, rng)
                for p in all_bipartitions(n):
                    lb = measures.lb_concurrence_sq(dm, p)
                    ic2 = measures.i_concurrence(dm, p) ** 2
                    assert lb <= ic2 + 1e-6
                    assert abs(lb - ic2) < 1e-6

    def test_matches_squared_wootters_on_two_qubit_mixed(self):
        rng = np.random.default_rng(1)
        p = Bipartition(left=(0,), right=(1,))
        for _ in range(50):
            dm = random_mixed(2, rng)
            lb = measures.lb_concurrence_sq(dm, p)
            w2 = measures.wootters_concurrence(dm) ** 2
            assert abs(lb - w2) < 1e-8

    def test_zero_on_separable_mixtures(self):
        rng = np.random.default_rng(2)
        for n in (2, 3):
            for _ in range(10):
                dm = states.separable_sample(n, [[q] for q in range(n)], "mixed", rng)
                for p in all_bipartitions(n):
                    assert measures.lb_concurrence_sq(dm, p) < 1e-9


class TestTangleAnchors:
    def test_tau1_ghz3(self):
        assert abs(measures.tau1(ket_to_dm(GHZ3, 3)) - 1.0) < 1e-6

    def test_tau1_w3(self):
        assert abs(measures.tau1(ket_to_dm(W3, 3)) - 8 / 9) < 1e-6

    def test_tau2_w3(self):
        assert abs(measures.tau2(ket_to_dm(W3, 3)) - 4 / 9) < 1e-6

    def test_tau2_ghz3_zero(self):
        assert measures.tau2(ket_to_dm(GHZ3, 3)) < 1e-9

    def test_tau3_ghz3(self):
        assert abs(measures.tau3_pure(ket_to_dm(GHZ3, 3)) - 1.0) < 1e-6

    def test_tau3_w3_zero(self):
        assert measures.tau3_pure(ket_to_dm(W3, 3)) < 1e-6

    def test_tau4_w4_zero(self):
        assert measures.tau4_pure(ket_to_dm(W4, 4)) < 1e-6

    def test_tau4_ghz4_equals_tau1(self):
        dm = ket_to_dm(GHZ4, 4)
        assert abs(measures.tau4_pure(dm) - measures.tau1(dm)) < 1e-3

    def test_pairwise_ratio_w3(self):
        dm = ket_to_dm(W3, 3)
        assert abs(measures.tau1(dm) - 2 * measures.tau2(dm)) < 0.02 * measures.tau1(dm)

    def test_pairwise_ratio_w4(self):
        dm = ket_to_dm(W4, 4)
        assert abs(measures.tau1(dm) - 3 * measures.tau2(dm)) < 0.02 * measures.tau1(dm)

    def test_v4_regression(self):
        # 4-qubit W plus |1111>: pairwise structure dies under mixing but the
        # triple structure survives
        tv = measures.tangle_vector(ket_to_dm(V4, 4))
        assert abs(tv.tau1 - 0.96) < 1e-6
        assert tv.tau2 < 1e-9
        assert abs(tv.tau3 - 0.32) < 1e-2
        assert tv.tau4 < 1e-6

    def test_tau4_mixed_agrees_on_ghz4(self):
        dm = ket_to_dm(GHZ4, 4)
        assert abs(measures.tau4_mixed(dm) - 1.0) < 1e-6


class TestTangleVector:
    def test_fields_by_size(self):
        rng = np.random.default_rng(3)
        tv2 = measures.tangle_vector(random_pure(2, rng))
        assert tv2.tau3 is None and tv2.tau4 is None
        tv3 = measures.tangle_vector(random_pure(3, rng))
        assert tv3.tau3 is not None and tv3.tau4 is None
        tv4 = measures.tangle_vector(random_pure(4, rng))
        assert tv4.tau3 is not None and tv4.tau4 is not None

    @given(st.integers(0, 2 ** 31 - 1), st.integers(2, 4), st.booleans())
    @settings(max_examples=30, deadline=None)
    def test_ranges(self, seed, n, pure):
        rng = np.random.default_rng(seed)
        dm = random_pure(n, rng) if pure else random_mixed(n, rng)
        tv = measures.tangle_vector(dm)
        assert -1e-9 <= tv.tau1 <= 1 + 1e-9
        assert -1e-9 <= tv.tau2 <= 1 + 1e-9
        if tv.tau3 is not None:
            assert -1e-9 <= tv.tau3 <= 1 + 1e-9
        if tv.tau4 is not None:
            assert -1e-9 <= tv.tau4 <= 1 + 1e-9

    def test_epsilon_carried(self):
        rng = np.random.default_rng(4)
        tv = measures.tangle_vector(random_pure(2, rng), epsilon=0.05)
        assert tv.epsilon == 0.05


class TestLocalUnitaryInvariance:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_tangles_invariant(self, n):
        rng = np.random.default_rng(5)
        for _ in range(20):
            dm = random_pure(n, rng) if rng.random() < 0.5 else random_mixed(n, rng)
            u = states.random_local_unitary(n, rng)
            tv = measures.tangle_vector(dm)
            tv_u = measures.tangle_vector(states.apply_unitary(dm, u))
            assert abs(tv.tau1 - tv_u.tau1) < 2e-3
            assert abs(tv.tau2 - tv_u.tau2) < 2e-3
            if tv.tau3 is not None:
                assert abs(tv.tau3 - tv_u.tau3) < 2e-3
            if tv.tau4 is not None:
                assert abs(tv.tau4 - tv_u.tau4) < 2e-3


class TestPureOnlyGuards:
    def test_tau3_pure_rejects_mixed(self):
        rng = np.random.default_rng(6)
        with pytest.raises(ValueError):
            measures.tau3_pure(random_mixed(3, rng))

    def test_tau4_pure_rejects_mixed(self):
        rng = np.random.default_rng(7)
        with pytest.raises(ValueError):
            measures.tau4_pure(random_mixed(4, rng))
