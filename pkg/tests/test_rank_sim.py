"""Stabilizer-rank sampler: sparsification statistics, norm sketch, bit sampling."""

import math

import numpy as np
import pytest

import magicsim.dense_oracle as do
import magicsim.monotones as mono
import magicsim.rank_sim as rs
import magicsim.stab_core as sc
from magicsim._util import sample_rng
from magicsim.rank_sim import RankSimError

XI_H = 4.0 - 2.0 * np.sqrt(2.0)


def h_decomp():
    return rs.pure_decomposition_1q(mono.BlochState.named("H"))


def variance_exact(C, l1, k):
    # exact sample-variance upper bound for <Omega|Omega> at k terms
    return (
        4.0 * (k**3 - 3.0 * k**2 + 2.0 * k) / k**4 * C
        + 2.0 * (l1**4 / k**2) * (1.0 - 1.0 / k)
        - (4.0 * k**3 - 10.0 * k**2 + 6.0 * k) / k**4
    )


def random_pure_bloch(rng):
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return mono.BlochState(*v)


def random_product_decomposition(rng, n):
    while True:
        blochs = [random_pure_bloch(rng) for _ in range(n)]
        if all(not b.in_octahedron() for b in blochs):
            return rs.mixed_input_product(blochs).ensemble[0][1]


class TestSparseDecomposition:
    def test_h_two_terms(self):
        d = h_decomp()
        assert len(d.terms) == 2
        assert d.l1**2 == pytest.approx(XI_H, abs=1e-8)
        target = np.array([np.cos(np.pi / 8), np.sin(np.pi / 8)])
        dense = d.dense()
        # global phase free
        phase = dense[np.argmax(np.abs(dense))]
        phase /= abs(phase)
        assert dense / phase == pytest.approx(target, abs=1e-9)

    def test_clifford_magic_C_is_one(self):
        C, delta_c = rs.compute_C(h_decomp())
        assert C == pytest.approx(1.0, abs=1e-9)
        assert delta_c == pytest.approx(0.0, abs=1e-9)

    def test_single_term_C(self):
        d = rs.SparseDecomposition([1.0], [sc.zero_state(1)])
        C, delta_c = rs.compute_C(d)
        assert C == pytest.approx(1.0, abs=1e-12)
        assert delta_c == pytest.approx(0.0, abs=1e-12)

    def test_C_invariants_random(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            d = random_product_decomposition(rng, 2)
            assert d.C >= 1.0 - 1e-9
            assert d.delta_c >= -1e-9

    def test_C_multiplicative(self):
        dh = h_decomp()
        df = rs.pure_decomposition_1q(mono.BlochState.named("F"))
        joint = rs.mixed_input_product(
            [mono.BlochState.named("H"), mono.BlochState.named("F")]
        ).ensemble[0][1]
        assert joint.C == pytest.approx(dh.C * df.C, abs=1e-9)

    def test_many_copy_C_trend(self):
        # theta chosen where the single-copy concentration constant peaks
        theta = 0.1187
        d1 = rs.pure_decomposition_1q(
            mono.BlochState(np.sin(2 * theta), 0.0, np.cos(2 * theta))
        )
        C100 = d1.C**100
        l1sq_100 = (d1.l1**2) ** 100
        assert C100 >= 1.0 - 1e-9
        assert (C100 - 1.0) / l1sq_100 < 0.1

    def test_rejects_bad_norm(self):
        with pytest.raises(RankSimError):
            rs.SparseDecomposition([1.0, 1.0], [sc.zero_state(1), sc.zero_state(1)])

    def test_rejects_empty(self):
        with pytest.raises(RankSimError):
            rs.SparseDecomposition([], [])

    def test_rejects_width_mismatch(self):
        with pytest.raises(RankSimError):
            rs.SparseDecomposition(
                [0.5, 0.5], [sc.zero_state(1), sc.zero_state(2)], validate=False
            )


class TestSparsify:
    def test_single_term_exact(self):
        d = rs.SparseDecomposition([1.0], [sc.zero_state(2)])
        for k in (1, 7, 50):
            om = rs.sparsify(d, k, seed=3)
            assert om.norm_sq() == pytest.approx(1.0, abs=1e-12)
            assert om.dense() == pytest.approx(d.dense(), abs=1e-12)

    def test_terms_property(self):
        om = rs.sparsify(h_decomp(), 9, seed=5)
        assert len(om.terms) == 9
        rebuilt = om.prefactor * sum(do.expand(t) for t in om.terms)
        assert rebuilt == pytest.approx(om.dense(), abs=1e-12)

    def test_mean_norm_h(self):
        d = h_decomp()
        k = 40
        vals = np.empty(10_000)
        for i in range(vals.size):
            vals[i] = rs.sparsify(d, k, sample_rng(17, i)).norm_sq()
        expect = 1.0 + (d.l1**2 - 1.0) / k
        assert expect == pytest.approx(1.0042893, abs=1e-6)
        sigma = vals.std(ddof=1) / math.sqrt(vals.size)
        assert abs(vals.mean() - expect) <= 4 * sigma

    def test_mean_vector_unbiased(self):
        d = rs.mixed_input_product(
            [mono.BlochState.named("H"), mono.BlochState.named("T")]
        ).ensemble[0][1]
        acc = np.zeros(4, dtype=complex)
        reps = 20_000
        for i in range(reps):
            acc += rs.sparsify(d, 25, sample_rng(23, i)).dense()
        acc /= reps
        assert np.abs(acc - d.dense()).max() < 0.01

    def test_rejects_bad_k(self):
        with pytest.raises(RankSimError):
            rs.sparsify(h_decomp(), 0, seed=1)


class TestVarianceBound:
    def test_h_cubed(self):
        d = rs.mixed_input_product([mono.BlochState.named("H")] * 3).ensemble[0][1]
        k = 100
        vals = np.empty(20_000)
        for i in range(vals.size):
            vals[i] = rs.sparsify(d, k, sample_rng(31, i)).norm_sq()
        C, _ = rs.compute_C(d)
        bound = variance_exact(C, d.l1, k)
        assert vals.var(ddof=1) <= bound
        expect = 1.0 + (d.l1**2 - 1.0) / k
        sigma = vals.std(ddof=1) / math.sqrt(vals.size)
        assert abs(vals.mean() - expect) <= 4 * sigma

    def test_random_instances(self):
        rng = np.random.default_rng(47)
        for trial in range(20):
            n = 1 + trial % 2
            d = random_product_decomposition(rng, n)
            k = int(rng.integers(5, 60))
            vals = np.empty(4000)
            for i in range(vals.size):
                vals[i] = rs.sparsify(d, k, sample_rng(1000 + trial, i)).norm_sq()
            bound = variance_exact(d.C, d.l1, k)
            # 20% slack over the rigorous bound for sample-variance noise
            assert vals.var(ddof=1) <= 1.2 * bound + 1e-12


class TestFastNorm:
    def test_equatorial_mean_identity(self):
        # the single-state estimate is unbiased: exhaustive average over A
        om = rs.sparsify(h_decomp(), 3, seed=9)
        total = sum(2.0 * abs(om.equatorial_overlap(np.array([[a]]))) ** 2 for a in range(4))
        assert total / 4.0 == pytest.approx(om.norm_sq(), abs=1e-12)

    def test_equatorial_mean_identity_2q(self):
        d = rs.mixed_input_product(
            [mono.BlochState.named("H"), mono.BlochState.named("T")]
        ).ensemble[0][1]
        om = rs.sparsify(d, 5, seed=13)
        total = 0.0
        count = 0
        for a0 in range(4):
            for a1 in range(4):
                for off in range(2):
                    A = np.array([[a0, off], [off, a1]])
                    total += 4.0 * abs(om.equatorial_overlap(A)) ** 2
                    count += 1
        assert total / count == pytest.approx(om.norm_sq(), abs=1e-12)

    def test_basis_state(self):
        d = rs.SparseDecomposition([1.0], [sc.zero_state(2)])
        om = rs.sparsify(d, 1, seed=2)
        eta = rs.fast_norm(om, 0.2, 0.05, seed=4)
        assert 0.8 <= eta <= 1.2

    def test_projected_plus(self):
        d = rs.SparseDecomposition([1.0], [sc.plus_state(1)])
        om = rs.sparsify(d, 1, seed=2).project_basis_bit(0, 0)
        eta = rs.fast_norm(om, 0.2, 0.05, seed=6)
        assert eta == pytest.approx(0.5, abs=0.1)

    def test_null_vector(self):
        d = rs.SparseDecomposition([1.0], [sc.zero_state(1)])
        om = rs.sparsify(d, 1, seed=2).project_basis_bit(0, 1)
        assert rs.fast_norm(om, 0.2, 0.05, seed=8) == 0.0

    def test_multiplicative_error_rate(self):
        rng = np.random.default_rng(61)
        d = random_product_decomposition(rng, 3)
        eps, p_fn = 0.2, 0.05
        failures = 0
        trials = 200
        for t in range(trials):
            om = rs.sparsify(d, 8, sample_rng(71, t))
            truth = float(np.linalg.norm(om.dense()) ** 2)
            eta = rs.fast_norm(om, eps, p_fn, sample_rng(73, t))
            if not (1 - eps) * truth - 1e-12 <= eta <= (1 + eps) * truth + 1e-12:
                failures += 1
        limit = trials * p_fn + 3 * math.sqrt(trials * p_fn * (1 - p_fn))
        assert failures <= limit

    def test_validation(self):
        om = rs.sparsify(h_decomp(), 2, seed=1)
        with pytest.raises(RankSimError):
            rs.fast_norm(om, 0.3, 0.05, seed=1)
        with pytest.raises(RankSimError):
            rs.fast_norm(om, 0.1, 0.0, seed=1)


class TestMixedInput:
    def test_pure_product(self):
        inp = rs.mixed_input_product([mono.BlochState.named("H")])
        assert len(inp.ensemble) == 1
        assert inp.Xi_tilde == pytest.approx(XI_H, abs=1e-8)
        assert inp.equimagical

    def test_noisy_h_squared(self):
        noisy = mono.BlochState(0.9 / np.sqrt(2), 0.0, 0.9 / np.sqrt(2))
        inp = rs.mixed_input_product([noisy, noisy])
        assert len(inp.ensemble) == 4
        assert inp.equimagical
        lam, _ = mono.lambda_plus_1q(noisy)
        assert inp.Xi_tilde == pytest.approx(lam**2, abs=1e-8)
        rho1 = noisy.density()
        assert inp.dense() == pytest.approx(np.kron(rho1, rho1), abs=1e-8)

    def test_weight_validation(self):
        d = rs.SparseDecomposition([1.0], [sc.zero_state(1)])
        with pytest.raises(RankSimError):
            rs.MixedInput([(0.7, d)])
        with pytest.raises(RankSimError):
            rs.MixedInput([])

    def test_equimagical_flag_rejected(self):
        d0 = rs.SparseDecomposition([1.0], [sc.zero_state(1)])
        dh = h_decomp()
        with pytest.raises(RankSimError):
            rs.MixedInput([(0.5, d0), (0.5, dh)], equimagical=True)
        inp = rs.MixedInput([(0.5, d0), (0.5, dh)])
        assert not inp.equimagical


class TestSampleBitstrings:
    def test_zero_product_always_zero(self):
        inp = rs.mixed_input_product([mono.BlochState.named("0")] * 3)
        strings, report = rs.sample_bitstrings(inp, 3, 0.3, 0.05, 12, seed=5)
        assert set(strings) == {"000"}
        assert report.fastnorm_calls <= 12 * 7

    def test_h_marginal_exact_backend(self):
        inp = rs.mixed_input_product([mono.BlochState.named("H")])
        delta = 0.1
        n_str = 100_000
        strings, report = rs.sample_bitstrings(
            inp, 1, delta, 0.05, n_str, seed=11, norm_backend="exact"
        )
        p0 = strings.count("0") / n_str
        target = np.cos(np.pi / 8) ** 2
        sigma = math.sqrt(target * (1 - target) / n_str)
        assert abs(p0 - target) <= delta / 2 + 3 * sigma
        assert report.ks.min() == report.ks.max() == math.ceil(12 * XI_H / delta)
        assert report.fastnorm_calls == 0

    def test_h_marginal_fastnorm_backend(self):
        inp = rs.mixed_input_product([mono.BlochState.named("H")])
        delta = 0.5
        n_str = 200
        strings, report = rs.sample_bitstrings(inp, 1, delta, 0.05, n_str, seed=13)
        p0 = strings.count("0") / n_str
        target = np.cos(np.pi / 8) ** 2
        sigma = math.sqrt(target * (1 - target) / n_str)
        assert abs(p0 - target) <= delta / 2 + 3 * sigma
        assert n_str * 2 <= report.fastnorm_calls <= n_str * 3

    def test_noisy_h_squared_distribution(self):
        noisy = mono.BlochState(0.9 / np.sqrt(2), 0.0, 0.9 / np.sqrt(2))
        inp = rs.mixed_input_product([noisy, noisy])
        delta = 0.15
        n_str = 20_000
        strings, report = rs.sample_bitstrings(
            inp, 2, delta, 0.05, n_str, seed=17, norm_backend="exact"
        )
        rho = inp.dense()
        truth = np.real(np.diag(rho))
        emp = np.array([strings.count(f"{x:02b}") for x in range(4)]) / n_str
        sigma = sum(math.sqrt(p * (1 - p) / n_str) for p in truth)
        assert np.abs(emp - truth).sum() <= delta + 3 * sigma
        # equimagical input: every string pays the same term count
        assert report.ks.min() == report.ks.max()

    def test_chain_rule_matches_dense_per_omega(self):
        # exact backend draws each string from |<x|Omega>|^2 / <Omega|Omega>
        inp = rs.mixed_input_product([mono.BlochState.named("H")] * 2)
        delta, seed, n_str = 0.3, 19, 30_000
        strings, _ = rs.sample_bitstrings(
            inp, 2, delta, 0.05, n_str, seed=seed, norm_backend="exact"
        )
        d = inp.ensemble[0][1]
        k = math.ceil(12 * d.l1**2 / delta)
        mean_p = np.zeros(4)
        for i in range(n_str):
            rng = sample_rng(seed, i)
            rng.random()
            om = rs.SparseVector(
                d.absorbed_termset(), rng.multinomial(k, d.sampling_probs()), k, d.l1 / k
            )
            vec = om.dense()
            mean_p += np.abs(vec) ** 2 / np.linalg.norm(vec) ** 2
        mean_p /= n_str
        emp = np.array([strings.count(f"{x:02b}") for x in range(4)]) / n_str
        assert np.abs(emp - mean_p).sum() <= 0.025

    def test_ensemble_sparsification_bound(self):
        # averaged normalized sparsifications approach the pure target
        d = rs.mixed_input_product(
            [mono.BlochState.named("H"), mono.BlochState.named("T")]
        ).ensemble[0][1]
        delta_s = max(0.2, d.delta_c)
        k = math.ceil(4 * d.l1**2 / delta_s)
        psi = d.dense()
        target = np.outer(psi, np.conj(psi))
        acc = np.zeros((4, 4), dtype=complex)
        reps = 100_000
        for i in range(reps):
            vec = rs.sparsify(d, k, sample_rng(29, i)).dense()
            acc += np.outer(vec, np.conj(vec)) / (np.linalg.norm(vec) ** 2)
        acc /= reps
        gap = np.linalg.eigvalsh(acc - target)
        trace_dist = 0.5 * np.abs(gap).sum()
        assert trace_dist <= delta_s + 0.5 * delta_s**2 + 0.02

    def test_ensemble_sparsification_bound_face_state(self):
        d = rs.pure_decomposition_1q(mono.BlochState.named("F"))
        delta_s = max(0.25, d.delta_c)
        k = math.ceil(4 * d.l1**2 / delta_s)
        psi = d.dense()
        target = np.outer(psi, np.conj(psi))
        acc = np.zeros((2, 2), dtype=complex)
        reps = 100_000
        for i in range(reps):
            vec = rs.sparsify(d, k, sample_rng(37, i)).dense()
            acc += np.outer(vec, np.conj(vec)) / (np.linalg.norm(vec) ** 2)
        acc /= reps
        gap = np.linalg.eigvalsh(acc - target)
        trace_dist = 0.5 * np.abs(gap).sum()
        assert trace_dist <= delta_s + 0.5 * delta_s**2 + 0.02

    def test_unequal_ensemble_varies_k(self):
        d0 = rs.SparseDecomposition([1.0], [sc.zero_state(1)])
        inp = rs.MixedInput([(0.5, d0), (0.5, h_decomp())])
        _, report = rs.sample_bitstrings(
            inp, 1, 0.2, 0.05, 200, seed=23, norm_backend="exact"
        )
        assert len(set(report.ks.tolist())) == 2

    def test_clifford_prefix(self):
        inp = rs.mixed_input_product([mono.BlochState.named("+")])
        strings, _ = rs.sample_bitstrings(
            inp, 1, 0.2, 0.05, 30, seed=3, prefix=[("H", 0)]
        )
        assert set(strings) == {"0"}

    def test_reproducible(self):
        noisy = mono.BlochState(0.9 / np.sqrt(2), 0.0, 0.9 / np.sqrt(2))
        inp = rs.mixed_input_product([noisy])
        a, _ = rs.sample_bitstrings(inp, 1, 0.3, 0.05, 100, seed=41, norm_backend="exact")
        b, _ = rs.sample_bitstrings(inp, 1, 0.3, 0.05, 100, seed=41, norm_backend="exact")
        c, _ = rs.sample_bitstrings(inp, 1, 0.3, 0.05, 100, seed=42, norm_backend="exact")
        assert a == b
        assert a != c

    def test_report_dict(self):
        inp = rs.mixed_input_product([mono.BlochState.named("H")])
        _, report = rs.sample_bitstrings(inp, 1, 0.2, 0.05, 20, seed=1, norm_backend="exact")
        out = report.to_dict()
        assert out["regime"] == "standard"
        assert out["norm_backend"] == "exact"
        assert out["k_min"] == out["k_max"] == math.ceil(12 * XI_H / 0.2)
        assert out["wall_time_s"] > 0

    def test_validation(self):
        inp = rs.mixed_input_product([mono.BlochState.named("H")])
        with pytest.raises(RankSimError):
            rs.sample_bitstrings(inp, 2, 0.2, 0.05, 10, seed=1)
        with pytest.raises(RankSimError):
            rs.sample_bitstrings(inp, 1, 0.0, 0.05, 10, seed=1)
        with pytest.raises(RankSimError):
            rs.sample_bitstrings(inp, 1, 1.0, 0.05, 10, seed=1)
        with pytest.raises(RankSimError):
            rs.sample_bitstrings(inp, 1, 0.2, 0.05, 0, seed=1)
        with pytest.raises(RankSimError):
            rs.sample_bitstrings(inp, 1, 0.2, 0.05, 10, seed=1, norm_backend="dense")
