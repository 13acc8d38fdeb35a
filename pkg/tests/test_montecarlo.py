import math
from fractions import Fraction as F

import numpy as np
import pytest

from dirac2mm.algebra import CouplingPoint
from dirac2mm.closedform import Signature
from dirac2mm import montecarlo as mc

P11 = CouplingPoint(1, 1)


def random_hermitian(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2


class TestAction:
    def test_zero_matrices(self):
        z = np.zeros((4, 4))
        for sig in Signature:
            assert mc.action_eval(z, z, sig, P11) == 0.0

    def test_scalar_case(self):
        # N=1, B=0: the quartic trace collapses to 8 t2 x^2 + 32 t4 x^4
        for x in (0.3, -1.1):
            got = mc.action_eval(np.array([[x]]), np.array([[0.0]]), Signature.S20, P11)
            assert got == pytest.approx(8 * x**2 + 32 * x**4, rel=1e-13)

    def test_matches_dense_dirac_traces(self):
        rng = np.random.default_rng(0)
        p = CouplingPoint(F(3, 2), F(2, 3))
        for sig in Signature:
            for n in (2, 3, 5):
                A, B = random_hermitian(rng, n), random_hermitian(rng, n)
                D = mc.dirac_operator(A, B, sig)
                direct = float(p.t2) * np.trace(D @ D).real + float(p.t4) * np.trace(
                    np.linalg.matrix_power(D, 4)
                ).real
                assert mc.action_eval(A, B, sig, p) == pytest.approx(direct, rel=1e-12)

    def test_swap_symmetry_for_symmetric_signatures(self):
        rng = np.random.default_rng(1)
        A, B = random_hermitian(rng, 4), random_hermitian(rng, 4)
        for sig in (Signature.S20, Signature.S02):
            assert mc.action_eval(A, B, sig, P11) == pytest.approx(
                mc.action_eval(B, A, sig, P11), rel=1e-12
            )

    def test_rejects_non_hermitian(self):
        bad = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(ValueError):
            mc.action_eval(bad, np.zeros((2, 2)), Signature.S20, P11)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            mc.SamplerConfig(n=0, point=P11)
        with pytest.raises(ValueError):
            mc.SamplerConfig(n=4, point=P11, steps=10, burn_in=20)
        with pytest.raises(ValueError):
            mc.SamplerConfig(n=4, point=CouplingPoint(1, F(-1, 2)))

    def test_default_scale_depends_on_size(self):
        small = mc.SamplerConfig(n=2, point=P11)
        large = mc.SamplerConfig(n=12, point=P11)
        assert small.step_scale > large.step_scale

    def test_proposal_count(self):
        cfg = mc.SamplerConfig(n=4, point=P11, steps=1000, burn_in=100, chains=8)
        assert cfg.proposals == 8000


@pytest.fixture(scope="module")
def short_chain():
    cfg = mc.SamplerConfig(
        n=6, point=P11, steps=6000, burn_in=2000, thinning=20, seed=5, chains=4
    )
    return mc.run_chain(cfg)


class TestChain:
    def test_deterministic_given_seed(self, short_chain):
        again = mc.run_chain(short_chain.config)
        assert np.array_equal(short_chain.samples_a, again.samples_a)
        assert np.array_equal(short_chain.samples_b, again.samples_b)

    def test_samples_stay_hermitian_exactly(self, short_chain):
        for arr in (short_chain.samples_a, short_chain.samples_b):
            assert np.array_equal(arr, arr.conj().swapaxes(-1, -2))

    def test_acceptance_tuned(self, short_chain):
        assert short_chain.healthy
        assert 0.25 < short_chain.acceptance.mean() < 0.55

    def test_moment_estimate_tracks_large_n_value(self, short_chain):
        est = mc.estimate_moment(short_chain, "AA")
        assert est.std_error > 0
        assert abs(est.mean - 1 / 16) < 0.15 * (1 / 16)

    def test_parity_observable_is_noise(self, short_chain):
        est = mc.estimate_moment(short_chain, "AB")
        assert est.agrees_with(0.0, nsigma=3.0)

    def test_dirac_estimate(self, short_chain):
        est = mc.estimate_dirac(short_chain, 2, max_samples=300)
        assert abs(est.mean - 0.5) < 0.1

    def test_trace_rows(self, short_chain):
        rows = list(mc.trace_rows(short_chain))
        assert rows[0] == ("sample", "tr_A2", "tr_D2", "tr_D4", "acceptance")
        assert len(rows) == short_chain.samples_a.shape[0] + 1


class TestCommutatorSignatures:
    def test_commutator_letters_stay_traceless(self):
        cfg = mc.SamplerConfig(
            n=4, point=P11, signature=Signature.S02, steps=1500, burn_in=500,
            thinning=10, seed=3, chains=2,
        )
        r = mc.run_chain(cfg)
        for arr in (r.samples_a, r.samples_b):
            traces = np.einsum("tcii->tc", arr)
            assert np.max(np.abs(traces)) < 1e-10

    def test_anticommutator_letter_keeps_trace(self):
        cfg = mc.SamplerConfig(
            n=4, point=P11, signature=Signature.S11, steps=1500, burn_in=500,
            thinning=10, seed=3, chains=2,
        )
        r = mc.run_chain(cfg)
        assert np.max(np.abs(np.einsum("tcii->tc", r.samples_a))) > 1e-6
        assert np.max(np.abs(np.einsum("tcii->tc", r.samples_b))) < 1e-10


class TestConcentration:
    def test_second_moment_decreases_in_quadratic_coupling(self):
        means = []
        for t2 in (F(1, 2), 2, 8):
            cfg = mc.SamplerConfig(
                n=4, point=CouplingPoint(t2, 4), steps=4000, burn_in=1500,
                thinning=10, seed=9, chains=4,
            )
            means.append(mc.estimate_moment(mc.run_chain(cfg), "AA").mean)
        assert means[0] > means[1] > means[2]


def test_ks_check_fast():
    dist, n = mc.n1_marginal_ks(P11, samples=20_000, seed=7)
    assert n >= 20_000
    assert dist < 0.02


def test_dirac_operator_shape_and_hermiticity():
    rng = np.random.default_rng(2)
    A, B = random_hermitian(rng, 3), random_hermitian(rng, 3)
    for sig in Signature:
        D = mc.dirac_operator(A, B, sig)
        assert D.shape == (18, 18)
        assert np.allclose(D, D.conj().T, atol=1e-13)
