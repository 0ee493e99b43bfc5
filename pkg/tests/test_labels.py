import io
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsplab.dfa import BINARY, empty_dfa, random_adfa, random_dfa
from nsplab.errors import EmptySampleError, InvalidStateError, ShapeMismatchError, SymbolError
from nsplab.labels import (
    NspExample,
    NspLabels,
    NspSample,
    brute_force_phi,
    continuation_bit,
    continuation_vector,
    empirical_nsp_loss,
    nsp_err,
    nsp_label_vector,
    random_label_agreement,
    read_dataset,
    write_dataset,
)
from nsplab.padding import Monomial, eval_monomial, monomial_to_adfa, pad_adfa
from oracles import all_strings, brute_phi, labels_by_definition


def rows(*spec):
    return NspLabels([(c, m) for c, m in spec])


class TestContinuation:
    def test_bits(self, z1z3):
        assert continuation_bit(z1z3, "", "0") == 0
        assert continuation_bit(z1z3, "1", "0") == 1
        assert continuation_bit(z1z3, "10", "0") == 0

    def test_vectors(self, z1z3):
        assert continuation_vector(z1z3, 0) == (0, 1)
        assert continuation_vector(z1z3, 1) == (1, 1)
        assert continuation_vector(z1z3, 5) == (0, 0)

    def test_errors(self, z1z3):
        with pytest.raises(InvalidStateError):
            continuation_vector(z1z3, 6)
        with pytest.raises(SymbolError):
            continuation_bit(z1z3, "1", "2")


class TestLabelVector:
    def test_padded_member(self, z1z3_padded):
        got = nsp_label_vector(z1z3_padded, "10111")
        assert got == rows(*[((1, 1), 0)] * 5, ((0, 0), 1))

    def test_padded_rejected_prefix(self, z1z3_padded):
        got = nsp_label_vector(z1z3_padded, "00001")
        assert got == rows(*[((1, 1), 0)] * 4, ((0, 1), 0), ((0, 0), 1))

    def test_empty_string(self, z1z3):
        assert nsp_label_vector(z1z3, "") == rows(((0, 1), 0))

    def test_matches_definition(self, z1z3, z1z3_padded):
        for dfa in (z1z3, z1z3_padded):
            for x in all_strings(BINARY, 5):
                assert nsp_label_vector(dfa, x).rows == labels_by_definition(dfa, x, dfa.state_count)

    def test_shape(self, z1z3):
        labels = nsp_label_vector(z1z3, "1011")
        assert labels.horizon == 4
        assert len(labels.flat()) == (2 + 1) * (4 + 1)

    def test_flat_order(self):
        labels = rows(((1, 0), 0), ((0, 1), 1))
        assert labels.flat() == (1, 0, 0, 0, 1, 1)
        assert NspLabels.from_flat(labels.flat(), 2) == labels

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 10), st.integers(0, 10 ** 6), st.text("01", max_size=8))
    def test_monotone_death(self, n, seed, x):
        d = random_dfa(n, seed)
        labels = nsp_label_vector(d, x)
        dead_from = None
        for i, (cont, m) in enumerate(labels.rows):
            if dead_from is not None:
                assert (cont, m) == ((0, 0), 0)
            if not any(cont) and not m:
                dead_from = i

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 7), st.integers(0, 10 ** 6), st.data())
    def test_positive_strings(self, n, seed, data):
        d = random_adfa(n, 20, seed)
        positives = sorted(x for x in all_strings(BINARY, n) if d.accepts(x))
        x = data.draw(st.sampled_from(positives))
        labels = nsp_label_vector(d, x)
        assert labels.rows[-1][1] == 1
        # each symbol actually read was a live continuation
        for i, sym in enumerate(x):
            assert labels.rows[i][0][int(sym)] == 1


class TestErr:
    def test_identical(self, z1z3):
        a = nsp_label_vector(z1z3, "1010")
        assert nsp_err(a, nsp_label_vector(z1z3, "1010")) == 0

    def test_one_bit(self):
        a = rows(((1, 1), 0), ((0, 0), 1))
        b = rows(((1, 1), 0), ((0, 0), 0))
        assert nsp_err(a, b) == 1

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            nsp_err(rows(((1, 1), 0)), rows(((1, 1), 0), ((0, 0), 1)))


class TestEmpiricalLoss:
    def _sample(self, dfa, xs):
        return NspSample([NspExample(x, nsp_label_vector(dfa, x)) for x in xs])

    def test_self_consistency(self, z1z3_padded):
        sample = self._sample(z1z3_padded, [u + "1" for u in all_strings(BINARY, 4) if len(u) == 4])
        assert empirical_nsp_loss(z1z3_padded, sample) == 0
        assert empirical_nsp_loss(z1z3_padded, sample, target=z1z3_padded) == 0

    def test_counted_disagreements(self):
        target_m = Monomial(4, {1, 3})
        other_m = Monomial(4, {1})
        target = pad_adfa(monomial_to_adfa(target_m), 4).dfa
        hyp = pad_adfa(monomial_to_adfa(other_m), 4).dfa
        us = [u for u in all_strings(BINARY, 4) if len(u) == 4]
        sample = self._sample(target, [u + "1" for u in us])
        # padded labels differ exactly where the two monomials disagree
        k = sum(eval_monomial(target_m, u) != eval_monomial(other_m, u) for u in us)
        assert k == 4
        assert empirical_nsp_loss(hyp, sample) == Fraction(k, 16)

    def test_dead_hypothesis(self, z1z3):
        sample = self._sample(z1z3, ["1010", "1111", "1011"])
        assert empirical_nsp_loss(empty_dfa(), sample) == 1

    def test_arbitrary_predictor(self, z1z3):
        sample = self._sample(z1z3, ["1010"])
        assert empirical_nsp_loss(lambda x: nsp_label_vector(z1z3, x), sample) == 0

    def test_empty_sample(self, z1z3):
        with pytest.raises(EmptySampleError):
            empirical_nsp_loss(z1z3, NspSample([]))


class TestBruteForcePhi:
    def test_examples(self, z1z3):
        assert brute_force_phi(z1z3, "1", "1", 6) == 1
        assert brute_force_phi(z1z3, "0", "0", 6) == 0
        assert z1z3.accepts("1110")

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 5), st.integers(0, 10 ** 6), st.text("01", max_size=4), st.sampled_from("01"))
    def test_matches_literal_enumeration(self, n, seed, x, sigma):
        d = random_dfa(n, seed, accept_prob=0.2)
        for budget in range(0, 6):
            assert brute_force_phi(d, x, sigma, budget) == brute_phi(d, x, sigma, budget)

    def test_agrees_with_co_reachability(self):
        for seed in range(20):
            d = random_dfa(1 + seed % 20, seed, accept_prob=0.1)
            for x in all_strings(BINARY, 6):
                for sigma in BINARY:
                    assert continuation_bit(d, x, sigma) == brute_force_phi(d, x, sigma, d.state_count)


class TestDataset:
    def test_round_trip(self, z1z3):
        xs = ["1010", "1111"]
        sample = NspSample([NspExample(x, nsp_label_vector(z1z3, x)) for x in xs],
                           {"target": "abc", "seed": 1})
        buf = io.StringIO()
        write_dataset(sample, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == '{"provenance": {"seed": 1, "target": "abc"}}'
        assert lines[1] == '{"x":"1010","rows":[[[0,1],0],[[1,1],0],[[0,1],0],[[1,1],0],[[0,0],1]]}'
        again = read_dataset(io.StringIO(buf.getvalue()))
        assert again == sample
        assert again.provenance == sample.provenance
        for ex in again:
            assert ex.labels == nsp_label_vector(z1z3, ex.x)

    def test_horizon_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            NspExample("10", rows(((1, 1), 0)))


def test_random_baseline_small(z1z3_padded):
    truth = [nsp_label_vector(z1z3_padded, "10111")] * 2000
    nsp_rate, cls_rate = random_label_agreement(truth, seed=0)
    assert nsp_rate <= 0.005
    assert abs(cls_rate - 0.5) < 0.05
