import random
from collections import Counter
from fractions import Fraction

import jsonschema
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsplab.dfa import BINARY, Dfa, empty_dfa, random_adfa
from nsplab.errors import EmptyLanguageError, EmptySupportError, NotPositiveError, ShapeMismatchError
from nsplab.labels import NspLabels, nsp_label_vector
from nsplab.padding import Monomial, monomial_to_adfa, pad_adfa
from nsplab.reduction import (
    DistributionSpec,
    LabeledExample,
    Sampler,
    constant_learner,
    count_accepting,
    extract_classifier,
    lift_distribution,
    lift_example,
    make_learner,
    oracle_learner,
    run_config,
    run_reduction,
    sample_positive,
    validate_config,
)
from oracles import accepted, all_strings


def words(n):
    return [x for x in all_strings(BINARY, n) if len(x) == n]


class TestLift:
    def test_positive(self):
        ex = lift_example(LabeledExample("0100", 1))
        assert ex.x == "01001"
        assert ex.labels.rows == tuple([((1, 1), 0)] * 5 + [((0, 0), 1)])

    def test_negative(self):
        ex = lift_example(LabeledExample("0101", 0))
        assert ex.labels.rows[4] == ((0, 1), 0)
        assert ex.labels.rows[5] == ((0, 0), 1)

    def test_display_examples(self):
        ex = lift_example(LabeledExample("1010", 1))
        assert ex.x == "10101"
        assert ex.labels.rows[4] == ((1, 1), 0)
        assert ex.labels.rows[5] == ((0, 0), 1)
        assert lift_example(LabeledExample("0000", 0)).labels.rows[4] == ((0, 1), 0)

    def test_bad_label(self):
        with pytest.raises(ValueError):
            LabeledExample("01", 2)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 7), st.integers(0, 10 ** 6))
    def test_matches_padded_target(self, n, seed):
        a = random_adfa(n, n + 6, seed)
        p = pad_adfa(a, n).dfa
        for u in words(n):
            ex = lift_example(LabeledExample(u, a.accepts(u)))
            assert p.accepts(ex.x)
            assert ex.labels == nsp_label_vector(p, ex.x)


class TestSampler:
    def test_point_mass(self):
        s = Sampler(DistributionSpec("explicit", 3, 0, ("101",)))
        assert set(s.draw(100)) == {"101"}
        assert s.probabilities() == {"101": 1}

    def test_empty_support(self):
        with pytest.raises(EmptySupportError):
            Sampler(DistributionSpec("explicit", 3, 0, ()))
        with pytest.raises(EmptySupportError):
            Sampler(DistributionSpec("uniform-positive", 3, 0, target=empty_dfa()))

    def test_wrong_length_support(self):
        with pytest.raises(ValueError):
            DistributionSpec("explicit", 3, 0, ("10",))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            DistributionSpec("gaussian", 3)

    def test_uniform_chi_square(self):
        draws = Sampler(DistributionSpec("uniform", 2, seed=0)).draw(10 ** 4)
        counts = Counter(draws)
        assert set(counts) == {"00", "01", "10", "11"}
        expected = 10 ** 4 / 4
        chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
        # 3 degrees of freedom, 0.999 quantile is 16.27
        assert chi2 < 16.27

    def test_deterministic(self, z1z3):
        d = DistributionSpec("uniform-positive", 4, seed=7, target=z1z3)
        assert Sampler(d).draw(50) == Sampler(d).draw(50)
        assert Sampler(d).draw(50) != Sampler(d.with_seed(8)).draw(50)

    def test_positive_support(self, z1z3):
        for kind in ("uniform-positive", "path-weighted"):
            d = DistributionSpec(kind, 4, seed=1, target=z1z3)
            assert set(Sampler(d).draw(500)) <= accepted(z1z3, 4)

    def test_uniform_positive_exact(self):
        for seed in range(10):
            a = random_adfa(6, 16, seed)
            probs = Sampler(DistributionSpec("uniform-positive", 6, target=a)).probabilities()
            lang = {x for x in accepted(a, 6)}
            assert set(probs) == lang
            assert all(p == Fraction(1, len(lang)) for p in probs.values())

    def test_path_weighted_exact(self):
        # accepts 00, 01, 11: the branch after '1' holds one string but still gets half the mass
        a = Dfa(BINARY, [[1, 2], [3, 3], [4, 3], [4, 4], [4, 4]], 0, {3})
        d = DistributionSpec("path-weighted", 2, target=a)
        probs = Sampler(d).probabilities()
        assert probs == {"00": Fraction(1, 4), "01": Fraction(1, 4), "11": Fraction(1, 2)}
        assert sum(probs.values()) == 1

    def test_lifted_uniform_chi_square(self):
        lifted = lift_distribution(DistributionSpec("uniform", 2, seed=1))
        counts = Counter(lifted.draw(10 ** 4))
        assert set(counts) == {"001", "011", "101", "111"}
        chi2 = sum((c - 2500) ** 2 / 2500 for c in counts.values())
        assert chi2 < 16.27
        assert all(p == Fraction(1, 4) for p in lifted.probabilities().values())

    def test_lifted_point_mass(self):
        lifted = lift_distribution(DistributionSpec("explicit", 4, 0, ("1010",)))
        assert set(lifted.draw(20)) == {"10101"}

    def test_count_accepting(self, z1z3):
        counts = count_accepting(z1z3, 4)
        assert counts[4][0] == 4
        assert counts[0] == [0, 0, 0, 0, 1, 0]

    def test_lifted(self, z1z3):
        d = DistributionSpec("uniform-positive", 4, seed=3, target=z1z3)
        lifted = lift_distribution(d)
        assert all(x.endswith("1") and len(x) == 5 for x in lifted.draw(20))
        assert set(lifted.probabilities()) == {u + "1" for u in accepted(z1z3, 4)}


class TestSamplePositive:
    def test_z1z3_frequencies(self, z1z3):
        d = DistributionSpec("uniform-positive", 4, seed=0)
        sample = sample_positive(z1z3, d, 4000)
        counts = Counter(ex.x for ex in sample)
        assert set(counts) == {"1010", "1011", "1110", "1111"}
        for c in counts.values():
            assert abs(c / 4000 - 0.25) <= 0.02
        for ex in sample:
            assert ex.labels == nsp_label_vector(z1z3, ex.x)
        assert sample.provenance["m"] == 4000

    def test_deterministic(self, z1z3):
        d = DistributionSpec("path-weighted", 4, seed=5)
        assert sample_positive(z1z3, d, 30) == sample_positive(z1z3, d, 30)

    def test_empty_language(self, empty3):
        with pytest.raises(EmptyLanguageError):
            sample_positive(empty3, DistributionSpec("uniform-positive", 4), 10)

    def test_explicit_negative(self, z1z3):
        with pytest.raises(NotPositiveError):
            sample_positive(z1z3, DistributionSpec("explicit", 4, 0, ("1010", "0000")), 10)

    def test_uniform_rejected(self, z1z3):
        with pytest.raises(ValueError):
            sample_positive(z1z3, DistributionSpec("uniform", 4), 10)


class TestExtractClassifier:
    def test_padded_target(self, z1z3):
        p = pad_adfa(z1z3, 4).dfa
        h = extract_classifier(lambda x: nsp_label_vector(p, x))
        for u in words(4):
            assert h(u) == z1z3.accepts(u)

    def test_constant(self):
        h = extract_classifier(constant_learner(None))
        assert all(h(u) == 1 for u in words(3))

    def test_dead(self):
        dead = empty_dfa()
        h = extract_classifier(lambda x: nsp_label_vector(dead, x))
        assert all(h(u) == 0 for u in words(3))

    def test_single_corrupted_row(self, z1z3):
        p = pad_adfa(z1z3, 4).dfa
        target = "0110"

        def hyp(x):
            rows = list(nsp_label_vector(p, x).rows)
            if x[:-1] == target:
                (c0, c1), mem = rows[4]
                rows[4] = ((1 - c0, c1), mem)
            return NspLabels(rows)

        h = extract_classifier(hyp)
        assert [u for u in words(4) if h(u) != z1z3.accepts(u)] == [target]

    def test_shape_checked(self):
        h = extract_classifier(lambda x: NspLabels([((1, 1), 0)]))
        with pytest.raises(ShapeMismatchError):
            h("01")


class TestRunReduction:
    target = monomial_to_adfa(Monomial(1, {1}))

    def test_oracle(self):
        d = DistributionSpec("uniform", 1, seed=0)
        r = run_reduction(self.target, 1, d, 500, oracle_learner(self.target, 1))
        assert r.nsp_error_estimate == 0
        assert r.classification_error_estimate == 0
        assert r.domination_holds
        assert r.exhaustive and r.eval_size == 2
        assert r.train_nsp_loss == 0

    def test_constant(self):
        d = DistributionSpec("uniform", 1, seed=0)
        r = run_reduction(self.target, 1, d, 500, constant_learner)
        assert r.nsp_error_estimate == 1
        assert r.classification_error_estimate == Fraction(1, 2)
        assert r.domination_holds

    def test_state_merge(self):
        d = DistributionSpec("uniform", 1, seed=0)
        r = run_reduction(self.target, 1, d, 500, make_learner("state-merge", {"max_states": 8}))
        assert r.train_nsp_loss == 0
        assert r.nsp_error_estimate == 0
        assert r.domination_holds
        assert r.learner.startswith("state-merge")

    def test_sampled_evaluation(self, z1z3):
        d = DistributionSpec("uniform", 4, seed=2)
        r = run_reduction(z1z3, 4, d, 50, make_learner("prefix-tree"), eval_size=300)
        assert not r.exhaustive
        assert r.eval_size == 300
        assert r.classification_error_estimate <= r.nsp_error_estimate
        assert r.domination_holds

    @settings(max_examples=15, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 10 ** 6), st.sampled_from(["prefix-tree", "state-merge",
                                                                          "constant"]))
    def test_domination(self, n, seed, name):
        a = random_adfa(n, n + 8, seed)
        d = DistributionSpec("uniform", n, seed=seed)
        r = run_reduction(a, n, d, 20, make_learner(name))
        assert r.pointwise_violations == 0
        assert r.classification_error_estimate <= r.nsp_error_estimate

    def test_length_mismatch(self, z1z3):
        with pytest.raises(ValueError):
            run_reduction(z1z3, 4, DistributionSpec("uniform", 3), 10, constant_learner)

    def test_report_dict(self):
        r = run_reduction(self.target, 1, DistributionSpec("uniform", 1), 10, constant_learner)
        d = r.to_dict()
        assert d["classification_error_estimate"] == {"value": "1/2", "float": 0.5}


class TestConfig:
    base = {"target": {"monomial": "+1,-3"}, "N": 4, "distribution": {"kind": "uniform"},
            "m": 100, "learner": "conjunction"}

    def test_valid(self):
        validate_config(self.base)
        r = run_config(self.base)
        # a padded target is not a monomial, so only domination is guaranteed here
        assert r.domination_holds

    def test_learner_object(self):
        cfg = dict(self.base, learner={"name": "state-merge", "max_states": 10})
        assert run_config(cfg).learner.startswith("state-merge")

    def test_generated_target(self):
        cfg = dict(self.base, target={"generate": {"max_states": 10, "seed": 3}}, learner="oracle")
        r = run_config(cfg)
        assert r.nsp_error_estimate == 0

    def test_target_file(self, tmp_path, z1z3):
        (tmp_path / "a.json").write_text(z1z3.to_json())
        cfg = dict(self.base, target="a.json", learner="oracle")
        assert run_config(cfg, base_dir=str(tmp_path)).classification_error_estimate == 0

    @pytest.mark.parametrize("bad", [
        {"N": 4},
        {"target": {"monomial": "+1"}, "N": -1, "distribution": {"kind": "uniform"}, "m": 1,
         "learner": "constant"},
        {"target": {"monomial": "+1"}, "N": 4, "distribution": {"kind": "weird"}, "m": 1,
         "learner": "constant"},
        {"target": {"monomial": "+1"}, "N": 4, "distribution": {"kind": "uniform"}, "m": 1,
         "learner": "constant", "extra": True},
    ])
    def test_invalid(self, bad):
        with pytest.raises(jsonschema.ValidationError):
            validate_config(bad)

    def test_unknown_learner(self):
        with pytest.raises(ValueError):
            run_config(dict(self.base, learner="magic"))


def test_random_stream_independent_of_global_state(z1z3):
    d = DistributionSpec("uniform-positive", 4, seed=11, target=z1z3)
    first = Sampler(d).draw(20)
    random.seed(12345)
    random.random()
    assert Sampler(d).draw(20) == first
