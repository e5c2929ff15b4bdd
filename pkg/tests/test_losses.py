import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from paraeval.labels import CLASS_ORDER, ParaphasiaLabel
from paraeval.losses import (
    ClassWeights,
    StepDistribution,
    class_weights_from_counts,
    multi_seq_loss,
    single_seq_loss,
)

C, P, N, S = ParaphasiaLabel.C, ParaphasiaLabel.P, ParaphasiaLabel.N, ParaphasiaLabel.S


def uniform_step(vocab, target=0):
    return StepDistribution(probabilities=tuple(1.0 / vocab for _ in range(vocab)), target_index=target)


def certain_step(vocab, target=0):
    probs = [0.0] * vocab
    probs[target] = 1.0
    return StepDistribution(probabilities=tuple(probs), target_index=target)


def step_with_target_prob(p, vocab=4, target=0):
    rest = (1.0 - p) / (vocab - 1)
    probs = [rest] * vocab
    probs[target] = p
    return StepDistribution(probabilities=tuple(probs), target_index=target)


class TestStepDistribution:
    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(ValueError):
            StepDistribution((0.5, 0.4), 0)

    def test_negative_probability_rejected(self):
        with pytest.raises(ValueError):
            StepDistribution((1.2, -0.2), 0)

    def test_target_in_range(self):
        with pytest.raises(ValueError):
            StepDistribution((0.5, 0.5), 2)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            StepDistribution((), 0)


class TestSingleSeqLoss:
    def test_uniform_four_way(self):
        assert single_seq_loss([uniform_step(4)]) == pytest.approx(1.3863, abs=1e-4)

    def test_certain_targets_zero_loss(self):
        assert single_seq_loss([certain_step(3, 1), certain_step(5, 4)]) == 0.0

    def test_uniform_closed_form(self):
        for steps, vocab in ((1, 2), (3, 4), (10, 7)):
            loss = single_seq_loss([uniform_step(vocab, t % vocab) for t in range(steps)])
            assert loss == pytest.approx(steps * math.log(vocab), abs=1e-9)

    def test_zero_target_probability_reported(self):
        bad = StepDistribution((1.0, 0.0), 1)
        with pytest.raises(ValueError, match="probability 0"):
            single_seq_loss([bad])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            single_seq_loss([])

    def test_additivity_over_concatenation(self):
        first = [uniform_step(4), step_with_target_prob(0.7)]
        second = [step_with_target_prob(0.2), uniform_step(3)]
        assert single_seq_loss(first + second) == pytest.approx(
            single_seq_loss(first) + single_seq_loss(second), abs=1e-12
        )

    def test_finite_difference_of_target_probability(self):
        p, h = 0.5, 1e-4
        base = single_seq_loss([step_with_target_prob(p)])
        bumped = single_seq_loss([step_with_target_prob(p + h)])
        assert bumped - base == pytest.approx(-math.log((p + h) / p), abs=1e-9)


class TestClassWeights:
    def test_equal_counts_unit_weights(self):
        weights = class_weights_from_counts({C: 10, P: 10, N: 10, S: 10})
        for cls_ in CLASS_ORDER:
            assert weights[cls_] == pytest.approx(1.0)

    def test_inverse_proportionality(self):
        weights = class_weights_from_counts({C: 90, P: 5, N: 4, S: 1})
        assert weights[S] / weights[C] == pytest.approx(90.0)
        assert weights[S] / weights[P] == pytest.approx(5.0)
        assert weights[S] / weights[N] == pytest.approx(4.0)
        assert sum(weights[c] for c in CLASS_ORDER) == pytest.approx(len(CLASS_ORDER))

    def test_scale_invariance(self):
        small = class_weights_from_counts({C: 90, P: 5, N: 4, S: 1})
        doubled = class_weights_from_counts({C: 180, P: 10, N: 8, S: 2})
        for cls_ in CLASS_ORDER:
            assert small[cls_] == pytest.approx(doubled[cls_])

    def test_zero_count_rejected(self):
        with pytest.raises(ValueError):
            class_weights_from_counts({C: 10, P: 0, N: 1, S: 1})

    def test_missing_class_rejected(self):
        with pytest.raises(ValueError):
            class_weights_from_counts({C: 10, P: 1, N: 1})

    def test_nonpositive_weight_rejected(self):
        with pytest.raises(ValueError):
            ClassWeights({C: 1.0, P: 1.0, N: 0.0, S: 1.0})


class TestMultiSeqLoss:
    def test_arithmetic_combination(self):
        asr = [step_with_target_prob(math.exp(-2.0), vocab=6)]
        para = [step_with_target_prob(math.exp(-4.0), vocab=4)]
        result = multi_seq_loss(asr, para, ClassWeights.uniform(), alpha=0.5)
        assert result.l_asr == pytest.approx(2.0, abs=1e-12)
        assert result.l_para == pytest.approx(4.0, abs=1e-12)
        assert result.l_total == pytest.approx(3.0, abs=1e-12)

    def test_alpha_limits(self):
        asr = [step_with_target_prob(0.5, vocab=6)]
        para = [step_with_target_prob(0.25, vocab=4)]
        weights = ClassWeights.uniform()
        eps = 1e-9
        near_asr = multi_seq_loss(asr, para, weights, alpha=1 - eps).l_total
        near_para = multi_seq_loss(asr, para, weights, alpha=eps).l_total
        assert near_asr == pytest.approx(multi_seq_loss(asr, para, weights, 0.5).l_asr, abs=1e-6)
        assert near_para == pytest.approx(multi_seq_loss(asr, para, weights, 0.5).l_para, abs=1e-6)

    def test_uniform_para_closed_form(self):
        for t in (1, 4, 9):
            asr = [certain_step(6) for _ in range(t)]
            para = [uniform_step(4, target=i % 4) for i in range(t)]
            result = multi_seq_loss(asr, para, ClassWeights.uniform(), alpha=0.5)
            assert result.l_para == pytest.approx(t * math.log(4), abs=1e-9)

    def test_affine_in_alpha(self):
        asr = [step_with_target_prob(0.4, vocab=6), uniform_step(6, 2)]
        para = [step_with_target_prob(0.6, vocab=4), uniform_step(4, 3)]
        weights = class_weights_from_counts({C: 20, P: 5, N: 3, S: 2})
        results = {a: multi_seq_loss(asr, para, weights, a) for a in (0.3, 0.5, 0.7)}
        l_asr = results[0.5].l_asr
        l_para = results[0.5].l_para
        for a, result in results.items():
            assert result.l_total == pytest.approx(a * l_asr + (1 - a) * l_para, abs=1e-12)
        slope = (results[0.7].l_total - results[0.3].l_total) / 0.4
        assert slope == pytest.approx(l_asr - l_para, abs=1e-9)

    def test_weighted_label_terms(self):
        weights = class_weights_from_counts({C: 8, P: 1, N: 2, S: 4})
        para = [step_with_target_prob(0.5, vocab=4, target=1)]  # target class P
        asr = [certain_step(6)]
        result = multi_seq_loss(asr, para, weights, alpha=0.5)
        assert result.l_para == pytest.approx(weights[P] * -math.log(0.5), abs=1e-12)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            multi_seq_loss([uniform_step(4)], [], ClassWeights.uniform(), 0.5)

    def test_alpha_bounds(self):
        steps = [uniform_step(4)]
        for alpha in (0.0, 1.0, -0.2, 2.0):
            with pytest.raises(ValueError):
                multi_seq_loss(steps, steps, ClassWeights.uniform(), alpha)

    def test_para_steps_must_cover_four_classes(self):
        with pytest.raises(ValueError):
            multi_seq_loss([uniform_step(4)], [uniform_step(3)], ClassWeights.uniform(), 0.5)


probabilities = st.integers(min_value=1, max_value=50).flatmap(
    lambda vocab: st.tuples(
        st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=vocab, max_size=vocab),
        st.integers(min_value=0, max_value=vocab - 1),
    )
)


@given(st.lists(probabilities, min_size=1, max_size=6))
def test_loss_is_nonnegative_and_zero_only_for_certainty(raw_steps):
    steps = []
    for weights, target in raw_steps:
        total = sum(weights)
        steps.append(StepDistribution(tuple(w / total for w in weights), target))
    loss = single_seq_loss(steps)
    assert loss >= 0.0
    if all(s.target_probability == 1.0 for s in steps):
        assert loss == 0.0
    else:
        assert loss > 0.0
