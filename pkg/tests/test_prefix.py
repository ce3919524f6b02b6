import pytest

from absakit.prefix import (
    PrefixKind,
    PrefixSpec,
    applicable_prefixes,
    build_ner_prefix,
    build_noise_prefix,
    build_re_prefix,
    load_noise_vocabulary,
    select_re_pair,
)
from absakit.types import GoldAnswer, Polarity, Subtask, TaskInstance

TABLE_SENTENCE = (
    "I am pleased with the fast log on, speedy WiFi connection and the long "
    "battery life (>6hrs)."
)


def _instance(subtask, text, targets, sentence_aspects, target_span=None, gold=None):
    if gold is None:
        gold = GoldAnswer.polarity(Polarity.POSITIVE)
        if subtask == Subtask.ATE:
            gold = GoldAnswer.term_set(t for t, _ in sentence_aspects)
    return TaskInstance(
        instance_id="t1", subtask=subtask, text=text, target_aspects=targets,
        gold=gold, sentence_aspects=sentence_aspects, target_span=target_span,
    )


class TestNerPrefix:
    def test_published_example(self):
        assert build_ner_prefix(TABLE_SENTENCE) == (
            "Definition: Given the following context, output the relevant entities "
            "in it. Reason the answer step-by-step. Context: " + TABLE_SENTENCE
        )

    def test_single_char_context(self):
        assert build_ner_prefix("x").endswith("Context: x")

    def test_empty_text_rejected(self):
        with pytest.raises(ValueError):
            build_ner_prefix("")


class TestRePrefix:
    def test_published_example(self):
        out = build_re_prefix(TABLE_SENTENCE, "log on", "WiFi connection")
        assert out == (
            "Definition: Solve a relation extraction (RE) task. Given the context, "
            "output the most precise semantic relation between the entities 'log on' "
            "and 'WiFi connection'. In cases where there is no relationship the "
            "output should be NONE. Reason the answer step-by-step. Context: "
            + TABLE_SENTENCE
        )

    def test_each_entity_quoted_once(self):
        out = build_re_prefix(
            "BEST spicy tuna roll , great asian salad .", "spicy tuna roll", "asian salad"
        )
        assert out.count("'spicy tuna roll'") == 1
        assert out.count("'asian salad'") == 1

    def test_identical_entities_rejected(self):
        with pytest.raises(ValueError):
            build_re_prefix("a b c", "b", "b")

    def test_missing_entity_named(self):
        with pytest.raises(ValueError, match="quartz"):
            build_re_prefix("a b c", "b", "quartz")


class TestNoisePrefix:
    def test_exact_word_count(self):
        vocab = load_noise_vocabulary()
        for count in (1, 7, 50, 200):
            out = build_noise_prefix(vocab, seed=3, word_count=count)
            assert out.startswith("Definition: ")
            assert len(out[len("Definition: "):].split(" ")) == count

    def test_reproducible_and_seed_sensitive(self):
        vocab = load_noise_vocabulary()
        a1 = build_noise_prefix(vocab, 42, 50)
        a2 = build_noise_prefix(vocab, 42, 50)
        b = build_noise_prefix(vocab, 43, 50)
        assert a1 == a2
        assert a1 != b

    def test_100_seed_pairs_distinct(self):
        vocab = load_noise_vocabulary()
        outputs = {build_noise_prefix(vocab, seed, 50) for seed in range(100)}
        assert len(outputs) == 100

    def test_words_come_from_vocab(self):
        vocab = load_noise_vocabulary()
        out = build_noise_prefix(vocab, 5, 30)
        assert set(out[len("Definition: "):].split(" ")) <= set(vocab.words)

    def test_spec_validation(self):
        from absakit.types import ConfigError
        with pytest.raises(ConfigError):
            PrefixSpec(kind=PrefixKind.NOISE)  # missing seed
        with pytest.raises(ConfigError):
            PrefixSpec(kind=PrefixKind.RE, entity_pair=("a", "a"))
        with pytest.raises(ConfigError):
            PrefixSpec(kind=PrefixKind.NER, entity_pair=("a", "b"))


class TestApplicability:
    def test_ate_never_gets_re(self):
        inst = _instance(Subtask.ATE, "The menu and service.", [],
                         [("menu", 4), ("service", 13)])
        assert applicable_prefixes(inst) == {
            PrefixKind.NO_PREFIX, PrefixKind.NER, PrefixKind.NOISE
        }

    def test_sentihood_never_gets_re(self):
        inst = _instance(Subtask.SENTIHOOD_ATSC, "LOCATION1 is safe near LOCATION2.",
                         ["LOCATION1", "safety"],
                         [("LOCATION1", 0), ("LOCATION2", 23)])
        assert PrefixKind.RE not in applicable_prefixes(inst)

    def test_two_aspect_aooe_gets_re(self):
        inst = _instance(Subtask.AOOE, "BEST spicy tuna roll , great asian salad .",
                         ["spicy tuna roll"],
                         [("spicy tuna roll", 5), ("asian salad", 29)], target_span=(5, 20),
                         gold=GoldAnswer.opinion("best"))
        assert PrefixKind.RE in applicable_prefixes(inst)

    def test_single_aspect_atsc_excludes_re(self):
        inst = _instance(Subtask.ATSC, "The menu was great.", ["menu"], [("menu", 4)],
                         target_span=(4, 8))
        assert PrefixKind.RE not in applicable_prefixes(inst)

    def test_duplicate_aspect_terms_do_not_count_twice(self):
        inst = _instance(Subtask.ATSC, "menu here, menu there", ["menu"],
                         [("menu", 0), ("Menu", 11)], target_span=(0, 4))
        assert inst.distinct_aspect_count() == 1
        assert PrefixKind.RE not in applicable_prefixes(inst)


class TestSelectRePair:
    def test_ersa_pair_verbatim(self):
        inst = _instance(Subtask.ERSA, "brain disease links neurotrophic factor.",
                         ["brain disease", "neurotrophic factor"],
                         [("brain disease", 0), ("neurotrophic factor", 20)])
        assert select_re_pair(inst) == ("brain disease", "neurotrophic factor")

    def test_two_aspect_pair(self):
        inst = _instance(Subtask.AOOE, "BEST spicy tuna roll , great asian salad .",
                         ["spicy tuna roll"],
                         [("spicy tuna roll", 5), ("asian salad", 29)], target_span=(5, 20),
                         gold=GoldAnswer.opinion("best"))
        assert select_re_pair(inst) == ("spicy tuna roll", "asian salad")

    def test_nearest_neighbor_for_middle_target(self):
        # target at 20; "near" at 14 is closer than "far" at 40
        inst = _instance(Subtask.ATSC, "x" * 50, ["mid"],
                         [("far", 40), ("mid", 20), ("near", 14)], target_span=(20, 23))
        assert select_re_pair(inst) == ("mid", "near")

    def test_tie_broken_leftmost(self):
        inst = _instance(Subtask.ATSC, "x" * 50, ["mid"],
                         [("left", 10), ("mid", 20), ("right", 30)], target_span=(20, 23))
        assert select_re_pair(inst) == ("mid", "left")

    def test_no_second_aspect_errors(self):
        inst = _instance(Subtask.ATSC, "The menu was great.", ["menu"], [("menu", 4)],
                         target_span=(4, 8))
        with pytest.raises(ValueError):
            select_re_pair(inst)
