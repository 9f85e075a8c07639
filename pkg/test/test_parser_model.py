"""
Stack-LSTM parser network and the multilingual model around it
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from polyparse.autodiff import backward
from polyparse.autodiff.gradcheck import check_gradients
from polyparse.errors import UnknownLanguageError
from polyparse.parsing import DropoutState, SHIFT, ActionKind, apply, initial_configuration, legal_actions
from polyparse.parsing.parser_model import legal_action_ids

from conftest import make_sentence, small_config, toy_model


def _no_dropout():
    return DropoutState(mu=0.0, fine_pos_rate=0.0, unk_rate=0.0, rng=np.random.default_rng(42))


@pytest.fixture
def delex():
    return toy_model(small_config())


@pytest.fixture
def lang_id():
    return toy_model(small_config(language_vector="lang-id"))


class TestLegalActionIds:
    def test_layout(self):
        kinds = frozenset({ActionKind.SHIFT, ActionKind.REDUCE_RIGHT})
        assert legal_action_ids(kinds, 2) == [0, 2, 4]
        assert legal_action_ids(frozenset({ActionKind.REDUCE_LEFT}), 2) == [1, 3]


class TestParserState:
    def test_zero_weights_give_zero_state(self, delex):
        model, _ = delex
        parser = model.parser
        parser.W.value.fill(0)
        parser.W_bias.value.fill(0)
        H = model.config.lstm_dim
        p = parser.parser_state(parser.stack_empty, parser.buffer_empty, parser.action_empty)
        assert_array_equal(p.value, np.zeros(model.config.state_dim))
        assert parser.W.value.shape == (model.config.state_dim, 3 * H)

    def test_state_reads_language_embedding(self, lang_id):
        model, _ = lang_id
        H, lang = model.config.lstm_dim, model.config.lang_dim
        assert model.parser.W.value.shape == (model.config.state_dim, 3 * H + lang)
        assert model.parser.action_lstm.input_dim == model.config.action_dim + lang

    def test_single_legal_action_has_probability_one(self, delex):
        model, _ = delex
        parser = model.parser
        p = parser.parser_state(parser.stack_empty, parser.buffer_empty, parser.action_empty)
        probs = parser.action_distribution(p, [0])
        assert probs[0] == pytest.approx(1.0)
        assert probs[1:].sum() == 0.0

    def test_distribution_sums_to_one(self, delex):
        model, _ = delex
        parser = model.parser
        p = parser.parser_state(parser.stack_empty, parser.buffer_empty, parser.action_empty)
        probs = parser.action_distribution(p, list(range(parser.n_actions)))
        assert probs.sum() == pytest.approx(1.0)
        assert np.all(probs > 0)

    def test_composition_shape(self, delex):
        model, _ = delex
        parser = model.parser
        x = model.store.constant(np.ones(parser.token_dim))
        composed = parser.subtree_composition(x, x, 0)
        assert composed.shape == (parser.token_dim,)
        assert np.all(np.abs(composed.value) < 1)


class TestGreedyParse:
    def test_well_formed_trees(self, lang_id):
        model, sentences = lang_id
        for sentence in sentences["aa"] + sentences["bb"]:
            result = model.parse_result(sentence)
            assert len(result.actions) == 2 * len(sentence)
            assert result.tree.is_valid()
            assert all(lp <= 0 for lp in result.log_probs)

    def test_single_token_attaches_to_root(self, delex):
        model, _ = delex
        sentence = model.prepare(make_sentence([("kat", "NOUN", 0, "root")], language="aa"))
        result = model.parse_result(sentence)
        assert result.tree.heads == (0,)
        assert result.actions[0] == SHIFT
        assert result.actions[1].kind is ActionKind.REDUCE_RIGHT
        assert result.log_probs[0] == 0.0

    def test_parse_returns_relation_strings(self, delex):
        model, sentences = delex
        raw = make_sentence([("la", "DET", 2, "det"), ("kat", "NOUN", 0, "root")], language="aa")
        parsed = model.parse(raw)
        assert all(t.pred_deprel in model.vocab.deprels for t in parsed)
        assert [t.gold_head for t in parsed] == [2, 0]

    def test_deterministic(self, lang_id):
        model, sentences = lang_id
        sentence = sentences["bb"][0]
        first = model.parse_result(sentence)
        second = model.parse_result(sentence)
        assert first.actions == second.actions
        assert first.log_probs == second.log_probs

    def test_unknown_language(self, lang_id):
        model, _ = lang_id
        with pytest.raises(UnknownLanguageError):
            model.parse(make_sentence([("x", "NOUN", 0, "root")], language="zz"))


class TestSentenceLoss:
    def test_uniform_scores_give_log_of_legal_counts(self, delex):
        model, sentences = delex
        model.parser.G.value.fill(0)
        model.parser.q.value.fill(0)
        sentence = sentences["aa"][0]
        gold = model.gold_actions(sentence)

        expected = 0.0
        config = initial_configuration(len(sentence))
        for action in gold:
            expected += math.log(len(legal_action_ids(legal_actions(config), model.parser.n_labels)))
            config = apply(config, action)
        loss = model.sentence_loss(sentence, _no_dropout(), training=True)
        assert loss.parse == pytest.approx(expected, rel=1e-5)
        assert loss.tag == 0.0

    def test_gradients_reach_every_parser_table(self, lang_id):
        model, sentences = lang_id
        backward(model.sentence_loss(sentences["aa"][0], _no_dropout()).total)
        for name in ("parser.W", "parser.G", "parser.compose.U", "parser.action_embed", "lang.L"):
            assert np.any(model.store[name].grad != 0), name


class TestGradients:
    def test_joint_model_gradcheck(self, lexical_resources):
        config = small_config(
            lexical=True, joint_tagging=True, language_vector="lang-id", precision="float64",
        )
        model, sentences = toy_model(config, lexical_resources)
        sentence = min(sentences["aa"], key=len)
        gold = model.gold_actions(sentence)

        def loss():
            return model.sentence_loss(sentence, _no_dropout(), training=True, gold_actions=gold).total

        results = check_gradients(loss, model.store.trainable(), max_entries=5, rng=np.random.default_rng(42))
        assert len(results) == len(model.store.trainable())
        for result in results:
            assert result.passed(), result

    def test_dropped_tag_slice_decouples_parser_from_tagger(self, lexical_resources):
        config = small_config(lexical=True, joint_tagging=True, language_vector="lang-id", precision="float64")
        model, sentences = toy_model(config, lexical_resources)
        sentence = sentences["bb"][0]

        def always_dropped():
            return DropoutState(mu=1.0, fine_pos_rate=0.0, unk_rate=0.0, rng=np.random.default_rng(42))

        before = model.sentence_loss(sentence, always_dropped()).parse
        model.store["tagger.out.W"].value[:] = np.random.default_rng(1).normal(size=model.store["tagger.out.W"].shape)
        after = model.sentence_loss(sentence, always_dropped()).parse
        assert after == pytest.approx(before, abs=1e-12)

    def test_joint_loss_is_tag_plus_parse(self, lexical_resources):
        config = small_config(lexical=True, joint_tagging=True, precision="float64")
        model, sentences = toy_model(config, lexical_resources)
        loss = model.sentence_loss(sentences["aa"][1], _no_dropout())
        assert loss.tag > 0
        assert float(loss.total.value) == pytest.approx(loss.parse + loss.tag)
