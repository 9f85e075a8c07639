"""
CoNLL-U reading, preprocessing and writing
"""

import io

import pytest

from polyparse.errors import ConlluFormatError, TreeStructureError
from polyparse.treebank import (
    DependencyTree,
    Treebank,
    base_relation,
    preprocess,
    read_conllu,
    write_conllu,
)

from conftest import CANONICAL_CONLLU, make_sentence


def _bytes(text: str) -> io.BytesIO:
    return io.BytesIO(text.encode("utf-8"))


class TestReadConllu:
    def test_reads_sentences_and_columns(self, canonical_conllu):
        tb = read_conllu(canonical_conllu, language="xx")
        assert len(tb) == 2
        assert tb.n_tokens == 6

        first = tb.sentences[0]
        assert first.language == "en"
        assert [t.form for t in first] == ["The", "cat", "sleeps", "."]
        assert [t.gold_head for t in first] == [2, 3, 0, 3]
        assert first.tokens[1].feats == "Number=Sing"
        assert first.tokens[2].misc == "SpaceAfter=No"
        assert first.metadata == ("# sent_id = 1", "# language = en")

    def test_language_flag_fills_missing_comment(self, canonical_conllu):
        tb = read_conllu(canonical_conllu, language="xx")
        assert [s.language for s in tb] == ["en", "xx"]
        assert tb.languages() == ["en", "xx"]

    def test_multiword_ranges_dropped(self, multiword_conllu):
        tb = read_conllu(multiword_conllu, language="fr")
        sentence = tb.sentences[0]
        assert [t.form for t in sentence] == ["de", "le", "Chat", "dort"]
        assert sentence.gold_tree().heads == (3, 3, 4, 0)

    def test_empty_nodes_dropped(self):
        text = (
            "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n"
            "1.1\tb\tb\tX\t_\t_\t_\t_\t1:dep\t_\n"
            "2\tc\tc\tX\t_\t_\t1\tdep\t_\t_\n\n"
        )
        tb = read_conllu(_bytes(text))
        assert [t.form for t in tb.sentences[0]] == ["a", "c"]

    def test_non_integer_head_reports_line(self):
        text = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n2\tb\tb\tX\t_\t_\tx\tdep\t_\t_\n\n"
        with pytest.raises(ConlluFormatError) as excinfo:
            read_conllu(_bytes(text))
        assert excinfo.value.line_number == 2
        assert "line 2" in str(excinfo.value)

    def test_wrong_column_count(self):
        with pytest.raises(ConlluFormatError):
            read_conllu(_bytes("1\ta\ta\tX\t_\t_\t0\troot\n\n"))

    def test_head_out_of_range(self):
        text = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n2\tb\tb\tX\t_\t_\t7\tdep\t_\t_\n\n"
        with pytest.raises(TreeStructureError):
            read_conllu(_bytes(text))

    def test_non_tree_sentences_skipped(self):
        two_roots = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n2\tb\tb\tX\t_\t_\t0\troot\t_\t_\n\n"
        self_loop = "1\ta\ta\tX\t_\t_\t1\troot\t_\t_\n\n"
        good = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n\n"
        tb = read_conllu(_bytes(two_roots + self_loop + good))
        assert len(tb) == 1
        assert tb.skipped == 2

    def test_unannotated_input_kept_without_tree_check(self):
        text = "1\ta\ta\tX\t_\t_\t_\t_\t_\t_\n2\tb\tb\tX\t_\t_\t_\t_\t_\t_\n\n"
        tb = read_conllu(_bytes(text), require_tree=False)
        assert len(tb) == 1
        assert not tb.sentences[0].is_annotated

    def test_empty_input(self):
        tb = read_conllu(_bytes(""))
        assert len(tb) == 0


class TestPreprocess:
    def test_base_relation(self):
        assert base_relation("nmod:poss") == "nmod"
        assert base_relation("acl:relcl") == "acl"
        assert base_relation("root") == "root"

    def test_lowercases_and_strips_subtypes(self, multiword_conllu):
        sentence = preprocess(read_conllu(multiword_conllu).sentences[0])
        assert sentence.tokens[2].lowercased_form == "chat"
        assert sentence.tokens[2].form == "Chat"
        assert sentence.tokens[2].gold_deprel == "nmod"

    def test_idempotent(self, multiword_conllu):
        once = preprocess(read_conllu(multiword_conllu).sentences[0])
        assert preprocess(once) == once


class TestWriteConllu:
    def test_round_trip_is_byte_identical(self, canonical_conllu):
        tb = read_conllu(canonical_conllu)
        sink = io.BytesIO()
        write_conllu(tb, sink)
        assert sink.getvalue() == CANONICAL_CONLLU.encode("utf-8")

    def test_writes_to_path(self, canonical_conllu, tmp_path):
        out = tmp_path / "copy.conllu"
        write_conllu(read_conllu(canonical_conllu), out)
        assert out.read_bytes() == canonical_conllu.read_bytes()

    def test_predictions_replace_gold_columns(self):
        sentence = make_sentence([("a", "X", 0, "root"), ("b", "X", 1, "dep")])
        predicted = sentence.with_predictions(
            DependencyTree.from_lists([2, 0], ["obj", "root"]), tags=["NOUN", "VERB"]
        )
        sink = io.BytesIO()
        write_conllu([predicted], sink)
        lines = sink.getvalue().decode("utf-8").splitlines()
        assert lines[0].split("\t")[3] == "NOUN"
        assert lines[0].split("\t")[6:8] == ["2", "obj"]
        assert lines[1].split("\t")[6:8] == ["0", "root"]

    def test_empty_treebank_writes_nothing(self):
        sink = io.BytesIO()
        write_conllu(Treebank([]), sink)
        assert sink.getvalue() == b""
