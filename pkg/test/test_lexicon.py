"""
Resource loaders, cross-lingual projection and language vectors
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from polyparse.errors import ResourceFormatError, ShapeError, UnknownLanguageError
from polyparse.lexicon.language import (
    LanguageVectorMode,
    language_vector,
    language_vector_table,
    read_language_vectors,
    write_language_vectors,
)
from polyparse.lexicon.projection import project_clusters, robust_projection
from polyparse.lexicon.resources import (
    Alignment,
    EmbeddingTable,
    attach_clusters,
    load_clusters,
    load_dictionary,
    load_embeddings,
    load_wals,
    write_clusters,
    write_embeddings,
)
from polyparse.treebank import preprocess

from conftest import make_sentence


@pytest.fixture
def english():
    return EmbeddingTable(
        ["dog", "hound", "play", "plays"],
        np.array([[1.0, 0.0], [0.0, 1.0], [2.0, 2.0], [4.0, 0.0]]),
    )


class TestEmbeddings:
    def test_unk_row_is_zero(self, english):
        assert english.unk_id == 4
        assert english.n_rows == 5
        assert_array_equal(english.vector("cat"), [0.0, 0.0])

    def test_language_prefixed_lookup(self):
        table = EmbeddingTable(["de:hund", "hund"], np.array([[1.0], [2.0]]))
        assert table.row("hund", "de") == 0
        assert table.row("hund", "fr") == 1
        assert table.row(None) == table.unk_id

    def test_load_with_and_without_header(self, tmp_path):
        plain = tmp_path / "plain.vec"
        plain.write_text("dog 1 2 3\ncat 4 5 6\n", encoding="utf-8")
        headed = tmp_path / "headed.vec"
        headed.write_text("2 3\ndog 1 2 3\ncat 4 5 6\n", encoding="utf-8")
        a, b = load_embeddings(plain), load_embeddings(headed)
        assert a.words == b.words == ["dog", "cat"]
        assert_array_equal(a.vector("cat"), [4.0, 5.0, 6.0])
        assert_array_equal(a.matrix, b.matrix)

    def test_dimension_mismatch_reports_line(self, tmp_path):
        path = tmp_path / "bad.vec"
        path.write_text("dog 1 2 3\ncat 4 5\n", encoding="utf-8")
        with pytest.raises(ResourceFormatError) as excinfo:
            load_embeddings(path)
        assert excinfo.value.line_number == 2

    def test_non_numeric(self, tmp_path):
        path = tmp_path / "bad.vec"
        path.write_text("dog 1 x\n", encoding="utf-8")
        with pytest.raises(ResourceFormatError):
            load_embeddings(path)

    def test_duplicates_keep_last(self, tmp_path):
        path = tmp_path / "dup.vec"
        path.write_text("dog 1 1\ndog 2 2\n", encoding="utf-8")
        assert_array_equal(load_embeddings(path).vector("dog"), [2.0, 2.0])

    def test_write_then_load(self, english, tmp_path):
        path = tmp_path / "out.vec"
        write_embeddings(english, path)
        assert_array_equal(load_embeddings(path).matrix, english.matrix)

    def test_mixed_shapes(self):
        with pytest.raises(ShapeError):
            EmbeddingTable.from_mapping({"a": np.zeros(2), "b": np.zeros(3)})


class TestClusters:
    def test_load_with_frequency(self, tmp_path):
        path = tmp_path / "clusters.txt"
        path.write_text("0110\tchat\t27\n0111\tdog\n", encoding="utf-8")
        assert load_clusters(path) == {"chat": "0110", "dog": "0111"}

    def test_bad_frequency(self, tmp_path):
        path = tmp_path / "clusters.txt"
        path.write_text("0110\tchat\tmany\n", encoding="utf-8")
        with pytest.raises(ResourceFormatError):
            load_clusters(path)

    def test_write_is_sorted(self, tmp_path):
        path = tmp_path / "clusters.txt"
        write_clusters({"b": "1", "a": "0"}, path)
        assert path.read_text(encoding="utf-8") == "0\ta\n1\tb\n"
        assert load_clusters(path) == {"a": "0", "b": "1"}

    def test_attach_prefers_language_key(self):
        sentence = preprocess(make_sentence([("Chat", "NOUN", 0, "root")], language="fr"))
        clusters = {"fr:chat": "10", "chat": "01"}
        assert attach_clusters(sentence, clusters).tokens[0].cluster == "10"
        assert attach_clusters(sentence.with_language("de"), clusters).tokens[0].cluster == "01"


class TestDictionaryAndWals:
    def test_load_dictionary_lowercases(self, tmp_path):
        path = tmp_path / "dict.tsv"
        path.write_text("de\tHund\tDog\t0.9\n", encoding="utf-8")
        assert load_dictionary(path) == [Alignment("de", "hund", "dog", 0.9)]

    @pytest.mark.parametrize("row", ["de\thund\tdog\n", "de\thund\tdog\tlots\n", "de\thund\tdog\t-1\n"])
    def test_bad_dictionary_rows(self, tmp_path, row):
        path = tmp_path / "dict.tsv"
        path.write_text(row, encoding="utf-8")
        with pytest.raises(ResourceFormatError):
            load_dictionary(path)

    def test_wals_conflicting_genus(self, tmp_path):
        path = tmp_path / "wals.tsv"
        path.write_text("de\tGermanic\t81A=SOV\nde\tRomance\t82A=SV\n", encoding="utf-8")
        with pytest.raises(ResourceFormatError):
            load_wals(path)

    def test_wals_bad_feature_field(self, tmp_path):
        path = tmp_path / "wals.tsv"
        path.write_text("de\tGermanic\t81A\n", encoding="utf-8")
        with pytest.raises(ResourceFormatError):
            load_wals(path)


class TestRobustProjection:
    def test_weighted_average_of_translations(self, english):
        dictionary = [
            Alignment("de", "hund", "dog", 0.75),
            Alignment("de", "hund", "hound", 0.25),
        ]
        table, stats = robust_projection(english, dictionary)
        assert_allclose(table.vector("hund", "de"), [0.75, 0.25], atol=1e-12)
        assert stats.aligned == 1

    def test_weights_renormalized_over_known_translations(self, english):
        dictionary = [
            Alignment("de", "hund", "dog", 0.3),
            Alignment("de", "hund", "wolf", 0.7),
        ]
        table, _ = robust_projection(english, dictionary)
        assert_allclose(table.vector("hund", "de"), [1.0, 0.0], atol=1e-12)

    def test_edit_distance_neighbours_averaged(self, english):
        dictionary = [
            Alignment("xx", "play", "play", 1.0),
            Alignment("xx", "plays", "plays", 1.0),
        ]
        table, stats = robust_projection(english, dictionary, {"xx": ["playz", "qqqqq", "play"]})
        assert_allclose(table.vector("playz", "xx"), [3.0, 1.0], atol=1e-12)
        assert table.row("qqqqq", "xx") == table.unk_id
        assert (stats.aligned, stats.edit_distance, stats.unknown) == (2, 1, 1)

    def test_english_kept_under_language_key(self, english):
        table, _ = robust_projection(english, [Alignment("de", "hund", "dog", 1.0)], english_language="en")
        assert_array_equal(table.vector("hound", "en"), [0.0, 1.0])

    def test_empty_dictionary(self, english):
        with pytest.raises(ResourceFormatError):
            robust_projection(english, [])


class TestClusterProjection:
    def test_most_probable_translation_wins(self):
        clusters = {"dog": "0110", "hound": "1110"}
        dictionary = [
            Alignment("de", "hund", "dog", 0.4),
            Alignment("de", "hund", "hound", 0.6),
        ]
        assert project_clusters(clusters, dictionary) == {"de:hund": "1110"}

    def test_tie_takes_smallest_cluster(self):
        clusters = {"dog": "1", "hound": "0"}
        dictionary = [
            Alignment("de", "hund", "dog", 0.5),
            Alignment("de", "hund", "hound", 0.5),
        ]
        assert project_clusters(clusters, dictionary)["de:hund"] == "0"

    def test_empty_inputs(self):
        with pytest.raises(ResourceFormatError):
            project_clusters({}, [Alignment("de", "a", "b", 1.0)])
        with pytest.raises(ResourceFormatError):
            project_clusters({"a": "0"}, [])


class TestLanguageVectors:
    @pytest.fixture
    def wals(self, tmp_path):
        path = tmp_path / "wals.tsv"
        path.write_text(
            "de\tGermanic\t82A=SV\t83A=OV\t85A=Prep\n"
            "en\tGermanic\t82A=SV\t83A=VO\t85A=Prep\n"
            "sv\tGermanic\t82A=SV\n"
            "ja\tJapanese\t82A=SV\t83A=OV\t85A=Post\n",
            encoding="utf-8",
        )
        return load_wals(path)

    def test_lang_id_one_hot(self):
        vector = language_vector("fr", LanguageVectorMode.LANG_ID, ["de", "en", "fr"])
        assert_array_equal(vector, [0.0, 0.0, 1.0])

    def test_lang_id_unknown(self):
        with pytest.raises(UnknownLanguageError):
            language_vector("xx", LanguageVectorMode.LANG_ID, ["de", "en"])

    def test_none_is_empty(self):
        assert language_vector("de", LanguageVectorMode.NONE, ["de"]).shape == (0,)

    def test_word_order_blocks(self, wals):
        # 82A: [SV]; 83A: [OV, VO]; 85A: [Post, Prep]
        assert_array_equal(language_vector("de", LanguageVectorMode.WORD_ORDER, [], wals), [1, 1, 0, 0, 1])
        assert_array_equal(language_vector("ja", LanguageVectorMode.WORD_ORDER, [], wals), [1, 1, 0, 1, 0])

    def test_missing_value_filled_from_genus(self, wals):
        vector = language_vector("sv", LanguageVectorMode.WORD_ORDER, [], wals)
        assert_allclose(vector, [1, 0.5, 0.5, 0, 1])

    def test_full_wals_is_centred(self, wals):
        vector = language_vector("sv", LanguageVectorMode.FULL_WALS, [], wals)
        assert_allclose(vector, [1.0, 0.0, 0.0, -1.0, 1.0])

    def test_wals_mode_needs_table(self):
        with pytest.raises(ResourceFormatError):
            language_vector("de", LanguageVectorMode.WORD_ORDER, ["de"])

    def test_table_round_trip(self, wals, tmp_path):
        table = language_vector_table(["de", "ja", "sv"], LanguageVectorMode.FULL_WALS, wals)
        path = tmp_path / "vectors.tsv"
        write_language_vectors(table, path)
        restored = read_language_vectors(path)
        assert sorted(restored) == ["de", "ja", "sv"]
        for language, vector in table.items():
            assert_allclose(restored[language], vector)
