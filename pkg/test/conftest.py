"""
Shared fixtures: CoNLL-U snippets, a toy two-language corpus and small
model configurations.
"""

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pytest

from polyparse.config import RunConfig
from polyparse.lexicon.resources import EmbeddingTable
from polyparse.parsing.representations import LexicalResources
from polyparse.training import build_model, prepare_sentences
from polyparse.treebank.conllu import Sentence, Token


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: trains models for many epochs")


# word lines and comments only, so read -> write is byte-identical
CANONICAL_CONLLU = (
    "# sent_id = 1\n"
    "# language = en\n"
    "1\tThe\tthe\tDET\tDT\t_\t2\tdet\t_\t_\n"
    "2\tcat\tcat\tNOUN\tNN\tNumber=Sing\t3\tnsubj\t_\t_\n"
    "3\tsleeps\tsleep\tVERB\tVBZ\t_\t0\troot\t_\tSpaceAfter=No\n"
    "4\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\t_\n"
    "\n"
    "# sent_id = 2\n"
    "1\tDogs\tdog\tNOUN\tNNS\t_\t2\tnsubj\t_\t_\n"
    "2\tbark\tbark\tVERB\tVBP\t_\t0\troot\t_\t_\n"
    "\n"
)

# multiword token, relation subtype and no language comment
MULTIWORD_CONLLU = (
    "# sent_id = fr-1\n"
    "1-2\tdu\t_\t_\t_\t_\t_\t_\t_\t_\n"
    "1\tde\tde\tADP\t_\t_\t3\tcase\t_\t_\n"
    "2\tle\tle\tDET\t_\t_\t3\tdet\t_\t_\n"
    "3\tChat\tchat\tNOUN\t_\t_\t4\tnmod:poss\t_\t_\n"
    "4\tdort\tdormir\tVERB\t_\t_\t0\troot\t_\t_\n"
    "\n"
)


@pytest.fixture
def canonical_conllu(tmp_path):
    path = tmp_path / "canonical.conllu"
    path.write_bytes(CANONICAL_CONLLU.encode("utf-8"))
    return path


@pytest.fixture
def multiword_conllu(tmp_path):
    path = tmp_path / "multiword.conllu"
    path.write_bytes(MULTIWORD_CONLLU.encode("utf-8"))
    return path


def make_sentence(
    rows: Sequence[Tuple[str, str, int, str]],
    language: Optional[str] = None,
    xpos: Optional[Sequence[str]] = None,
) -> Sentence:
    """Sentence from (form, upos, head, deprel) rows"""
    tokens = tuple(
        Token(
            index=k,
            form=form,
            upos=upos,
            xpos=xpos[k - 1] if xpos is not None else None,
            gold_head=head,
            gold_deprel=deprel,
        )
        for k, (form, upos, head, deprel) in enumerate(rows, start=1)
    )
    return Sentence(tokens, language=language)


# ============================================
# Toy two-language corpus
# ============================================

# "aa" is subject-verb-object, "bb" subject-object-verb; both put
# determiners and adjectives before the noun
LEXICON = {
    "aa": {
        "DET": ["la", "un"],
        "ADJ": ["grand", "vert"],
        "NOUN": ["kat", "hund", "fisk", "bord"],
        "VERB": ["ser", "har", "tar"],
    },
    "bb": {
        "DET": ["ko", "so"],
        "ADJ": ["ooki", "midori"],
        "NOUN": ["neko", "inu", "sakana", "tsukue"],
        "VERB": ["miru", "motsu", "toru"],
    },
}
FINE_TAGS = {"DET": "D", "ADJ": "A", "NOUN": "N", "VERB": "V"}


def _noun_phrase(language: str, rng: np.random.Generator, role: str) -> List[Tuple[str, str, str, str]]:
    """(key, form, upos, relation) items; the noun's head is filled in by the caller"""
    words = LEXICON[language]
    items = [(f"{role}.det", str(rng.choice(words["DET"])), "DET", "det")]
    if rng.random() < 0.5:
        items.append((f"{role}.adj", str(rng.choice(words["ADJ"])), "ADJ", "amod"))
    items.append((role, str(rng.choice(words["NOUN"])), "NOUN", "nsubj" if role == "subj" else "dobj"))
    return items


def toy_sentence(language: str, rng: np.random.Generator) -> Sentence:
    subject = _noun_phrase(language, rng, "subj")
    obj = _noun_phrase(language, rng, "obj")
    verb = [("verb", str(rng.choice(LEXICON[language]["VERB"])), "VERB", "root")]
    items = subject + verb + obj if language == "aa" else subject + obj + verb

    position = {key: k for k, (key, _, _, _) in enumerate(items, start=1)}
    rows = []
    for key, form, upos, deprel in items:
        if key == "verb":
            head = 0
        elif key in ("subj", "obj"):
            head = position["verb"]
        else:
            head = position[key.split(".")[0]]
        rows.append((form, upos, head, deprel))
    return make_sentence(rows, language=language, xpos=[FINE_TAGS[upos] for _, upos, _, _ in rows])


def toy_corpus(n_per_language: int, seed: int = 0) -> Dict[str, List[Sentence]]:
    rng = np.random.default_rng(seed)
    return {lang: [toy_sentence(lang, rng) for _ in range(n_per_language)] for lang in ("aa", "bb")}


def toy_embeddings(dim: int = 6, seed: int = 0) -> EmbeddingTable:
    rng = np.random.default_rng(seed)
    words = sorted({w for lexicon in LEXICON.values() for forms in lexicon.values() for w in forms})
    return EmbeddingTable(words, rng.normal(size=(len(words), dim)))


def small_config(**changes) -> RunConfig:
    """Tiny dimensions so models build and train quickly"""
    values = dict(
        word_dim=6,
        upos_dim=5,
        xpos_dim=4,
        cluster_dim=3,
        lang_dim=4,
        lstm_dim=8,
        lstm_layers=1,
        action_dim=4,
        relation_dim=4,
        state_dim=8,
        tagger_input_dim=6,
        tagger_hidden_dim=5,
        max_epochs=3,
        patience=2,
    )
    values.update(changes)
    return RunConfig.from_dict(values)


@pytest.fixture
def corpus():
    return toy_corpus(12)


@pytest.fixture
def embeddings():
    return toy_embeddings()


@pytest.fixture
def lexical_resources(embeddings):
    return LexicalResources(pretrained=embeddings)


def prepared_corpus(n_per_language: int = 6, resources: Optional[LexicalResources] = None, seed: int = 0):
    resources = resources or LexicalResources()
    return {lang: prepare_sentences(s, resources, lang) for lang, s in toy_corpus(n_per_language, seed).items()}


def toy_model(config: RunConfig, resources: Optional[LexicalResources] = None, n_per_language: int = 6, seed: int = 42):
    """A freshly initialized model over the toy corpus, with its prepared sentences"""
    resources = resources or LexicalResources()
    sentences = prepared_corpus(n_per_language, resources)
    return build_model(config, sentences, resources, np.random.default_rng(seed)), sentences
