"""
polyparse command line
======================

    polyparse train --train en=en.conllu --train de=de.conllu --dev en=en.dev.conllu \\
        --preset language-id --embeddings multi.vec --model model.pp
    polyparse parse --model model.pp input.conllu -o output.conllu --workers 4
    polyparse tag --model model.pp input.conllu -o tagged.conllu
    polyparse eval gold.conllu output.conllu --tags
    polyparse analyze gold.conllu output.conllu
    polyparse projectivize in.conllu out.conllu
    polyparse build-lexicon --dictionary dict.tsv --english-embeddings en.vec --out lexicon/

Input "-" reads stdin and a missing -o writes stdout. Exit status is 0 when
the requested output was fully produced, 1 on data or configuration errors
and 2 on bad arguments.
"""

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Set

from . import __version__
from .config import INJECTION_POINTS, BlockDropoutVariant, load_run_config
from .errors import ConfigError, PolyparseError
from .lexicon.language import LanguageVectorMode, language_vector_table, write_language_vectors
from .lexicon.projection import project_clusters, robust_projection
from .lexicon.resources import load_clusters, load_dictionary, load_embeddings, load_wals, write_clusters, write_embeddings
from .log_config import setup_clean_logging
from .storage import load_model, save_model
from .training import evaluate, format_recall, class_recall, train
from .treebank.conllu import Sentence, Treebank, read_conllu, write_conllu
from .treebank.projectivity import is_projective, lift_nonprojective

logger = logging.getLogger(__name__)


# ============================================
# Argument helpers
# ============================================

def _language_path(value: str) -> tuple:
    language, sep, path = value.partition("=")
    if not sep or not language or not path:
        raise argparse.ArgumentTypeError(f"expected LANG=PATH, got '{value}'")
    return language, path


def _read(source: str, language: Optional[str] = None, require_tree: bool = True) -> Treebank:
    if source == "-":
        return read_conllu(sys.stdin.buffer, language=language, split="test", require_tree=require_tree)
    return read_conllu(source, language=language, split="test", require_tree=require_tree)


def _write(sentences: Sequence[Sentence], target: Optional[str]) -> None:
    if target is None or target == "-":
        write_conllu(sentences, sys.stdout.buffer)
    else:
        write_conllu(sentences, target)


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    """Flags that override RunConfig values; unset flags leave the file value alone"""
    group = parser.add_argument_group("run configuration")
    group.add_argument("--config", help="Flat JSON config file")
    group.add_argument("--preset", help="delexicalized, lexical, language-id or fine-pos")
    group.add_argument("--train", action="append", type=_language_path, metavar="LANG=PATH",
                       help="Training treebank (repeatable)")
    group.add_argument("--dev", action="append", type=_language_path, metavar="LANG=PATH",
                       help="Dev treebank (repeatable)")
    group.add_argument("--langs", help="Comma-separated languages to train on")
    group.add_argument("--embeddings", help="Multilingual word embeddings")
    group.add_argument("--clusters", help="Multilingual word clusters")
    group.add_argument("--wals", help="WALS feature table")
    group.add_argument("--language-vector", choices=[m.value for m in LanguageVectorMode])
    group.add_argument("--language-injection", help=f"Comma-separated subset of {','.join(INJECTION_POINTS)}")
    group.add_argument("--lexical", action=argparse.BooleanOptionalAction, default=None)
    group.add_argument("--fine-pos", action=argparse.BooleanOptionalAction, default=None)
    group.add_argument("--joint-tagging", action=argparse.BooleanOptionalAction, default=None)
    group.add_argument("--block-dropout", choices=[v.value for v in BlockDropoutVariant])
    group.add_argument("--patience", type=int)
    group.add_argument("--max-epochs", type=int)
    group.add_argument("--clip", type=float)
    group.add_argument("--seed", type=int)


def _run_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides: Dict[str, Any] = {
        "langs": args.langs,
        "embeddings": args.embeddings,
        "clusters": args.clusters,
        "wals": args.wals,
        "language_vector": args.language_vector,
        "language_injection": args.language_injection,
        "lexical": args.lexical,
        "fine_pos": args.fine_pos,
        "joint_tagging": args.joint_tagging,
        "block_dropout": args.block_dropout,
        "patience": args.patience,
        "max_epochs": args.max_epochs,
        "clip": args.clip,
        "seed": args.seed,
        "workers": args.workers,
        "model": args.model,
    }
    if args.train:
        overrides["train"] = dict(args.train)
    if args.dev:
        overrides["dev"] = dict(args.dev)
    return overrides


# ============================================
# Commands
# ============================================

def cmd_train(args: argparse.Namespace) -> int:
    config = load_run_config(args.config, _run_overrides(args), preset=args.preset).validate()
    if not config.model:
        raise ConfigError("no model output path (--model)")
    if not config.train:
        raise ConfigError("no training treebanks (--train LANG=PATH)")
    logger.info(
        f"Features: lexical={config.lexical}, language vector={config.language_vector.value}, "
        f"fine POS={config.fine_pos}, joint tagging={config.joint_tagging}"
    )
    result = train(config)
    size = save_model(result.model, config.model)
    logger.info(f"Model written to {config.model} ({size / 1024:.1f} KiB), best epoch {result.best_epoch}")
    return 0


def cmd_parse(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    treebank = _read(args.input, args.language, require_tree=False)
    sentences = treebank.sentences

    def parse_one(sentence: Sentence) -> Sentence:
        return model.parse(sentence, language=args.language, gold_pos=args.gold_pos, with_tags=False)

    if args.workers > 1 and len(sentences) > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            parsed = list(pool.map(parse_one, sentences))
    else:
        parsed = [parse_one(s) for s in sentences]
    _write(parsed, args.output)
    logger.info(f"Parsed {len(parsed)} sentences")
    return 0


def cmd_tag(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    if not model.joint:
        raise ConfigError(f"{args.model} was trained without joint tagging")
    treebank = _read(args.input, args.language, require_tree=False)
    tagged = [model.tag(s, language=args.language) for s in treebank.sentences]
    _write(tagged, args.output)
    logger.info(f"Tagged {len(tagged)} sentences")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    gold = _read(args.gold, args.language, require_tree=False)
    predicted = _read(args.predicted, args.language, require_tree=False)
    report = evaluate(gold, predicted, with_tags=args.tags, with_recall=args.recall)
    text = report.to_text()
    if args.output:
        report.write(text_path=args.output, tsv_path=args.tsv)
    else:
        sys.stdout.write(text)
        if args.tsv:
            report.write(tsv_path=args.tsv)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    gold = _read(args.gold, args.language, require_tree=False)
    predicted = _read(args.predicted, args.language, require_tree=False)
    text = format_recall(class_recall(gold, predicted)) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_projectivize(args: argparse.Namespace) -> int:
    treebank = _read(args.input)
    out: List[Sentence] = []
    lifted = changed = 0
    for sentence in treebank.sentences:
        tree, lifts = lift_nonprojective(sentence.gold_tree())
        if lifts:
            changed += 1
            lifted += lifts
        if not is_projective(tree):
            raise PolyparseError(f"sentence {len(out) + 1} is still non-projective after lifting")
        out.append(sentence.with_gold_tree(tree))
    _write(out, args.output)
    logger.info(f"Projectivized {len(out)} sentences: {lifted} arcs lifted in {changed} sentences")
    return 0


def _target_words(treebanks: Optional[List[tuple]]) -> Dict[str, List[str]]:
    words: Dict[str, Set[str]] = {}
    for language, path in treebanks or []:
        tb = read_conllu(path, language=language, require_tree=False)
        words.setdefault(language, set()).update(t.form.lower() for s in tb.sentences for t in s.tokens)
    return {language: sorted(forms) for language, forms in words.items()}


def cmd_build_lexicon(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    produced = []

    if args.dictionary:
        dictionary = load_dictionary(args.dictionary)
        if args.english_embeddings:
            english = load_embeddings(args.english_embeddings)
            table, _ = robust_projection(
                english, dictionary, _target_words(args.target), english_language=args.english_language
            )
            write_embeddings(table, out_dir / "embeddings.vec")
            produced.append("embeddings.vec")
        if args.english_clusters:
            clusters = project_clusters(load_clusters(args.english_clusters), dictionary, args.english_language)
            write_clusters(clusters, out_dir / "clusters.txt")
            produced.append("clusters.txt")
            logger.info(f"Projected clusters for {len(clusters)} words")
    elif args.english_embeddings or args.english_clusters:
        raise ConfigError("projection needs an alignment dictionary (--dictionary)")

    if args.language_vector != LanguageVectorMode.NONE.value:
        mode = LanguageVectorMode(args.language_vector)
        if mode.uses_wals and not args.wals:
            raise ConfigError(f"language-vector mode '{mode.value}' needs a WALS table (--wals)")
        wals = load_wals(args.wals) if args.wals else None
        langs = [lang for lang in (args.langs or "").split(",") if lang]
        if not langs and wals is not None:
            langs = wals.languages
        if not langs:
            raise ConfigError("no languages for language vectors (--langs)")
        write_language_vectors(language_vector_table(sorted(langs), mode, wals), out_dir / "language_vectors.tsv")
        produced.append("language_vectors.tsv")

    if not produced:
        raise ConfigError("nothing to build: give --dictionary with English resources, or --language-vector")
    logger.info(f"Wrote {', '.join(produced)} to {out_dir}")
    return 0


# ============================================
# Parser
# ============================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyparse", description="Multilingual transition-based dependency parser")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-file", help="Also write the log to this file")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="Train a model")
    _add_run_options(p)
    p.add_argument("--model", help="Output model file")
    p.add_argument("--workers", type=int, help="Threads for reading treebanks")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("parse", help="Parse CoNLL-U input")
    p.add_argument("--model", required=True)
    p.add_argument("input", help="CoNLL-U file or -")
    p.add_argument("-o", "--output")
    p.add_argument("--language", help="Language of sentences without a '# language = xx' comment")
    p.add_argument("--gold-pos", action="store_true", help="Parse with the UPOS column instead of predicted tags")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(handler=cmd_parse)

    p = sub.add_parser("tag", help="Predict coarse POS tags with a jointly trained model")
    p.add_argument("--model", required=True)
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--language")
    p.set_defaults(handler=cmd_tag)

    p = sub.add_parser("eval", help="Attachment scores of predicted against gold trees")
    p.add_argument("gold")
    p.add_argument("predicted")
    p.add_argument("--language", help="Language of sentences without a '# language = xx' comment")
    p.add_argument("--tags", action="store_true", help="Also report UPOS accuracy")
    p.add_argument("--recall", action="store_true", help="Also report class-wise recall")
    p.add_argument("--tsv", help="Write lang/metric/value rows to this file")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("analyze", help="Class-wise recall table")
    p.add_argument("gold")
    p.add_argument("predicted")
    p.add_argument("--language")
    p.add_argument("-o", "--output")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("projectivize", help="Lift non-projective arcs")
    p.add_argument("input")
    p.add_argument("output", nargs="?")
    p.set_defaults(handler=cmd_projectivize)

    p = sub.add_parser("build-lexicon", help="Project English resources and export language vectors")
    p.add_argument("--dictionary", help="Word alignments: lang, target, english, probability")
    p.add_argument("--english-embeddings")
    p.add_argument("--english-clusters")
    p.add_argument("--english-language", help="Also keep English entries under this language prefix")
    p.add_argument("--target", action="append", type=_language_path, metavar="LANG=PATH",
                   help="Treebank whose words get edit-distance vectors (repeatable)")
    p.add_argument("--language-vector", choices=[m.value for m in LanguageVectorMode], default="none")
    p.add_argument("--langs", help="Comma-separated languages for language vectors")
    p.add_argument("--wals")
    p.add_argument("--out", required=True, help="Output directory")
    p.set_defaults(handler=cmd_build_lexicon)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_clean_logging(logging.DEBUG if args.verbose else logging.INFO, log_file=args.log_file)
    try:
        return args.handler(args)
    except (PolyparseError, OSError) as e:
        logger.error(str(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
