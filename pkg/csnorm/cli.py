# PYTHON_ARGCOMPLETE_OK
import argparse
import pkg_resources
import shutil
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import argcomplete
import numpy as np

from .constants import *
from .corpus import (
    Dataset,
    align_tokens,
    compute_stats,
    dataset_from_outputs,
    expand_outputs,
    make_folds,
    map_dataset_coarse,
    parse_conllu,
    parse_merge_exceptions,
    parse_norm_file,
    parse_text_file,
    project_tags,
    read_conllu_words,
    split_fold,
    write_norm_file,
)
from .evaluation import (
    accuracy,
    confusion_delta,
    err,
    lai,
    mfr,
    paired_bootstrap,
    per_language_breakdown,
    precision_recall_dataset,
    top_confusions,
)
from .lid import lid_accuracy, tag_dataset as tag_lid_dataset, tag_lid, train_lid
from .pos import pos_evaluate, tag_dataset as tag_pos_dataset, train_pos
from .ranker import (
    LABELED_STRATEGIES,
    STRATEGIES,
    ModelSettings,
    load_model,
    normalize_dataset,
    save_model,
    train_model,
)
from .resources import (
    build_lexicon,
    build_ngrams,
    build_replacement_dict,
    load_resources,
    resource_table,
    write_lexicon,
    write_ngrams,
)
from .seqlab import LinearSequenceModel
from .utils import (
    _copytree,
    CriticalException,
    DataError,
    align_columns,
    decode_model,
    encode_model,
    format_tsv,
    get_valid_config,
    load_config,
    process_messages,
    read_input,
    status,
    write_output,
)
from .validator import ConfigValidator

BASELINES = ("lai", "mfr")


class ArgumentParser(argparse.ArgumentParser):
    """Exits with code 1 on usage errors."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


class CliArguments(argparse.Namespace):
    def __init__(self) -> None:
        self.config: Optional[str]
        self.func: Callable


def main(passed_args: Optional[List[str]] = None) -> int:
    parser = ArgumentParser(
        prog="csnorm",
        description="Lexical normalization, language identification and POS tagging of code-switched text",
    )
    subparsers = parser.add_subparsers(metavar="COMMAND")

    common = ArgumentParser(add_help=False)
    common.add_argument(
        "-c",
        "--config",
        help="Configuration file, by default config.yml in the current directory or a parent",
    )
    common.add_argument("--seed", type=int, help="Random seed, overrides the configuration")
    common.add_argument(
        "-a",
        "--align",
        action="store_true",
        help="Pad table columns with spaces instead of printing plain TSV",
    )

    # resources
    resources_desc = "Builds monolingual resources"
    resources_parser = subparsers.add_parser(
        "resources", description=resources_desc, help=resources_desc
    )
    resources_sub = resources_parser.add_subparsers(metavar="ACTION")
    build_desc = "Counts n-grams and collects a lexicon from raw tokenized corpora"
    build_parser = resources_sub.add_parser(
        "build", parents=[common], description=build_desc, help=build_desc
    )
    build_parser.add_argument(
        "--corpus", nargs="+", required=True, help="Corpora with one tokenized sentence per line"
    )
    build_parser.add_argument("--ngrams", help="Write n-gram counts to this file")
    build_parser.add_argument("--lexicon", help="Write the lexicon to this file")
    build_parser.add_argument(
        "--language",
        help="Language the corpora belong to, by default the first configured language",
    )
    build_parser.add_argument(
        "--min-count",
        type=int,
        default=1,
        help="Only words seen this often enter the lexicon",
    )
    build_parser.set_defaults(func=resources_build)

    # lid
    lid_desc = "Word level language identification"
    lid_parser = subparsers.add_parser("lid", description=lid_desc, help=lid_desc)
    lid_sub = lid_parser.add_subparsers(metavar="ACTION")

    lid_train_desc = "Trains an LID tagger on a norm file with LID labels"
    lid_train_parser = lid_sub.add_parser(
        "train", parents=[common], description=lid_train_desc, help=lid_train_desc
    )
    lid_train_parser.add_argument("--data", required=True, help="Training norm file")
    lid_train_parser.add_argument("--model", required=True, help="Output model file")
    lid_train_parser.add_argument("--epochs", type=int, help="Training epochs")
    lid_train_parser.set_defaults(func=lid_train)

    lid_tag_desc = "Fills the LID column of a norm file"
    lid_tag_parser = lid_sub.add_parser(
        "tag", parents=[common], description=lid_tag_desc, help=lid_tag_desc
    )
    lid_tag_parser.add_argument("--model", required=True, help="LID model file")
    lid_tag_parser.add_argument("--data", required=True, help="Norm file, - for stdin")
    lid_tag_parser.add_argument("-o", "--output", help="Output file, stdout by default")
    lid_tag_parser.set_defaults(func=lid_tag)

    lid_eval_desc = "Reports LID accuracy of a model, or cross-validated accuracy with --folds"
    lid_eval_parser = lid_sub.add_parser(
        "eval", parents=[common], description=lid_eval_desc, help=lid_eval_desc
    )
    lid_eval_parser.add_argument("--data", required=True, help="Norm file with gold LID labels")
    lid_source = lid_eval_parser.add_mutually_exclusive_group(required=True)
    lid_source.add_argument("--model", help="LID model file")
    lid_source.add_argument("--folds", type=int, help="Cross-validate with this many folds")
    lid_eval_parser.add_argument("--epochs", type=int, help="Training epochs")
    lid_eval_parser.set_defaults(func=lid_eval)

    # norm
    norm_desc = "Lexical normalization"
    norm_parser = subparsers.add_parser("norm", description=norm_desc, help=norm_desc)
    norm_sub = norm_parser.add_subparsers(metavar="ACTION")

    model_options = ArgumentParser(add_help=False)
    model_options.add_argument("--strategy", choices=STRATEGIES, help="Normalization strategy")
    model_options.add_argument("--bias", type=float, help="Original word bias")
    model_options.add_argument("--n-trees", type=int, help="Number of trees in each forest")
    model_options.add_argument("-j", "--jobs", type=int, help="Worker threads")

    norm_train_desc = "Trains a normalization model"
    norm_train_parser = norm_sub.add_parser(
        "train",
        parents=[common, model_options],
        description=norm_train_desc,
        help=norm_train_desc,
    )
    norm_train_parser.add_argument("--data", required=True, help="Training norm file")
    norm_train_parser.add_argument("--model", required=True, help="Output model file")
    norm_train_parser.set_defaults(func=norm_train)

    norm_run_desc = "Normalizes the ORIG column of a norm file"
    norm_run_parser = norm_sub.add_parser(
        "run", parents=[common], description=norm_run_desc, help=norm_run_desc
    )
    norm_run_parser.add_argument("--model", required=True, help="Normalization model file")
    norm_run_parser.add_argument("--data", required=True, help="Norm file, - for stdin")
    norm_run_parser.add_argument(
        "--text",
        action="store_true",
        help="Read the input as one whitespace tokenized sentence per line",
    )
    norm_run_parser.add_argument(
        "--lid",
        default="gold",
        help="Where LID labels come from: gold for the input's LID column, or an LID model file",
    )
    norm_run_parser.add_argument("--bias", type=float, help="Override the model's original word bias")
    norm_run_parser.add_argument(
        "-j", "--jobs", type=int, help="Worker threads, by default forest.n_jobs of the configuration"
    )
    norm_run_parser.add_argument("-o", "--output", help="Output file, stdout by default")
    norm_run_parser.set_defaults(func=norm_run)

    norm_eval_desc = "Scores predicted normalizations against gold ones"
    norm_eval_parser = norm_sub.add_parser(
        "eval", parents=[common], description=norm_eval_desc, help=norm_eval_desc
    )
    norm_eval_parser.add_argument("--gold", required=True, help="Gold norm file")
    norm_eval_parser.add_argument("--pred", required=True, help="Predicted norm file")
    norm_eval_parser.add_argument(
        "--lai", action="store_true", help="Also report the leave-as-is baseline"
    )
    norm_eval_parser.add_argument(
        "--per-language", action="store_true", help="Add accuracy per gold LID label"
    )
    norm_eval_parser.add_argument(
        "--compare", help="Second predicted norm file to test --pred against"
    )
    norm_eval_parser.add_argument(
        "--samples", type=int, default=1000, help="Bootstrap samples for --compare"
    )
    norm_eval_parser.set_defaults(func=norm_eval)

    norm_cv_desc = "Cross-validates a strategy or baseline on one norm file"
    norm_cv_parser = norm_sub.add_parser(
        "cv", parents=[common], description=norm_cv_desc, help=norm_cv_desc
    )
    norm_cv_parser.add_argument("--data", required=True, help="Norm file")
    norm_cv_parser.add_argument("--folds", type=int, default=10, help="Number of folds")
    norm_cv_parser.add_argument(
        "--strategy", choices=STRATEGIES + BASELINES, help="Strategy or baseline"
    )
    norm_cv_parser.add_argument("--bias", type=float, help="Original word bias")
    norm_cv_parser.add_argument("--n-trees", type=int, help="Number of trees in each forest")
    norm_cv_parser.add_argument("-j", "--jobs", type=int, help="Worker threads")
    norm_cv_parser.add_argument(
        "--lid",
        choices=["gold", "predicted"],
        default="gold",
        help="Test LID labels: gold, or predicted by a tagger trained on each training part",
    )
    norm_cv_parser.add_argument(
        "--per-language", action="store_true", help="Add accuracy per gold LID label"
    )
    norm_cv_parser.add_argument(
        "-o", "--output", help="Write the cross-validated predictions to this norm file"
    )
    norm_cv_parser.set_defaults(func=norm_cv)

    # pos
    pos_desc = "POS tagging of normalized text"
    pos_parser = subparsers.add_parser("pos", description=pos_desc, help=pos_desc)
    pos_sub = pos_parser.add_subparsers(metavar="ACTION")

    pos_train_desc = "Trains a POS tagger on CoNLL-U files"
    pos_train_parser = pos_sub.add_parser(
        "train", parents=[common], description=pos_train_desc, help=pos_train_desc
    )
    pos_train_parser.add_argument("--data", nargs="+", required=True, help="CoNLL-U files")
    pos_train_parser.add_argument("--model", required=True, help="Output model file")
    pos_train_parser.add_argument("--epochs", type=int, help="Training epochs")
    pos_train_parser.set_defaults(func=pos_train)

    pos_tag_desc = "Fills the POS column of a norm file by tagging its NORM column"
    pos_tag_parser = pos_sub.add_parser(
        "tag", parents=[common], description=pos_tag_desc, help=pos_tag_desc
    )
    pos_tag_parser.add_argument("--model", required=True, help="POS model file")
    pos_tag_parser.add_argument("--data", required=True, help="Norm file, - for stdin")
    pos_tag_parser.add_argument("-o", "--output", help="Output file, stdout by default")
    pos_tag_parser.set_defaults(func=pos_tag)

    pos_eval_desc = "Scores POS tags of normalized text against gold tags of the source tokens"
    pos_eval_parser = pos_sub.add_parser(
        "eval", parents=[common], description=pos_eval_desc, help=pos_eval_desc
    )
    pos_eval_parser.add_argument("--model", required=True, help="POS model file")
    pos_eval_parser.add_argument("--gold", required=True, help="Norm file with gold POS tags")
    pos_eval_parser.add_argument(
        "--pred", help="Predicted normalizations to tag, by default the gold NORM column"
    )
    pos_eval_parser.add_argument(
        "--rule", choices=["oracle", "first"], default="oracle", help="Tag selection rule"
    )
    pos_eval_parser.add_argument(
        "--confusion", action="store_true", help="Print the confusion matrix"
    )
    pos_eval_parser.add_argument(
        "--top", type=int, default=0, help="Print the N most common tagging errors"
    )
    pos_eval_parser.add_argument(
        "--compare",
        help="Predicted normalizations whose error counts are listed next to --top errors",
    )
    pos_eval_parser.set_defaults(func=pos_eval)

    # single commands
    stats_desc = "Prints normalization and code-switching statistics of a norm file"
    stats_parser = subparsers.add_parser(
        "stats", parents=[common], description=stats_desc, help=stats_desc
    )
    stats_parser.add_argument("--data", required=True, help="Norm file, - for stdin")
    stats_parser.add_argument(
        "--no-cmi", action="store_true", help="Skip the code-mixing index"
    )
    stats_parser.add_argument(
        "--details", action="store_true", help="Also print sentence level counts"
    )
    stats_parser.set_defaults(func=stats)

    project_desc = "Projects LID and POS tags of a segmented CoNLL-U layer onto a norm file"
    project_parser = subparsers.add_parser(
        "project", parents=[common], description=project_desc, help=project_desc
    )
    project_parser.add_argument("--data", required=True, help="Norm file")
    project_parser.add_argument("--layer", required=True, help="Tagged CoNLL-U layer")
    project_parser.add_argument("-o", "--output", help="Output file, stdout by default")
    project_parser.set_defaults(func=project)

    align_desc = "Aligns tokens by character edit distance"
    align_parser = subparsers.add_parser(
        "align", parents=[common], description=align_desc, help=align_desc
    )
    align_input = align_parser.add_mutually_exclusive_group(required=True)
    align_input.add_argument("--data", help="Norm file whose ORIG and NORM words are aligned")
    align_input.add_argument("--src", help="Source sentences, one tokenized sentence per line")
    align_parser.add_argument("--tgt", help="Target sentences for --src")
    align_parser.add_argument(
        "--counts", action="store_true", help="Only print link counts per kind"
    )
    align_parser.set_defaults(func=align)

    compare_desc = "Paired bootstrap test of two predictions against one gold file"
    compare_parser = subparsers.add_parser(
        "compare", parents=[common], description=compare_desc, help=compare_desc
    )
    compare_parser.add_argument("--gold", required=True, help="Gold norm file")
    compare_parser.add_argument("--a", required=True, help="Predictions of system A")
    compare_parser.add_argument("--b", required=True, help="Predictions of system B")
    compare_parser.add_argument("--samples", type=int, default=1000, help="Bootstrap samples")
    compare_parser.set_defaults(func=compare)

    validate_desc = "Validates a configuration file"
    validate_parser = subparsers.add_parser(
        "validate", description=validate_desc, help=validate_desc
    )
    validate_parser.add_argument("-c", "--config", help="Configuration file")
    validate_parser.add_argument(
        "-v", "--verbose", action="store_true", help="Show message details"
    )
    validate_parser.add_argument(
        "-e",
        "--error-level",
        type=int,
        default=5,
        help="If a validation message with this level or above is raised, the command exits with exit code 1",
    )
    validate_parser.set_defaults(func=validate)

    init_desc = "Writes a starter configuration file into the current directory"
    init_parser = subparsers.add_parser("init", description=init_desc, help=init_desc)
    init_parser.add_argument(
        "template", type=str, default="default", nargs="?"
    ).completer = templateCompleter
    init_parser.add_argument(
        "-f",
        "--force",
        action="store_true",
        help="Overwrite an existing configuration file",
    )
    init_parser.add_argument(
        "-l",
        "--list",
        action="store_true",
        help="List existing templates",
    )
    init_parser.set_defaults(func=init)

    argcomplete.autocomplete(parser, always_complete_options=False)

    args = parser.parse_args(passed_args, namespace=CliArguments())

    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return 1
    else:
        try:
            return args.func(args)
        except CriticalException as e:
            print(CRITICAL + e.args[0] + CLEAR, file=sys.stderr)
            return e.exit_code


### helpers


def get_config(args: CliArguments) -> Dict[str, Any]:
    """Valid configuration with command line overrides applied."""
    config = get_valid_config(args.config)
    if getattr(args, "seed", None) is not None:
        config["seed"] = args.seed
    if getattr(args, "strategy", None) is not None:
        config["strategy"] = args.strategy
    if getattr(args, "bias", None) is not None:
        if not args.bias > 0:
            raise CriticalException("The original word bias must be positive.")
        config["original_bias"] = args.bias
    if getattr(args, "n_trees", None) is not None:
        config["forest"]["n_trees"] = args.n_trees
    if getattr(args, "jobs", None) is not None:
        config["forest"]["n_jobs"] = args.jobs
    return config


def read_dataset(path: str, config: Dict[str, Any]) -> Dataset:
    return parse_norm_file(read_input(path), config["languages"])


def print_table(args: CliArguments, rows: List[List[Any]]) -> None:
    text = format_tsv(rows)
    if getattr(args, "align", False):
        text = align_columns(text)
    sys.stdout.write(text)


def load_tagger(path: str, kind: str) -> LinearSequenceModel:
    return LinearSequenceModel.from_json(decode_model(read_input(path), kind)["tagger"])


def save_tagger(path: str, kind: str, model: LinearSequenceModel, languages: List[str]) -> None:
    write_output(
        path,
        encode_model({"kind": kind, "languages": list(languages), "tagger": model.to_json()}),
    )


def load_all_resources(config: Dict[str, Any]) -> Dict[str, Any]:
    resources = {}
    for language in config["languages"]:
        status(f"Loading {language} resources...")
        resources[language] = load_resources(config, language)
    return resources


def resource_refs(config: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "files": resource_table(config),
        "alpha": {
            language: entry.get("alpha", 1.0)
            for language, entry in config["resources"].items()
        },
    }


def predictions_of(gold: Dataset, pred: Dataset) -> List[List[str]]:
    """NORM column of pred, checked to hold the same ORIG words as gold."""
    if [s.origs for s in gold.sentences] != [s.origs for s in pred.sentences]:
        raise DataError("the predicted file does not contain the same original words as the gold file")
    return [s.norms for s in pred.sentences]


def safe_err(acc_sys: float, acc_lai: float) -> Any:
    try:
        return err(acc_sys / 100, acc_lai / 100)
    except ValueError:
        return "-"


def coarse(d: Dataset) -> Dataset:
    return d if d.label_scheme == "coarse" else map_dataset_coarse(d)


### commands


def resources_build(args: CliArguments) -> int:
    if not args.ngrams and not args.lexicon:
        raise CriticalException("Nothing to build, pass --ngrams and/or --lexicon.")
    config = get_config(args)
    language = args.language or config["languages"][0]
    if language not in config["languages"]:
        configured = ", ".join(config["languages"])
        raise CriticalException(
            f"{language} is not one of the configured languages ({configured})."
        )
    alpha = config["resources"].get(language, {}).get("alpha", 1.0)

    lines: List[str] = []
    for path in args.corpus:
        try:
            lines += read_input(path).decode("utf-8").split("\n")
        except UnicodeDecodeError:
            raise DataError(f"{path} is not valid UTF-8")

    if args.ngrams:
        model = build_ngrams(lines, alpha, language)
        write_output(args.ngrams, write_ngrams(model))
        status(
            f"Counted {model.total_tokens} {language} tokens, {model.vocab_size} types and {len(model.bigrams)} bigrams.",
            SUCCESS,
        )
    if args.lexicon:
        lexicon = build_lexicon(lines, language, args.min_count)
        write_output(args.lexicon, write_lexicon(lexicon))
        status(f"Wrote a {language} lexicon of {len(lexicon)} words.", SUCCESS)
    return 0


def lid_train(args: CliArguments) -> int:
    config = get_config(args)
    data = coarse(read_dataset(args.data, config))
    epochs = args.epochs if args.epochs is not None else config["lid"]["epochs"]
    status(f"Training an LID tagger on {len(data)} sentences for {epochs} epochs...")
    model = train_lid(data, epochs, config["seed"])
    save_tagger(args.model, "lid", model, config["languages"])
    status("LID model written.", SUCCESS)
    return 0


def lid_tag(args: CliArguments) -> int:
    config = get_config(args)
    model = load_tagger(args.model, "lid")
    write_output(args.output, write_norm_file(tag_lid_dataset(model, read_dataset(args.data, config))))
    return 0


def lid_eval(args: CliArguments) -> int:
    config = get_config(args)
    data = coarse(read_dataset(args.data, config))
    if args.model:
        model = load_tagger(args.model, "lid")
        overall, per_label = lid_accuracy(data, tag_lid(model, data.sentences))
    else:
        epochs = args.epochs if args.epochs is not None else config["lid"]["epochs"]
        plan = make_folds(data, args.folds, config["seed"])
        labels: List[Any] = [None] * len(data)
        for fold in range(plan.k):
            status(f"Fold {fold + 1}/{plan.k}...")
            train, test = split_fold(data, plan, fold)
            predicted = tag_lid(train_lid(train, epochs, config["seed"]), test.sentences)
            for index, sentence_labels in zip(plan.test_indices(fold), predicted):
                labels[index] = sentence_labels
        overall, per_label = lid_accuracy(data, labels)

    rows: List[List[Any]] = [["label", "accuracy"], ["all", 100 * overall]]
    rows += [[label, 100 * value] for label, value in per_label.items()]
    print_table(args, rows)
    return 0


def norm_train(args: CliArguments) -> int:
    config = get_config(args)
    settings = ModelSettings.from_config(config)
    data = read_dataset(args.data, config)
    resources = load_all_resources(config)
    status(f"Training a {settings.strategy} model on {data.n_tokens} tokens...")
    model = train_model(data, resources, settings, resource_refs=resource_refs(config))
    for key, forest in model.forests.items():
        if forest.oob_accuracy is not None:
            status(f"{key} forest out-of-bag accuracy: {100 * forest.oob_accuracy:.2f}")
    save_model(model, args.model)
    status("Normalization model written.", SUCCESS)
    return 0


def norm_run(args: CliArguments) -> int:
    config = get_config(args)
    model = load_model(args.model)
    if args.bias is not None:
        model = model.with_bias(args.bias)

    reader = parse_text_file if args.text else parse_norm_file
    data = reader(read_input(args.data), model.settings.languages)

    labels = None
    if model.strategy in LABELED_STRATEGIES and args.lid != "gold":
        labels = tag_lid(load_tagger(args.lid, "lid"), data.sentences)
    outputs = normalize_dataset(model, data, labels, config["forest"]["n_jobs"])
    write_output(args.output, write_norm_file(dataset_from_outputs(data, outputs)))
    return 0


def evaluation_rows(prefix: str, gold: Dataset, pred: List[List[str]], lai_accuracy: float) -> List[List[Any]]:
    acc = accuracy(gold, pred)
    precision, recall = precision_recall_dataset(gold, pred)
    return [
        [prefix + "accuracy", acc],
        [prefix + "precision", precision],
        [prefix + "recall", recall],
        [prefix + "ERR", safe_err(acc, lai_accuracy)],
    ]


def norm_eval(args: CliArguments) -> int:
    config = get_config(args)
    gold = read_dataset(args.gold, config)
    pred = predictions_of(gold, read_dataset(args.pred, config))
    lai_accuracy = accuracy(gold, lai(gold))

    rows: List[List[Any]] = [["metric", "value"]]
    rows += evaluation_rows("", gold, pred, lai_accuracy)
    if args.lai:
        rows += evaluation_rows("lai.", gold, lai(gold), lai_accuracy)
    if args.per_language:
        for label, (acc, count) in per_language_breakdown(gold, pred).items():
            rows.append([f"accuracy.{label}", acc])
    if args.compare:
        other = predictions_of(gold, read_dataset(args.compare, config))
        rows.append(["compare.accuracy", accuracy(gold, other)])
        rows.append(["p_value", paired_bootstrap(gold, pred, other, args.samples, config["seed"])])
    print_table(args, rows)
    return 0


def norm_cv(args: CliArguments) -> int:
    config = get_config(args)
    strategy = config["strategy"]
    data = read_dataset(args.data, config)
    plan = make_folds(data, args.folds, config["seed"])
    resources = None
    if strategy not in BASELINES:
        settings = ModelSettings.from_config(config)
        resources = load_all_resources(config)

    outputs: List[Any] = [None] * len(data)
    rows: List[List[Any]] = [["fold", "sentences", "tokens", "accuracy", "LAI", "ERR"]]
    accuracies, lai_accuracies = [], []
    for fold in range(plan.k):
        status(f"Fold {fold + 1}/{plan.k}...")
        train, test = split_fold(data, plan, fold)
        if strategy == "lai":
            predicted = lai(test)
        elif strategy == "mfr":
            predicted = mfr(build_replacement_dict(train), test)
        else:
            labels = None
            if strategy in LABELED_STRATEGIES and args.lid == "predicted":
                tagger = train_lid(coarse(train), config["lid"]["epochs"], config["seed"])
                labels = tag_lid(tagger, test.sentences)
            model = train_model(train, resources, settings)
            predicted = normalize_dataset(model, test, labels, settings.n_jobs)

        for index, sentence_outputs in zip(plan.test_indices(fold), predicted):
            outputs[index] = sentence_outputs
        acc, lai_acc = accuracy(test, predicted), accuracy(test, lai(test))
        accuracies.append(acc)
        lai_accuracies.append(lai_acc)
        rows.append([fold + 1, len(test), test.n_tokens, acc, lai_acc, safe_err(acc, lai_acc)])

    mean_accuracy = float(np.mean(accuracies))
    mean_lai = float(np.mean(lai_accuracies))
    rows.append(["mean", len(data), data.n_tokens, mean_accuracy, mean_lai, safe_err(mean_accuracy, mean_lai)])
    if args.per_language:
        rows.append([])
        rows.append(["label", "tokens", "accuracy"])
        for label, (acc, count) in per_language_breakdown(data, outputs).items():
            rows.append([label, count, acc])
    print_table(args, rows)

    if args.output:
        write_output(args.output, write_norm_file(dataset_from_outputs(data, outputs)))
    return 0


def pos_train(args: CliArguments) -> int:
    config = get_config(args)
    sentences: List[Any] = []
    for path in args.data:
        sentences += parse_conllu(read_input(path), config["languages"]).sentences
    # shuffled concatenation of the treebanks
    order = np.random.default_rng(config["seed"]).permutation(len(sentences))
    data = Dataset(tuple(sentences[i] for i in order), None, config["languages"])
    epochs = args.epochs if args.epochs is not None else config["pos"]["epochs"]
    status(f"Training a POS tagger on {len(data)} sentences for {epochs} epochs...")
    save_tagger(args.model, "pos", train_pos(data, epochs, config["seed"]), config["languages"])
    status("POS model written.", SUCCESS)
    return 0


def pos_tag(args: CliArguments) -> int:
    config = get_config(args)
    model = load_tagger(args.model, "pos")
    exceptions = parse_merge_exceptions(config["pos"]["merge_exceptions"])
    write_output(args.output, write_norm_file(tag_pos_dataset(model, read_dataset(args.data, config), exceptions)))
    return 0


def pos_eval(args: CliArguments) -> int:
    config = get_config(args)
    model = load_tagger(args.model, "pos")
    gold = read_dataset(args.gold, config)
    outputs = predictions_of(gold, read_dataset(args.pred, config)) if args.pred else [s.norms for s in gold.sentences]
    score, matrix = pos_evaluate(model, gold, outputs, args.rule)

    rows: List[List[Any]] = [["metric", "value"], [f"accuracy.{args.rule}", score]]
    if args.confusion:
        rows += [[]] + matrix.to_rows()
    if args.top:
        rows += [[], ["gold", "pred", "count"] + (["compare", "delta"] if args.compare else [])]
        if args.compare:
            other = predictions_of(gold, read_dataset(args.compare, config))
            _, other_matrix = pos_evaluate(model, gold, other, args.rule)
            rows += [list(row) for row in confusion_delta(matrix, other_matrix, args.top)]
        else:
            rows += [list(row) for row in top_confusions(matrix, args.top)]
    print_table(args, rows)
    return 0


def stats(args: CliArguments) -> int:
    config = get_config(args)
    result = compute_stats(read_dataset(args.data, config), with_cmi=not args.no_cmi)
    rows: List[List[Any]] = [list(result.HEADER), list(result.row())]
    if args.details:
        rows += [
            [],
            ["#sentences", "#unnormalized", "#over70%norm", "#split", "#merge"],
            [
                result.n_sentences,
                result.n_unnormalized_sentences,
                result.n_high_norm_sentences,
                result.n_split,
                result.n_merge,
            ],
        ]
    print_table(args, rows)
    return 0


def project(args: CliArguments) -> int:
    config = get_config(args)
    exceptions = parse_merge_exceptions(config["pos"]["merge_exceptions"])
    data = read_dataset(args.data, config)
    layer = read_conllu_words(read_input(args.layer), exceptions)
    write_output(args.output, write_norm_file(project_tags(data, layer, exceptions)))
    return 0


def _span(span: Any) -> str:
    first, last = span[0], span[1] - 1
    return str(first) if first == last else f"{first}-{last}"


def align(args: CliArguments) -> int:
    config = get_config(args)
    pairs = []
    if args.data:
        for sentence in read_dataset(args.data, config).sentences:
            pairs.append((sentence.origs, expand_outputs(sentence.norms)[0]))
    else:
        if not args.tgt:
            raise CriticalException("--src needs --tgt.")
        src = [l.split() for l in read_input(args.src).decode("utf-8").split("\n") if l.split()]
        tgt = [l.split() for l in read_input(args.tgt).decode("utf-8").split("\n") if l.split()]
        if len(src) != len(tgt):
            raise DataError(f"{len(src)} source sentences but {len(tgt)} target sentences")
        pairs = list(zip(src, tgt))

    counts = {"1:1": 0, "1:n": 0, "n:1": 0}
    lines = []
    for src_words, tgt_words in pairs:
        links = align_tokens(src_words, tgt_words)
        for link in links:
            counts[link.kind] += 1
        lines.append(" ".join(f"{_span(l.src_span)}:{_span(l.tgt_span)}" for l in links))

    if args.counts:
        print_table(args, [list(counts), list(counts.values())])
    else:
        sys.stdout.write("".join(line + "\n" for line in lines))
    return 0


def compare(args: CliArguments) -> int:
    config = get_config(args)
    gold = read_dataset(args.gold, config)
    pred_a = predictions_of(gold, read_dataset(args.a, config))
    pred_b = predictions_of(gold, read_dataset(args.b, config))
    p = paired_bootstrap(gold, pred_a, pred_b, args.samples, config["seed"])
    print_table(
        args,
        [
            ["accuracy_a", "accuracy_b", "p_value"],
            [accuracy(gold, pred_a), accuracy(gold, pred_b), f"{p:.4f}"],
        ],
    )
    return 0


def validate(args: CliArguments) -> int:

    config = load_config(args.config)
    config_path = config.pop("__path__", None)

    validator = ConfigValidator(
        config, basedir=Path(config_path).parent if config_path else Path(".").absolute()
    )
    messages = validator.validate()[1]

    processed = process_messages(messages, verbose=args.verbose)

    if processed["highest_level"]:
        print("\n".join(processed["message_strings"]))
    print(processed["count_string"])
    if processed["highest_level"] and not args.verbose:
        print("Run with -v for detailed descriptions")

    outcome = "failed" if processed["highest_level"] >= args.error_level else "succeeded"
    level_intro_colors = [
        SUCCESS,
        SUCCESS,
        SUCCESS,
        HIGH,
        HIGH,
        CRITICAL,
    ]
    color = level_intro_colors[processed["highest_level"]]
    if processed["highest_level"] >= args.error_level:
        color = CRITICAL

    level_messages = [
        "No issues detected!",
        "",
        "",
        "You may want to investigate some of the issues.",
        "You should fix errors of high severity.",
        "Please fix the critical errors.",
    ]

    print(
        f"{color}Validation {outcome}. "
        + level_messages[processed["highest_level"]]
        + CLEAR
    )

    return int(processed["highest_level"] >= args.error_level)


def init(args: CliArguments) -> int:

    templates = Path(pkg_resources.resource_filename("csnorm", "templates"))
    if args.list:
        for template_path in sorted(templates.iterdir()):
            print(
                f"{template_path.name} - {(template_path/'DESCRIPTION').read_text().strip()}"
            )

        return 0

    template_dir = templates / args.template
    if not template_dir.is_dir():
        raise CriticalException(
            f"Could not find template {args.template}. Use -l to list available templates."
        )

    target_dir = Path(".").absolute()
    if (target_dir / "config.yml").exists() and not args.force:
        raise CriticalException(
            "A config.yml already exists in the current directory. To overwrite it, run with -f."
        )

    _copytree(template_dir, target_dir, ignore=shutil.ignore_patterns("DESCRIPTION"))

    print(f"{SUCCESS}Configuration initialized!{CLEAR}")
    return 0


def templateCompleter(**kwargs: Dict[str, Any]) -> List[str]:
    return [
        path.name
        for path in Path(
            pkg_resources.resource_filename("csnorm", "templates")
        ).iterdir()
    ]
