"""Normalization metrics, baselines, significance testing, per-language
breakdowns and POS evaluation through alignments."""

from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .constants import *
from .corpus import AlignmentLink, Dataset, check_links, map_labels_coarse
from .resources import ReplacementDict, mfr_lookup
from .utils import DataError

Outputs = Sequence[Sequence[str]]


def flatten(outputs: Outputs) -> List[str]:
    return [o for sentence in outputs for o in sentence]


def aligned_outputs(gold: Dataset, pred: Outputs) -> List[Tuple[str, str, str]]:
    """(orig, gold, pred) per token.

    Raises:
        DataError: If pred does not have one output per gold token
    """
    if len(pred) != len(gold.sentences):
        raise DataError(f"{len(pred)} predicted sentences for {len(gold.sentences)} gold sentences")
    triples = []
    for number, (sentence, out) in enumerate(zip(gold.sentences, pred), 1):
        if len(out) != len(sentence):
            raise DataError(
                f"sentence {number}: {len(out)} predictions for {len(sentence)} tokens"
            )
        triples += [(t.orig, t.norm, o) for t, o in zip(sentence, out)]
    return triples


def _percent_correct(n_wrong: int, n: int) -> float:
    # written as 100 - errors so that leave-as-is accuracy is exactly 100 - %norm
    return 100.0 - 100.0 * n_wrong / n if n else 0.0


def accuracy(gold: Dataset, pred: Outputs) -> float:
    """Percentage of tokens whose prediction equals the gold normalization."""
    triples = aligned_outputs(gold, pred)
    return _percent_correct(sum(g != p for _, g, p in triples), len(triples))


def lai(dataset: Dataset) -> List[List[str]]:
    """Leave-as-is: every word is its own normalization."""
    return [s.origs for s in dataset.sentences]


def mfr(d: ReplacementDict, dataset: Dataset) -> List[List[str]]:
    """Most frequent replacement seen in training, per word."""
    return [[mfr_lookup(d, w) for w in s.origs] for s in dataset.sentences]


def precision_recall(gold: Sequence[str], orig: Sequence[str], pred: Sequence[str]) -> Tuple[float, float]:
    """Precision over changed words and recall over words needing a change, in percent.

    Both are 0 when their denominator is empty.
    """
    if not len(gold) == len(orig) == len(pred):
        raise DataError("gold, original and predicted words differ in length")
    needed = changed = correct = 0
    for g, o, p in zip(gold, orig, pred):
        needed += g != o
        if p != o:
            changed += 1
            correct += p == g
    precision = 100.0 * correct / changed if changed else 0.0
    recall = 100.0 * correct / needed if needed else 0.0
    return precision, recall


def precision_recall_dataset(gold: Dataset, pred: Outputs) -> Tuple[float, float]:
    triples = aligned_outputs(gold, pred)
    return precision_recall([g for _, g, _ in triples], [o for o, _, _ in triples], [p for _, _, p in triples])


def err(acc_sys: float, acc_lai: float) -> float:
    """Error reduction rate in percent, from accuracies given as fractions."""
    if acc_lai >= 1:
        raise ValueError("the error reduction rate is undefined when leave-as-is is perfect")
    return 100.0 * (acc_sys - acc_lai) / (1 - acc_lai)


def paired_bootstrap(
    gold: Dataset,
    pred_a: Outputs,
    pred_b: Outputs,
    samples: int = 1000,
    seed: int = DEFAULT_SEED,
) -> float:
    """One-sided p-value that system A is not more accurate than system B.

    Sentences are resampled with replacement; the p-value counts resamples
    where A does not beat B, with add-one smoothing.
    """
    if samples < 1:
        raise ValueError(f"need at least one bootstrap sample, got {samples}")
    aligned_outputs(gold, pred_a)
    aligned_outputs(gold, pred_b)
    n_sentences = len(gold.sentences)
    if not n_sentences:
        raise DataError("cannot bootstrap an empty dataset")

    sizes = np.array([len(s) for s in gold.sentences])
    correct_a = np.array([sum(t.norm == o for t, o in zip(s, out)) for s, out in zip(gold.sentences, pred_a)])
    correct_b = np.array([sum(t.norm == o for t, o in zip(s, out)) for s, out in zip(gold.sentences, pred_b)])

    rng = np.random.default_rng(seed)
    resamples = rng.integers(0, n_sentences, size=(samples, n_sentences))
    totals = sizes[resamples].sum(axis=1)
    deltas = (correct_a[resamples].sum(axis=1) - correct_b[resamples].sum(axis=1)) / totals
    return float((1 + np.count_nonzero(deltas <= 0)) / (1 + samples))


def per_language_breakdown(
    gold: Dataset,
    pred: Outputs,
    lid_labels: Optional[Outputs] = None,
) -> Dict[str, Tuple[float, int]]:
    """Accuracy and token count per coarse LID label.

    Labels default to the gold LID column.

    Raises:
        DataError: If a token has no label
    """
    triples = aligned_outputs(gold, pred)
    if lid_labels is None:
        lid_labels = [s.lids for s in gold.sentences]
    labels = flatten(lid_labels)
    if len(labels) != len(triples) or any(l is None for l in labels):
        raise DataError("the per-language breakdown needs an LID label for every token")

    wrong: Counter = Counter()
    counts: Counter = Counter()
    for (_, g, p), label in zip(triples, labels):
        label = map_labels_coarse(label, gold.languages)
        counts[label] += 1
        wrong[label] += g != p
    return {label: (_percent_correct(wrong[label], counts[label]), counts[label]) for label in sorted(counts)}


### POS


def _check_pos_inputs(
    gold_pos: Outputs, links: Sequence[Sequence[AlignmentLink]], pred: Outputs
) -> None:
    if not len(gold_pos) == len(links) == len(pred):
        raise DataError("gold tags, alignments and predicted tags differ in sentence count")
    for tags, sentence_links, predicted in zip(gold_pos, links, pred):
        check_links(sentence_links, len(tags), len(predicted))


def pos_eval_oracle(
    gold_pos: Outputs, links: Sequence[Sequence[AlignmentLink]], pred: Outputs
) -> float:
    """POS accuracy over source tokens, where a token is correct if any
    output word aligned to it carries its gold tag."""
    _check_pos_inputs(gold_pos, links, pred)
    n = wrong = 0
    for tags, sentence_links, predicted in zip(gold_pos, links, pred):
        for link in sentence_links:
            options = {predicted[j] for j in link.tgt_range}
            for i in link.src_range:
                n += 1
                wrong += tags[i] not in options
    return _percent_correct(wrong, n)


def pos_eval_first(
    gold_pos: Outputs, links: Sequence[Sequence[AlignmentLink]], pred: Outputs
) -> float:
    """Like pos_eval_oracle, but only the first aligned output word counts."""
    _check_pos_inputs(gold_pos, links, pred)
    n = wrong = 0
    for tags, sentence_links, predicted in zip(gold_pos, links, pred):
        for link in sentence_links:
            for i in link.src_range:
                n += 1
                wrong += tags[i] != predicted[link.tgt_span[0]]
    return _percent_correct(wrong, n)


@dataclass
class ConfusionMatrix:
    """Counts with gold labels as rows and predicted labels as columns."""

    labels: Tuple[str, ...]
    counts: np.ndarray

    def count(self, gold: str, pred: str) -> int:
        index = {l: i for i, l in enumerate(self.labels)}
        if gold not in index or pred not in index:
            return 0
        return int(self.counts[index[gold], index[pred]])

    def to_rows(self) -> List[List]:
        rows: List[List] = [["gold\\pred"] + list(self.labels)]
        for label, row in zip(self.labels, self.counts):
            rows.append([label] + [int(v) for v in row])
        return rows


def confusion_matrix(gold: Sequence[str], pred: Sequence[str]) -> ConfusionMatrix:
    if len(gold) != len(pred):
        raise DataError(f"{len(pred)} predicted tags for {len(gold)} gold tags")
    labels = tuple(sorted(set(gold) | set(pred)))
    index = {l: i for i, l in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for g, p in zip(gold, pred):
        counts[index[g], index[p]] += 1
    return ConfusionMatrix(labels, counts)


def top_confusions(cm: ConfusionMatrix, n: int = 10) -> List[Tuple[str, str, int]]:
    """The n most frequent (gold, predicted) errors."""
    errors = [
        (g, p, int(cm.counts[i, j]))
        for i, g in enumerate(cm.labels)
        for j, p in enumerate(cm.labels)
        if i != j and cm.counts[i, j]
    ]
    return sorted(errors, key=lambda e: (-e[2], e[0], e[1]))[:n]


def confusion_delta(
    base: ConfusionMatrix, other: ConfusionMatrix, n: int = 10
) -> List[Tuple[str, str, int, int, int]]:
    """The n most frequent errors of base with their count under other and
    the difference other - base."""
    return [
        (g, p, count, other.count(g, p), other.count(g, p) - count)
        for g, p, count in top_confusions(base, n)
    ]
