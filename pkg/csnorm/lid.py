"""Word level language identification over coarse labels, and splitting of
sentences into monolingual fragments."""

from typing import Dict, List, Optional, Sequence, Tuple

from .constants import *
from .corpus import Dataset, Sentence, Token
from .seqlab import LinearSequenceModel, tag_accuracy, train_perceptron, viterbi
from .utils import DataError


def train_lid(data: Dataset, epochs: int = 10, seed: int = DEFAULT_SEED) -> LinearSequenceModel:
    """Trains a tagger on the coarse LID labels of data.

    Raises:
        DataError: If data uses fine labels or a token has no LID label
    """
    if data.label_scheme != "coarse":
        raise DataError("LID training needs coarse labels, map the fine labels first")
    pairs = [(s.origs, s.lids) for s in data.sentences]
    return train_perceptron(
        pairs, epochs, seed, labels=list(data.languages) + [UNKNOWN_LABEL]
    )


def tag_lid(model: LinearSequenceModel, sentences: Sequence[Sentence]) -> List[List[str]]:
    return [viterbi(model, s.origs) for s in sentences]


def tag_dataset(model: LinearSequenceModel, d: Dataset) -> Dataset:
    """Returns d with its LID column replaced by predicted labels."""
    labels = tag_lid(model, d.sentences)
    return Dataset(
        tuple(s.relabel(lids=l) for s, l in zip(d.sentences, labels)), None, d.languages
    )


def lid_accuracy(gold: Dataset, labels: Sequence[Sequence[str]]) -> Tuple[float, Dict[str, float]]:
    """Overall and per gold label accuracy of predicted labels, as fractions."""
    golds = [l for s in gold.sentences for l in s.lids]
    preds = [l for sentence in labels for l in sentence]
    overall = tag_accuracy(golds, preds)
    per_label = {}
    for label in sorted({l for l in golds if l is not None}):
        pairs = [(g, p) for g, p in zip(golds, preds) if g == label]
        per_label[label] = tag_accuracy([g for g, _ in pairs], [p for _, p in pairs])
    return overall, per_label


def rewrite_unknown(labels: Sequence[str], default: str) -> List[str]:
    """Replaces UN labels with the label of the previous word.

    A leading UN run takes the first following language label; a sentence
    without any language label gets default.
    """
    known = [l for l in labels if l != UNKNOWN_LABEL]
    previous = known[0] if known else default
    out = []
    for label in labels:
        if label != UNKNOWN_LABEL:
            previous = label
        out.append(previous)
    return out


def fragment_split(
    sentence: Sentence,
    labels: Sequence[str],
    default: str = DEFAULT_LANGUAGES[0],
) -> List[Tuple[List[Token], str]]:
    """Splits a sentence at every language switch after UN rewriting.

    Fragments are maximal runs of one language and concatenate back to the
    sentence.
    """
    if len(labels) != len(sentence):
        raise DataError(f"{len(labels)} LID labels for a sentence of {len(sentence)} tokens")
    fragments: List[Tuple[List[Token], str]] = []
    for token, label in zip(sentence, rewrite_unknown(labels, default)):
        if fragments and fragments[-1][1] == label:
            fragments[-1][0].append(token)
        else:
            fragments.append(([token], label))
    return fragments
