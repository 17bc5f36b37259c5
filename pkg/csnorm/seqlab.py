"""Linear-chain sequence labeling with sparse features, Viterbi decoding and
averaged structured perceptron training. Used by both the LID and POS taggers."""

import unicodedata
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .constants import *
from .utils import DataError

WINDOW = 2
MAX_NGRAM = 4
MAX_AFFIX = 3

LabeledSentence = Tuple[Sequence[str], Sequence[str]]


def word_shape(word: str) -> str:
    """Xxxx style shape with repeated classes collapsed: ``Nerde`` -> ``Xx``, ``2019`` -> ``d``."""
    shape = []
    for c in word:
        if c.isupper():
            s = "X"
        elif c.islower():
            s = "x"
        elif c.isdigit():
            s = "d"
        else:
            s = c
        if not shape or shape[-1] != s:
            shape.append(s)
    return "".join(shape)


def is_punct(word: str) -> bool:
    return all(unicodedata.category(c).startswith(("P", "S")) for c in word)


def emission_features(words: Sequence[str], i: int) -> List[str]:
    """Feature strings of position i. Depends only on the words, never on labels."""
    word = words[i]
    lower = word.lower()
    features = ["bias", "w=" + lower, "shape=" + word_shape(word)]
    for n in range(1, MAX_NGRAM + 1):
        for start in range(len(lower) - n + 1):
            features.append(f"c{n}=" + lower[start : start + n])
    for n in range(1, min(MAX_AFFIX, len(lower)) + 1):
        features.append(f"p{n}=" + lower[:n])
        features.append(f"s{n}=" + lower[-n:])
    if word.isdigit():
        features.append("digit")
    if is_punct(word):
        features.append("punct")
    if not word.isascii():
        features.append("nonascii")
    for offset in range(-WINDOW, WINDOW + 1):
        if offset == 0:
            continue
        j = i + offset
        context = words[j].lower() if 0 <= j < len(words) else BOUNDARY
        features.append(f"w[{offset}]=" + context)
    return list(dict.fromkeys(features))


def decode(emissions: np.ndarray, transitions: np.ndarray) -> List[int]:
    """Viterbi over an (n, L) emission score matrix.

    transitions has L + 1 rows: row p < L scores label p followed by each
    label, row L scores each label at the sentence start. Ties go to the
    lower label index.
    """
    n, n_labels = emissions.shape
    start = transitions[n_labels]
    pair = transitions[:n_labels]

    delta = start + emissions[0]
    backpointers = np.zeros((n, n_labels), dtype=np.int64)
    for t in range(1, n):
        scores = delta[:, None] + pair
        backpointers[t] = np.argmax(scores, axis=0)
        delta = scores[backpointers[t], np.arange(n_labels)] + emissions[t]

    best = [int(np.argmax(delta))]
    for t in range(n - 1, 0, -1):
        best.append(int(backpointers[t][best[-1]]))
    return best[::-1]


@dataclass
class LinearSequenceModel:
    labels: Tuple[str, ...]
    weights: Dict[str, np.ndarray] = field(default_factory=dict)
    transitions: Optional[np.ndarray] = None
    epochs: int = 0
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("a sequence model needs at least one label")
        self.labels = tuple(self.labels)
        if self.transitions is None:
            self.transitions = np.zeros((len(self.labels) + 1, len(self.labels)))
        self.label_index = {label: i for i, label in enumerate(self.labels)}

    def emission_scores(self, words: Sequence[str]) -> np.ndarray:
        scores = np.zeros((len(words), len(self.labels)))
        for i in range(len(words)):
            for feature in emission_features(words, i):
                vector = self.weights.get(feature)
                if vector is not None:
                    scores[i] += vector
        return scores

    def to_json(self) -> Dict[str, Any]:
        return {
            "labels": list(self.labels),
            "weights": {
                f: v.tolist() for f, v in sorted(self.weights.items()) if np.any(v)
            },
            "transitions": self.transitions.tolist(),
            "epochs": self.epochs,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "LinearSequenceModel":
        try:
            labels = tuple(data["labels"])
            model = cls(
                labels,
                {f: np.array(v, dtype=np.float64) for f, v in data["weights"].items()},
                np.array(data["transitions"], dtype=np.float64),
                int(data["epochs"]),
                int(data["seed"]),
            )
        except (KeyError, TypeError, ValueError):
            raise DataError("malformed sequence model")
        if model.transitions.shape != (len(labels) + 1, len(labels)) or any(
            v.shape != (len(labels),) for v in model.weights.values()
        ):
            raise DataError("sequence model weights do not match its labels")
        return model


def viterbi(m: LinearSequenceModel, sent: Sequence[str]) -> List[str]:
    """Highest scoring label sequence of a non-empty sentence."""
    if not sent:
        raise ValueError("cannot decode an empty sentence")
    return [m.labels[i] for i in decode(m.emission_scores(sent), m.transitions)]


def sequence_score(m: LinearSequenceModel, sent: Sequence[str], labels: Sequence[str]) -> float:
    emissions = m.emission_scores(sent)
    indices = [m.label_index[label] for label in labels]
    score = m.transitions[len(m.labels), indices[0]]
    for t, j in enumerate(indices):
        score += emissions[t, j]
        if t:
            score += m.transitions[indices[t - 1], j]
    return float(score)


def train_perceptron(
    data: Sequence[LabeledSentence],
    epochs: int = 10,
    seed: int = DEFAULT_SEED,
    labels: Optional[Sequence[str]] = None,
) -> LinearSequenceModel:
    """Averaged structured perceptron.

    Each epoch visits the sentences in the order of
    ``np.random.default_rng(seed).permutation`` (one generator for the whole
    run) and updates on every Viterbi mistake. The returned weights are the
    average of the weights after each visited sentence.

    Raises:
        DataError: For empty data, unlabeled tokens or sentence/label length mismatches
    """
    if not data:
        raise DataError("cannot train a tagger on empty data")
    for words, gold in data:
        if not words:
            raise DataError("cannot train on an empty sentence")
        if len(words) != len(gold):
            raise DataError(f"{len(gold)} labels for a sentence of {len(words)} words")
        if any(label is None for label in gold):
            raise DataError("every token needs a label for training")

    label_set = tuple(sorted(set(labels or ()) | {l for _, gold in data for l in gold}))
    model = LinearSequenceModel(label_set, epochs=epochs, seed=seed)
    n_labels = len(label_set)

    totals: Dict[str, np.ndarray] = {}
    transition_totals = np.zeros_like(model.transitions)
    features = [[emission_features(words, i) for i in range(len(words))] for words, _ in data]
    golds = [[model.label_index[l] for l in gold] for _, gold in data]

    rng = np.random.default_rng(seed)
    c = 0
    for _ in range(epochs):
        for k in rng.permutation(len(data)):
            gold = golds[k]
            emissions = np.zeros((len(gold), n_labels))
            for i, fs in enumerate(features[k]):
                for f in fs:
                    if f in model.weights:
                        emissions[i] += model.weights[f]
            pred = decode(emissions, model.transitions)

            if pred != gold:
                for i, (g, p) in enumerate(zip(gold, pred)):
                    if g != p:
                        for f in features[k][i]:
                            vector = model.weights.setdefault(f, np.zeros(n_labels))
                            total = totals.setdefault(f, np.zeros(n_labels))
                            vector[g] += 1
                            vector[p] -= 1
                            total[g] += c
                            total[p] -= c
                    g_prev = gold[i - 1] if i else n_labels
                    p_prev = pred[i - 1] if i else n_labels
                    if (g_prev, g) != (p_prev, p):
                        model.transitions[g_prev, g] += 1
                        model.transitions[p_prev, p] -= 1
                        transition_totals[g_prev, g] += c
                        transition_totals[p_prev, p] -= c
            c += 1

    if c:
        for f, total in totals.items():
            model.weights[f] = model.weights[f] - total / c
        model.transitions = model.transitions - transition_totals / c
    return model


def tag_accuracy(gold: Sequence[str], pred: Sequence[str]) -> float:
    """Fraction of positions where pred equals gold.

    Raises:
        DataError: If the sequences differ in length
    """
    if len(gold) != len(pred):
        raise DataError(f"{len(pred)} predicted labels for {len(gold)} gold labels")
    if not gold:
        return 0.0
    return sum(g == p for g, p in zip(gold, pred)) / len(gold)
