"""POS tagging of normalized text and its evaluation against source tokens."""

from typing import List, Mapping, Optional, Sequence, Tuple

from .constants import *
from .corpus import AlignmentLink, Dataset, expand_outputs, project_tags_merge
from .evaluation import ConfusionMatrix, confusion_matrix, pos_eval_first, pos_eval_oracle
from .seqlab import LinearSequenceModel, train_perceptron, viterbi
from .utils import DataError

RULES = ("oracle", "first")


def train_pos(data: Dataset, epochs: int = 10, seed: int = DEFAULT_SEED) -> LinearSequenceModel:
    """Trains a tagger on the NORM words and POS tags of data, usually read from CoNLL-U."""
    return train_perceptron([(s.norms, s.pos_tags) for s in data.sentences], epochs, seed)


def tag_outputs(
    model: LinearSequenceModel, outputs: Sequence[Sequence[str]]
) -> List[Tuple[List[str], List[AlignmentLink], List[str]]]:
    """Tags the words of normalized sentences. Returns the output words,
    their links to the source tokens and their tags per sentence."""
    tagged = []
    for out in outputs:
        words, links = expand_outputs(out)
        tagged.append((words, links, viterbi(model, words)))
    return tagged


def tag_dataset(
    model: LinearSequenceModel,
    d: Dataset,
    exceptions: Optional[Mapping[Tuple[str, ...], str]] = None,
) -> Dataset:
    """Fills the POS column of d by tagging its NORM column. A token
    normalized to several words gets their merged tag; merged tokens share
    the tag of their word."""
    sentences = []
    for sentence, (words, links, tags) in zip(d.sentences, tag_outputs(model, [s.norms for s in d.sentences])):
        pos: List[Optional[str]] = [None] * len(sentence)
        for link in links:
            _, tag = project_tags_merge([(words[j], None, tags[j]) for j in link.tgt_range], exceptions)
            for i in link.src_range:
                pos[i] = tag
        sentences.append(sentence.relabel(pos=pos))
    return Dataset(tuple(sentences), None, d.languages)


def gold_tags(gold: Dataset) -> List[List[str]]:
    """Raises:
    DataError: If a gold token has no POS tag
    """
    tags = [s.pos_tags for s in gold.sentences]
    if any(t is None for sentence in tags for t in sentence):
        raise DataError("POS evaluation needs a gold POS tag on every token")
    return tags


def selected_tags(
    gold_pos: Sequence[Sequence[str]],
    tagged: Sequence[Tuple[List[str], List[AlignmentLink], List[str]]],
    rule: str = "oracle",
) -> List[str]:
    """The predicted tag credited to each source token: under the oracle
    rule the gold tag when an aligned word has it, else the first aligned
    word's tag."""
    if rule not in RULES:
        raise ValueError(f"unknown tag selection rule {rule!r}")
    chosen = []
    for tags, (_, links, predicted) in zip(gold_pos, tagged):
        for link in links:
            options = [predicted[j] for j in link.tgt_range]
            for i in link.src_range:
                chosen.append(tags[i] if rule == "oracle" and tags[i] in options else options[0])
    return chosen


def pos_evaluate(
    model: LinearSequenceModel,
    gold: Dataset,
    outputs: Sequence[Sequence[str]],
    rule: str = "oracle",
) -> Tuple[float, ConfusionMatrix]:
    """Tags normalized outputs and scores them against the gold POS tags of
    the source tokens. Returns the accuracy and the confusion matrix."""
    if len(outputs) != len(gold.sentences):
        raise DataError(f"{len(outputs)} output sentences for {len(gold.sentences)} gold sentences")
    tags = gold_tags(gold)
    tagged = tag_outputs(model, outputs)
    links = [links for _, links, _ in tagged]
    predicted = [p for _, _, p in tagged]
    score = (pos_eval_oracle if rule == "oracle" else pos_eval_first)(tags, links, predicted)
    matrix = confusion_matrix([t for s in tags for t in s], selected_tags(tags, tagged, rule))
    return score, matrix
