"""Per-language monolingual resources: lexicons, bigram models, embedding
stores and the replacement dictionary learned from training data."""

import math
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .constants import *
from .corpus import Dataset
from .utils import DataError, file_digest, read_input

from .validator import RESOURCE_KINDS


def _decode(data: bytes, what: str) -> str:
    try:
        return unicodedata.normalize("NFC", data.decode("utf-8"))
    except UnicodeDecodeError as e:
        raise DataError(f"{what} is not valid UTF-8 (byte offset {e.start})")


### lexicon


@dataclass(frozen=True)
class Lexicon:
    language: str
    entries: FrozenSet[str] = frozenset()

    def __contains__(self, word: object) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(sorted(self.entries))


def load_lexicon(data: bytes, language: str) -> Lexicon:
    """Reads a word list, one word per line. Surrounding whitespace and empty lines are ignored."""
    text = _decode(data, "lexicon")
    return Lexicon(language, frozenset(line.strip() for line in text.split("\n") if line.strip()))


def build_lexicon(lines: Iterable[str], language: str, min_count: int = 1) -> Lexicon:
    """Collects every token seen at least min_count times in a tokenized corpus."""
    if min_count < 1:
        raise ValueError(f"min_count must be positive, got {min_count}")
    counts = Counter(token for line in _dedupe(lines) for token in line.split())
    return Lexicon(language, frozenset(w for w, c in counts.items() if c >= min_count))


def write_lexicon(lexicon: Lexicon) -> bytes:
    return "".join(word + "\n" for word in lexicon).encode("utf-8")


### n-grams


def _dedupe(lines: Iterable[str]) -> List[str]:
    seen = set()
    unique = []
    for line in lines:
        line = unicodedata.normalize("NFC", line.strip())
        if line and line not in seen:
            seen.add(line)
            unique.append(line)
    return unique


@dataclass(frozen=True)
class NGramModel:
    """Unigram and bigram counts with add-alpha smoothing.

    ``<s>`` marks both sentence ends; it is counted once per sentence as a
    unigram, so every word's outgoing bigram count equals its unigram count.
    """

    language: str
    unigrams: Mapping[str, int] = field(default_factory=dict)
    bigrams: Mapping[Tuple[str, str], int] = field(default_factory=dict)
    alpha: float = 1.0

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError(f"smoothing alpha must be positive, got {self.alpha}")
        for pair in self.bigrams:
            if pair[0] not in self.unigrams or pair[1] not in self.unigrams:
                raise DataError(f"bigram {pair} uses a word without unigram count")
        object.__setattr__(self, "total_tokens", sum(self.unigrams.values()))
        object.__setattr__(self, "vocab_size", len(self.unigrams))

    @property
    def denominator(self) -> float:
        return self.alpha * (self.vocab_size + 1)

    def logprob(self, word: str, prev: Optional[str] = None) -> float:
        """Natural log probability of word, conditioned on prev when given.

        A word containing spaces is scored as a phrase, each part conditioned
        on the one before it.
        """
        logprob = 0.0
        for part in word.split(" "):
            if prev is None:
                numerator = self.unigrams.get(part, 0) + self.alpha
                denominator = self.total_tokens + self.denominator
            else:
                numerator = self.bigrams.get((prev, part), 0) + self.alpha
                denominator = self.unigrams.get(prev, 0) + self.denominator
            logprob += math.log(numerator / denominator)
            prev = part
        return logprob


def build_ngrams(lines: Iterable[str], alpha: float = 1.0, language: str = "") -> NGramModel:
    """Counts unigrams and bigrams over unique whitespace-tokenized lines.

    Raises:
        DataError: If the corpus holds no tokens
    """
    unigrams: Counter = Counter()
    bigrams: Counter = Counter()
    for line in _dedupe(lines):
        tokens = [BOUNDARY] + line.split() + [BOUNDARY]
        unigrams.update(tokens[:-1])
        bigrams.update(zip(tokens, tokens[1:]))
    if not unigrams:
        raise DataError("cannot build an n-gram model from an empty corpus")
    return NGramModel(language, dict(unigrams), dict(bigrams), alpha)


def ngram_logprob(m: NGramModel, word: str, prev: Optional[str] = None) -> float:
    return m.logprob(word, prev)


def write_ngrams(m: NGramModel) -> bytes:
    """Counts file: a ``ngrams<TAB>unigrams<TAB>bigrams`` header, then sorted
    ``1<TAB>word<TAB>count`` and ``2<TAB>prev<TAB>word<TAB>count`` lines."""
    lines = [f"ngrams\t{len(m.unigrams)}\t{len(m.bigrams)}\n"]
    lines += [f"1\t{w}\t{c}\n" for w, c in sorted(m.unigrams.items())]
    lines += [f"2\t{a}\t{b}\t{c}\n" for (a, b), c in sorted(m.bigrams.items())]
    return "".join(lines).encode("utf-8")


def load_ngrams(data: bytes, alpha: float = 1.0, language: str = "") -> NGramModel:
    lines = _decode(data, "n-gram file").split("\n")
    header = lines[0].split("\t")
    if len(header) != 3 or header[0] != "ngrams":
        raise DataError("missing n-gram file header", line=1)

    unigrams: Dict[str, int] = {}
    bigrams: Dict[Tuple[str, str], int] = {}
    for number, line in enumerate(lines[1:], 2):
        if not line:
            continue
        fields = line.split("\t")
        try:
            if fields[0] == "1" and len(fields) == 3:
                unigrams[fields[1]] = int(fields[2])
                continue
            if fields[0] == "2" and len(fields) == 4:
                bigrams[(fields[1], fields[2])] = int(fields[3])
                continue
        except ValueError:
            pass
        raise DataError(f"malformed n-gram line {line!r}", line=number)

    if (len(unigrams), len(bigrams)) != (int(header[1]), int(header[2])):
        raise DataError("n-gram file is truncated")
    return NGramModel(language, unigrams, bigrams, alpha)


### embeddings


@dataclass(frozen=True)
class EmbeddingStore:
    """Word vectors, stored unit-normalized as rows of one float64 matrix."""

    language: str
    words: Tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        if self.matrix.ndim != 2 or self.matrix.shape[0] != len(self.words):
            raise DataError("embedding matrix does not match the vocabulary")
        object.__setattr__(self, "index", {w: i for i, w in enumerate(self.words)})

    @property
    def dimension(self) -> int:
        return self.matrix.shape[1]

    def __contains__(self, word: object) -> bool:
        return word in self.index

    def __len__(self) -> int:
        return len(self.words)

    def vector(self, word: str) -> Optional[np.ndarray]:
        i = self.index.get(word)
        return None if i is None else self.matrix[i]

    def knn(self, word: str, k: int) -> List[Tuple[str, float]]:
        """The k nearest words by cosine similarity, excluding word itself.

        Equal similarities are ordered by word.
        """
        i = self.index.get(word)
        if i is None or k <= 0 or len(self.words) < 2:
            return []

        similarities = self.matrix @ self.matrix[i]
        similarities[i] = -np.inf
        if k < len(self.words) - 1:
            threshold = np.partition(similarities, -k)[-k]
            selected = np.flatnonzero(similarities >= threshold)
        else:
            selected = np.flatnonzero(similarities > -np.inf)

        ranked = sorted(selected, key=lambda j: (-similarities[j], self.words[j]))
        return [(self.words[j], float(similarities[j])) for j in ranked[:k]]


def load_embeddings(data: bytes, language: str = "") -> EmbeddingStore:
    """Reads text format vectors, ``word v1 ... vd`` per line, with an optional
    ``count dim`` header. Only the first vector of a repeated word is kept.

    Raises:
        DataError: On inconsistent dimensions, unparsable numbers or zero vectors
    """
    lines = _decode(data, "embedding file").split("\n")
    dimension = None
    start = 0
    if lines and len(lines[0].split()) == 2:
        try:
            count, dimension = (int(v) for v in lines[0].split())
            start = 1
        except ValueError:
            dimension = None

    words: List[str] = []
    rows: List[List[float]] = []
    seen = set()
    for number, line in enumerate(lines[start:], start + 1):
        fields = line.split()
        if not fields:
            continue
        word, values = fields[0], fields[1:]
        if dimension is None:
            dimension = len(values)
        if len(values) != dimension or not values:
            raise DataError(
                f"vector of dimension {len(values)}, expected {dimension}", line=number
            )
        if word in seen:
            continue
        try:
            rows.append([float(v) for v in values])
        except ValueError:
            raise DataError(f"invalid vector for {word!r}", line=number)
        seen.add(word)
        words.append(word)

    matrix = np.array(rows, dtype=np.float64).reshape(len(rows), dimension or 0)
    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0) or not np.all(np.isfinite(norms)):
        bad = words[int(np.flatnonzero((norms == 0) | ~np.isfinite(norms))[0])]
        raise DataError(f"the vector of {bad!r} cannot be normalized")
    return EmbeddingStore(language, tuple(words), matrix / norms[:, None])


def knn(s: EmbeddingStore, word: str, k: int) -> List[Tuple[str, float]]:
    return s.knn(word, k)


### replacement dictionary


@dataclass(frozen=True)
class ReplacementDict:
    """Observed normalizations per original word, most frequent first."""

    map: Mapping[str, Tuple[Tuple[str, int], ...]] = field(default_factory=dict)
    language: Optional[str] = None

    def lookup(self, word: str) -> Tuple[Tuple[str, int], ...]:
        return self.map.get(word, ())

    def count(self, word: str, norm: str) -> int:
        return dict(self.lookup(word)).get(norm, 0)

    def __len__(self) -> int:
        return len(self.map)

    def to_json(self) -> List[Any]:
        return [[orig, [list(r) for r in replacements]] for orig, replacements in sorted(self.map.items())]

    @classmethod
    def from_json(cls, data: Sequence[Any], language: Optional[str] = None) -> "ReplacementDict":
        try:
            return cls(
                {orig: tuple((norm, int(count)) for norm, count in reps) for orig, reps in data},
                language,
            )
        except (TypeError, ValueError):
            raise DataError("malformed replacement dictionary")


def build_replacement_dict(train: Dataset, language: Optional[str] = None) -> ReplacementDict:
    """Counts orig -> norm pairs of a training set, identity pairs included.
    Tokens taking part in a merge are left out."""
    counts: Dict[str, Counter] = {}
    for sentence in train.sentences:
        for i, token in enumerate(sentence):
            if token.is_merge:
                continue
            if i + 1 < len(sentence) and sentence[i + 1].is_merge:
                continue
            counts.setdefault(token.orig, Counter())[token.norm] += 1
    return ReplacementDict(
        {
            orig: tuple(sorted(c.items(), key=lambda item: (-item[1], item[0])))
            for orig, c in counts.items()
        },
        language,
    )


def mfr_lookup(d: ReplacementDict, word: str) -> str:
    """Most frequent replacement of word. A tie involving the word itself
    keeps it; unknown words map to themselves."""
    replacements = d.lookup(word)
    if not replacements:
        return word
    best = replacements[0][1]
    tied = [norm for norm, count in replacements if count == best]
    return word if word in tied else tied[0]


### bundles


@dataclass(frozen=True)
class LanguageResources:
    language: str
    lexicon: Lexicon
    ngrams: NGramModel
    embeddings: Optional[EmbeddingStore] = None
    replacements: ReplacementDict = field(default_factory=ReplacementDict)

    def __post_init__(self) -> None:
        members = [self.lexicon, self.ngrams] + ([self.embeddings] if self.embeddings else [])
        for member in members:
            if member.language != self.language:
                raise DataError(
                    f"{type(member).__name__} for {member.language!r} in the {self.language!r} resources"
                )
        if self.replacements.language not in (None, self.language):
            raise DataError(
                f"replacement dictionary for {self.replacements.language!r} in the {self.language!r} resources"
            )


def load_resources(
    config: Mapping[str, Any],
    language: str,
    replacements: Optional[ReplacementDict] = None,
) -> LanguageResources:
    """Loads the resources configured for one language. Kinds that are not
    configured give an empty lexicon, n-gram model or no embeddings."""
    entry = config.get("resources", {}).get(language, {})
    alpha = entry.get("alpha", 1.0)

    lexicon = Lexicon(language)
    if "lexicon" in entry:
        lexicon = load_lexicon(read_input(entry["lexicon"]), language)

    ngrams = NGramModel(language, alpha=alpha)
    if "ngrams" in entry:
        ngrams = load_ngrams(read_input(entry["ngrams"]), alpha, language)
    elif "corpus" in entry:
        ngrams = build_ngrams(_decode(read_input(entry["corpus"]), "corpus").split("\n"), alpha, language)

    embeddings = None
    if "embeddings" in entry:
        embeddings = load_embeddings(read_input(entry["embeddings"]), language)

    return LanguageResources(
        language, lexicon, ngrams, embeddings, replacements or ReplacementDict()
    )


def resource_table(config: Mapping[str, Any]) -> Dict[str, Dict[str, Dict[str, str]]]:
    """Path and SHA-256 digest of every configured resource file."""
    table: Dict[str, Dict[str, Dict[str, str]]] = {}
    for language, entry in sorted(config.get("resources", {}).items()):
        for kind in RESOURCE_KINDS:
            if kind in entry:
                table.setdefault(language, {})[kind] = {
                    "path": str(entry[kind]),
                    "sha256": file_digest(entry[kind]),
                }
    return table


def verify_resource_table(table: Mapping[str, Mapping[str, Mapping[str, str]]]) -> None:
    """Raises:
    DataError: If a referenced resource file is missing or its content changed
    """
    for language, kinds in table.items():
        for kind, ref in kinds.items():
            path = Path(ref["path"])
            if not path.is_file():
                raise DataError(f"the {language} {kind} file {path} is missing")
            if file_digest(path) != ref["sha256"]:
                raise DataError(f"the {language} {kind} file {path} changed since training")
