"""Normalization corpora: data model, file formats, statistics, folds, token
alignment and tag projection.

Norm file format: UTF-8, LF line endings, one token per line with 2-4 TAB
separated fields ``ORIG NORM [LID] [POS]``. A blank line ends a sentence.
``__MERGE__`` in NORM marks a continuation token of an n:1 merge, whose head
token carries the full normalization. ``_`` stands for an absent LID when a
POS tag follows.
"""

import math
import unicodedata
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .constants import *
from .utils import DataError, levenshtein

LABEL_SCHEMES = ("fine", "coarse")

# fine labels that carry no content language
NON_LANGUAGE_LABELS = {"Lang3", "Ambig", "Other", "NE"}

Segment = Tuple[str, Optional[str], Optional[str]]


@dataclass(frozen=True)
class Token:
    orig: str
    norm: str
    lid: Optional[str] = None
    pos: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.orig or any(c.isspace() for c in self.orig):
            raise DataError(
                f"original word {self.orig!r} must be non-empty and contain no whitespace"
            )
        if not self.norm:
            raise DataError(f"empty normalization for {self.orig!r}")
        if (
            self.norm.strip(" ") != self.norm
            or "  " in self.norm
            or any(c.isspace() and c != " " for c in self.norm)
        ):
            raise DataError(
                f"normalization {self.norm!r} may only contain single internal spaces"
            )

    @property
    def is_merge(self) -> bool:
        return self.norm == MERGE_MARKER

    @property
    def is_split(self) -> bool:
        return " " in self.norm

    @property
    def is_normalized(self) -> bool:
        return self.norm != self.orig


@dataclass(frozen=True)
class Sentence:
    tokens: Tuple[Token, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise DataError("a sentence needs at least one token")
        if self.tokens[0].is_merge:
            raise DataError("merge continuation marker at sentence start")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __getitem__(self, index: int) -> Token:
        return self.tokens[index]

    @property
    def origs(self) -> List[str]:
        return [t.orig for t in self.tokens]

    @property
    def norms(self) -> List[str]:
        return [t.norm for t in self.tokens]

    @property
    def lids(self) -> List[Optional[str]]:
        return [t.lid for t in self.tokens]

    @property
    def pos_tags(self) -> List[Optional[str]]:
        return [t.pos for t in self.tokens]

    def relabel(
        self,
        lids: Optional[Sequence[Optional[str]]] = None,
        pos: Optional[Sequence[Optional[str]]] = None,
    ) -> "Sentence":
        """Returns a copy with the LID and/or POS column replaced."""
        for labels in (lids, pos):
            if labels is not None and len(labels) != len(self.tokens):
                raise DataError(
                    f"got {len(labels)} labels for a sentence of {len(self.tokens)} tokens"
                )
        return Sentence(
            tuple(
                replace(
                    t,
                    lid=t.lid if lids is None else lids[i],
                    pos=t.pos if pos is None else pos[i],
                )
                for i, t in enumerate(self.tokens)
            )
        )


def detect_label_scheme(sentences: Sequence[Sentence], languages: Sequence[str]) -> str:
    coarse = set(languages) | {UNKNOWN_LABEL}
    for sentence in sentences:
        for token in sentence:
            if token.lid is not None and token.lid not in coarse:
                return "fine"
    return "coarse"


@dataclass(frozen=True)
class Dataset:
    sentences: Tuple[Sentence, ...] = ()
    label_scheme: Optional[str] = None
    languages: Tuple[str, str] = DEFAULT_LANGUAGES

    def __post_init__(self) -> None:
        object.__setattr__(self, "sentences", tuple(self.sentences))
        object.__setattr__(self, "languages", tuple(self.languages))
        if len(self.languages) != 2 or self.languages[0] == self.languages[1]:
            raise ValueError(f"a dataset needs two different languages, got {self.languages}")
        detected = detect_label_scheme(self.sentences, self.languages)
        if self.label_scheme is None:
            object.__setattr__(self, "label_scheme", detected)
        elif self.label_scheme not in LABEL_SCHEMES:
            raise ValueError(f"unknown label scheme {self.label_scheme!r}")
        elif self.label_scheme == "coarse" and detected == "fine":
            raise DataError("dataset declared coarse but contains fine LID labels")

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)

    @property
    def n_tokens(self) -> int:
        return sum(len(s) for s in self.sentences)

    def tokens(self) -> Iterator[Token]:
        for sentence in self.sentences:
            yield from sentence

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset(
            tuple(self.sentences[i] for i in indices),
            self.label_scheme,
            self.languages,
        )

    def with_sentences(self, sentences: Sequence[Sentence]) -> "Dataset":
        return Dataset(tuple(sentences), None, self.languages)


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignment: Tuple[int, ...]
    seed: int

    def test_indices(self, fold: int) -> List[int]:
        return [i for i, f in enumerate(self.assignment) if f == fold]

    def train_indices(self, fold: int) -> List[int]:
        return [i for i, f in enumerate(self.assignment) if f != fold]


@dataclass(frozen=True)
class AlignmentLink:
    src_span: Tuple[int, int]
    tgt_span: Tuple[int, int]
    kind: str

    def __post_init__(self) -> None:
        if self.src_span[0] >= self.src_span[1] or self.tgt_span[0] >= self.tgt_span[1]:
            raise ValueError(f"empty alignment span in {self}")

    @property
    def src_range(self) -> range:
        return range(*self.src_span)

    @property
    def tgt_range(self) -> range:
        return range(*self.tgt_span)


def link_kind(n_src: int, n_tgt: int) -> str:
    if n_src > 1:
        return "n:1"
    if n_tgt > 1:
        return "1:n"
    return "1:1"


@dataclass(frozen=True)
class CorpusStats:
    n_words: int
    pct_norm: float
    pct_split: float
    pct_merge: float
    cmi: Optional[float]
    n_sentences: int = 0
    n_split: int = 0
    n_merge: int = 0
    n_unnormalized_sentences: int = 0
    n_high_norm_sentences: int = 0

    HEADER = ("#words", "%norm", "%split", "%merge", "CMI")

    def row(self) -> Tuple:
        return (
            self.n_words,
            self.pct_norm,
            self.pct_split,
            self.pct_merge,
            "-" if self.cmi is None else self.cmi,
        )


### norm files


def parse_norm_file(data: bytes, languages: Sequence[str] = DEFAULT_LANGUAGES) -> Dataset:
    """Parses a norm file. All text is NFC normalized.

    Raises:
        DataError: On invalid UTF-8, a wrong field count, an empty NORM field,
            a merge marker at sentence start or an invalid token, reporting the
            line number
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise DataError(f"input is not valid UTF-8 (byte offset {e.start})")

    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    sentences: List[Sentence] = []
    current: List[Token] = []
    for number, line in enumerate(lines, 1):
        if line == "":
            if current:
                sentences.append(Sentence(tuple(current)))
                current = []
            continue

        fields = [unicodedata.normalize("NFC", f) for f in line.split("\t")]
        if not 2 <= len(fields) <= 4:
            raise DataError(
                f"expected 2 to 4 tab separated fields, found {len(fields)}", line=number
            )
        orig, norm = fields[0], fields[1]
        lid = fields[2] if len(fields) > 2 and fields[2] != "_" else None
        pos = fields[3] if len(fields) > 3 and fields[3] != "_" else None

        if not norm:
            raise DataError("empty normalization field", line=number)
        if norm == MERGE_MARKER and not current:
            raise DataError("merge marker at sentence start", line=number)
        try:
            current.append(Token(orig, norm, lid, pos))
        except DataError as e:
            raise DataError(str(e), line=number)

    if current:
        sentences.append(Sentence(tuple(current)))

    return Dataset(tuple(sentences), None, tuple(languages))


def write_norm_file(d: Dataset) -> bytes:
    out = []
    for sentence in d.sentences:
        for t in sentence:
            fields = [t.orig, t.norm]
            if t.pos is not None:
                fields += [t.lid if t.lid is not None else "_", t.pos]
            elif t.lid is not None:
                fields.append(t.lid)
            out.append("\t".join(fields) + "\n")
        out.append("\n")
    return "".join(out).encode("utf-8")


def parse_text_file(data: bytes, languages: Sequence[str] = DEFAULT_LANGUAGES) -> Dataset:
    """Reads raw text, one whitespace tokenized sentence per line, as a
    dataset whose NORM column repeats ORIG. Blank lines are skipped."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise DataError(f"input is not valid UTF-8 (byte offset {e.start})")
    sentences = [
        Sentence(tuple(Token(w, w) for w in unicodedata.normalize("NFC", line).split()))
        for line in text.split("\n")
        if line.strip()
    ]
    return Dataset(tuple(sentences), None, tuple(languages))


def dataset_from_outputs(d: Dataset, outputs: Sequence[Sequence[str]]) -> Dataset:
    """Builds a dataset pairing the original words of d with predicted normalizations."""
    if len(outputs) != len(d.sentences):
        raise DataError(
            f"got outputs for {len(outputs)} sentences, expected {len(d.sentences)}"
        )
    sentences = []
    for sentence, out in zip(d.sentences, outputs):
        if len(out) != len(sentence):
            raise DataError(
                f"got {len(out)} outputs for a sentence of {len(sentence)} tokens"
            )
        sentences.append(
            Sentence(tuple(replace(t, norm=o) for t, o in zip(sentence, out)))
        )
    return Dataset(tuple(sentences), None, d.languages)


### statistics


def cmi(labels: Sequence[str]) -> float:
    """Code-mixing index of one sentence: the percentage of language-tagged
    tokens outside the sentence's majority language. UN tokens are ignored."""
    if not labels:
        raise ValueError("the code-mixing index of an empty sentence is undefined")
    counts = Counter(label for label in labels if label != UNKNOWN_LABEL)
    n = sum(counts.values())
    if n == 0:
        return 0.0
    return 100.0 * (n - max(counts.values())) / n


def compute_stats(d: Dataset, with_cmi: bool = True) -> CorpusStats:
    """Table-1 style statistics of a dataset.

    Raises:
        DataError: If with_cmi is set and a token has no LID label
    """
    n_words = d.n_tokens
    n_norm = n_split = n_merge = 0
    unnormalized = high_norm = 0
    sentence_cmis = []

    for sentence in d.sentences:
        normalized = sum(t.is_normalized for t in sentence)
        n_norm += normalized
        n_split += sum(t.is_split for t in sentence)
        n_merge += sum(t.is_merge for t in sentence)
        if not normalized:
            unnormalized += 1
        if normalized / len(sentence) > 0.7:
            high_norm += 1

        if with_cmi:
            if any(t.lid is None for t in sentence):
                raise DataError("the code-mixing index needs LID labels on every token")
            sentence_cmis.append(
                cmi([map_labels_coarse(t.lid, d.languages) for t in sentence])
            )

    def percent(count: int) -> float:
        return 100.0 * count / n_words if n_words else 0.0

    corpus_cmi = None
    if with_cmi:
        corpus_cmi = float(np.mean(sentence_cmis)) if sentence_cmis else 0.0

    return CorpusStats(
        n_words=n_words,
        pct_norm=percent(n_norm),
        pct_split=percent(n_split),
        pct_merge=percent(n_merge),
        cmi=corpus_cmi,
        n_sentences=len(d.sentences),
        n_split=n_split,
        n_merge=n_merge,
        n_unnormalized_sentences=unnormalized,
        n_high_norm_sentences=high_norm,
    )


### folds


def make_folds(d: Dataset, k: int, seed: int = DEFAULT_SEED) -> FoldPlan:
    """Assigns every sentence to one of k folds; fold sizes differ by at most one."""
    if k < 2:
        raise ValueError(f"need at least 2 folds, got {k}")
    n = len(d.sentences)
    if k > n:
        raise DataError(f"cannot make {k} folds from {n} sentences")

    order = np.random.default_rng(seed).permutation(n)
    assignment = [0] * n
    for rank, index in enumerate(order):
        assignment[int(index)] = rank % k
    return FoldPlan(k, tuple(assignment), seed)


def split_fold(d: Dataset, plan: FoldPlan, fold: int) -> Tuple[Dataset, Dataset]:
    if len(plan.assignment) != len(d.sentences):
        raise DataError("the fold plan was made for a different dataset")
    return d.subset(plan.train_indices(fold)), d.subset(plan.test_indices(fold))


def train_test_split(d: Dataset, test_ratio: float, seed: int = DEFAULT_SEED) -> Tuple[Dataset, Dataset]:
    """Sentence level train/test partition; both parts keep corpus order."""
    if not 0 < test_ratio < 1:
        raise ValueError(f"test ratio must be between 0 and 1, got {test_ratio}")
    n = len(d.sentences)
    if n < 2:
        raise DataError(f"cannot split a dataset of {n} sentences")

    n_test = min(max(int(math.floor(n * test_ratio + 0.5)), 1), n - 1)
    order = np.random.default_rng(seed).permutation(n)
    test = sorted(int(i) for i in order[:n_test])
    train = sorted(int(i) for i in order[n_test:])
    return d.subset(train), d.subset(test)


### alignment


def _alignment_moves(n_src: int, n_tgt: int) -> List[Tuple[int, int]]:
    # 1:1, 1:2, 2:1, 1:3, 3:1, ... in order of preference
    longest = max(2, math.ceil(max(n_src, n_tgt) / min(n_src, n_tgt)))
    moves = [(1, 1)]
    for size in range(2, longest + 1):
        moves += [(1, size), (size, 1)]
    return moves


def align_tokens(src: Sequence[str], tgt: Sequence[str]) -> List[AlignmentLink]:
    """Monotone token alignment minimizing the total character edit distance.

    Links group one token with one or more tokens on the other side; spans are
    compared by concatenating their tokens. Ties prefer 1:1 over 1:2 over 2:1.
    Longer 1:n and n:1 links are only used when the length ratio of the two
    sequences requires them.
    """
    if not src or not tgt:
        raise ValueError("cannot align an empty token sequence")

    n, m = len(src), len(tgt)
    moves = _alignment_moves(n, m)
    inf = float("inf")
    cost = [[inf] * (m + 1) for _ in range(n + 1)]
    choice: List[List[Optional[Tuple[int, int]]]] = [[None] * (m + 1) for _ in range(n + 1)]
    cost[n][m] = 0

    for i in range(n, -1, -1):
        for j in range(m, -1, -1):
            if i == n and j == m:
                continue
            for ds, dt in moves:
                ni, nj = i + ds, j + dt
                if ni > n or nj > m or cost[ni][nj] == inf:
                    continue
                c = cost[ni][nj] + levenshtein("".join(src[i:ni]), "".join(tgt[j:nj]))
                if c < cost[i][j]:
                    cost[i][j] = c
                    choice[i][j] = (ds, dt)

    links = []
    i = j = 0
    while (i, j) != (n, m):
        ds, dt = choice[i][j]
        links.append(AlignmentLink((i, i + ds), (j, j + dt), link_kind(ds, dt)))
        i, j = i + ds, j + dt
    return links


def alignment_cost(src: Sequence[str], tgt: Sequence[str], links: Sequence[AlignmentLink]) -> int:
    return sum(
        levenshtein(
            "".join(src[link.src_span[0] : link.src_span[1]]),
            "".join(tgt[link.tgt_span[0] : link.tgt_span[1]]),
        )
        for link in links
    )


def check_links(links: Sequence[AlignmentLink], n_src: int, n_tgt: int) -> None:
    """Checks that links are monotone, contiguous and cover both sequences.

    Raises:
        DataError: For a broken alignment
    """
    i = j = 0
    for link in links:
        if link.src_span[0] != i or link.tgt_span[0] != j:
            raise DataError(f"alignment link {link} is not contiguous")
        i, j = link.src_span[1], link.tgt_span[1]
    if (i, j) != (n_src, n_tgt):
        raise DataError(
            f"alignment covers {i}/{n_src} source and {j}/{n_tgt} target tokens"
        )


def expand_outputs(outputs: Sequence[str]) -> Tuple[List[str], List[AlignmentLink]]:
    """Expands one sentence's per-token normalizations into output words.

    A normalization containing spaces becomes several words (1:n), a merge
    marker joins its token to the previous link (n:1).
    """
    words: List[str] = []
    spans: List[List[int]] = []
    for i, out in enumerate(outputs):
        if out == MERGE_MARKER:
            if not spans:
                raise DataError("merge marker at sentence start")
            spans[-1][1] = i + 1
            continue
        parts = out.split(" ")
        spans.append([i, i + 1, len(words), len(words) + len(parts)])
        words.extend(parts)
    links = [
        AlignmentLink((s0, s1), (t0, t1), link_kind(s1 - s0, t1 - t0))
        for s0, s1, t0, t1 in spans
    ]
    return words, links


### labels and tag projection


def map_labels_coarse(fine: str, languages: Sequence[str] = DEFAULT_LANGUAGES) -> str:
    """Maps a fine LID label onto {lang1, lang2, UN}.

    Named entities take their language, Mixed maps to lang2 (words of lang2
    inflected in lang1), Lang3/Ambig/Other map to UN. Coarse labels map to
    themselves.

    Raises:
        DataError: For an unknown label
    """
    lang1, lang2 = languages
    if fine in (lang1, lang2, UNKNOWN_LABEL):
        return fine
    if fine == MIXED_LABEL:
        return lang2
    if fine in NON_LANGUAGE_LABELS:
        return UNKNOWN_LABEL
    if fine.startswith("NE."):
        inner = fine[3:]
        if inner in (lang1, lang2):
            return inner
        if inner == MIXED_LABEL:
            return lang2
        if inner in NON_LANGUAGE_LABELS:
            return UNKNOWN_LABEL
    raise DataError(f"unknown LID label {fine!r}")


def map_dataset_coarse(d: Dataset) -> Dataset:
    sentences = [
        s.relabel(lids=[None if l is None else map_labels_coarse(l, d.languages) for l in s.lids])
        for s in d.sentences
    ]
    return Dataset(tuple(sentences), "coarse", d.languages)


def parse_merge_exceptions(table: Mapping[str, str]) -> Dict[Tuple[str, ...], str]:
    """Reads the configured POS merge exceptions: ``"NOUN VERB": NOUN``."""
    return {tuple(key.split()): value for key, value in table.items()}


def project_tags_merge(
    segments: Sequence[Segment],
    exceptions: Optional[Mapping[Tuple[str, ...], str]] = None,
) -> Tuple[Optional[str], Optional[str]]:
    """Merges the (form, lid, pos) tags of segments that form one word.

    Equal LIDs are kept, differing LIDs give Mixed. The POS is the last
    segment's unless the POS sequence is in the exception table.
    """
    if not segments:
        raise ValueError("cannot merge zero segments")
    lids = [segment[1] for segment in segments]
    lid = lids[0] if all(l == lids[0] for l in lids) else MIXED_LABEL
    tags = tuple(segment[2] for segment in segments)
    pos = tags[-1]
    if exceptions and len(tags) > 1:
        pos = exceptions.get(tags, pos)
    return lid, pos


### CoNLL-U


def _conllu_blocks(data: bytes) -> Iterator[List[Tuple[int, List[str]]]]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise DataError(f"input is not valid UTF-8 (byte offset {e.start})")

    block: List[Tuple[int, List[str]]] = []
    for number, line in enumerate(text.split("\n"), 1):
        line = line.rstrip("\r")
        if not line.strip():
            if block:
                yield block
                block = []
            continue
        if line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 10:
            raise DataError(f"expected 10 columns, found {len(fields)}", line=number)
        block.append((number, [unicodedata.normalize("NFC", f) for f in fields]))
    if block:
        yield block


def _conllu_id(value: str, number: int) -> Tuple[str, Tuple[int, ...]]:
    try:
        if "-" in value:
            start, end = value.split("-")
            return "range", (int(start), int(end))
        if "." in value:
            head, sub = value.split(".")
            return "empty", (int(head), int(sub))
        return "word", (int(value),)
    except ValueError:
        raise DataError(f"invalid token ID {value!r}", line=number)


def _form(value: str) -> str:
    # UD allows spaces inside a FORM ("400 000"), tokens here hold none
    return "".join(value.split())


def _misc_lid(misc: str) -> Optional[str]:
    for item in misc.split("|"):
        key, _, value = item.partition("=")
        if key in ("LangID", "Lang") and value:
            return value
    return None


def parse_conllu(data: bytes, languages: Sequence[str] = DEFAULT_LANGUAGES) -> Dataset:
    """Reads syntactic words (FORM, UPOS) from CoNLL-U. Comment lines,
    multiword range lines and empty nodes are skipped. Whitespace inside a
    FORM is removed."""
    sentences = []
    for block in _conllu_blocks(data):
        tokens = []
        for number, fields in block:
            kind, _ = _conllu_id(fields[0], number)
            if kind != "word":
                continue
            pos = fields[3] if fields[3] != "_" else None
            try:
                form = _form(fields[1])
                tokens.append(Token(form, form, None, pos))
            except DataError as e:
                raise DataError(str(e), line=number)
        if tokens:
            sentences.append(Sentence(tuple(tokens)))
    return Dataset(tuple(sentences), None, tuple(languages))


def read_conllu_words(
    data: bytes,
    exceptions: Optional[Mapping[Tuple[str, ...], str]] = None,
) -> List[List[Segment]]:
    """Reads a segmented CoNLL-U layer back into words.

    The parts of a multiword range are merged with project_tags_merge; the
    LID of a part is read from ``LangID=`` in MISC.
    """
    sentences = []
    for block in _conllu_blocks(data):
        words: List[Segment] = []
        pending: Optional[Tuple[str, int]] = None
        parts: List[Segment] = []
        for number, fields in block:
            kind, ids = _conllu_id(fields[0], number)
            if kind == "range":
                pending, parts = (_form(fields[1]), ids[1]), []
                continue
            if kind == "empty":
                continue
            segment = (
                _form(fields[1]),
                _misc_lid(fields[9]),
                fields[3] if fields[3] != "_" else None,
            )
            if pending is None:
                words.append(segment)
                continue
            parts.append(segment)
            if ids[0] == pending[1]:
                lid, pos = project_tags_merge(parts, exceptions)
                words.append((pending[0], lid, pos))
                pending = None
        if pending is not None:
            raise DataError(f"multiword token {pending[0]!r} is missing parts")
        if words:
            sentences.append(words)
    return sentences


def project_tags(
    d: Dataset,
    layer: Sequence[Sequence[Segment]],
    exceptions: Optional[Mapping[Tuple[str, ...], str]] = None,
) -> Dataset:
    """Projects LID and POS tags from a tagged word layer onto a norm dataset.

    The NORM words of each sentence are aligned to the layer's words. Tags are
    copied across 1:1 and n:1 links, several layer words aligned to one NORM
    word are merged, a token whose NORM holds several words gets their merged
    tags, and merge continuation tokens copy the tags of their group head.

    Raises:
        DataError: If the sentence counts differ
    """
    if len(layer) != len(d.sentences):
        raise DataError(
            f"the tag layer has {len(layer)} sentences, the corpus {len(d.sentences)}"
        )

    sentences = []
    for sentence, words in zip(d.sentences, layer):
        norm_words, links = expand_outputs(sentence.norms)
        word_tags: List[Tuple[Optional[str], Optional[str]]] = [(None, None)] * len(norm_words)
        for link in align_tokens(norm_words, [w[0] for w in words]):
            tags = project_tags_merge([words[j] for j in link.tgt_range], exceptions)
            for i in link.src_range:
                word_tags[i] = tags

        lids: List[Optional[str]] = [None] * len(sentence)
        pos: List[Optional[str]] = [None] * len(sentence)
        for link in links:
            segments = [(norm_words[j],) + word_tags[j] for j in link.tgt_range]
            merged = project_tags_merge(segments, exceptions)
            for i in link.src_range:
                lids[i], pos[i] = merged
        sentences.append(sentence.relabel(lids=lids, pos=pos))

    return Dataset(tuple(sentences), None, d.languages)
