"""Normalization candidate generation from the original word, the training
replacement dictionary, lexicon spelling correction, embedding neighbours,
word splitting and casing."""

import functools
from dataclasses import dataclass, field, replace
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .constants import *
from .resources import EmbeddingStore, LanguageResources, Lexicon, ReplacementDict
from .utils import levenshtein

SOURCES = ("original", "lookup", "spelling", "embedding", "split", "case")
# gold forms added at training time only; not a ranking feature
INJECTED = "injected"


@dataclass(frozen=True)
class Candidate:
    form: str
    sources: FrozenSet[str]
    lookup_count: int = 0
    edit_distance: int = 0
    embedding_rank: Optional[int] = None
    embedding_cosine: Optional[float] = None
    embedding_language: Optional[str] = None
    source_language: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.sources:
            raise ValueError(f"candidate {self.form!r} has no source")
        unknown = set(self.sources) - set(SOURCES) - {INJECTED}
        if unknown:
            raise ValueError(f"unknown candidate sources {sorted(unknown)}")

    @property
    def is_original(self) -> bool:
        return "original" in self.sources


@dataclass(frozen=True)
class GeneratorConfig:
    max_dist: Optional[int] = None
    embedding_k: int = 10
    min_split_part: int = 2

    def __post_init__(self) -> None:
        if self.max_dist not in (None, 1, 2):
            raise ValueError(f"max_dist must be 1 or 2, got {self.max_dist}")

    @classmethod
    def from_config(cls, config: Mapping[str, Any]) -> "GeneratorConfig":
        return cls(
            config.get("max_dist"),
            config.get("embedding_k", 10),
            config.get("min_split_part", 2),
        )

    def to_json(self) -> Dict[str, Any]:
        return {
            "max_dist": self.max_dist,
            "embedding_k": self.embedding_k,
            "min_split_part": self.min_split_part,
        }


### casing


def is_turkic(language: Optional[str]) -> bool:
    return language is not None and language.lower() in TURKIC_LANGUAGES


def lower(word: str, language: Optional[str] = None) -> str:
    if is_turkic(language):
        word = word.replace("I", "ı").replace("İ", "i")
    return word.lower()


def upper(word: str, language: Optional[str] = None) -> str:
    if is_turkic(language):
        word = word.replace("i", "İ").replace("ı", "I")
    return word.upper()


def capitalize_first(word: str, language: Optional[str] = None) -> str:
    return upper(word[:1], language) + word[1:]


def starts_capital(word: str) -> bool:
    return word[:1].isupper()


### generators


def gen_original(word: str) -> Candidate:
    if not word:
        raise ValueError("cannot generate candidates for an empty word")
    return Candidate(word, frozenset({"original"}))


def gen_lookup(d: ReplacementDict, word: str) -> List[Candidate]:
    return [
        Candidate(
            norm,
            frozenset({"lookup", "split"} if " " in norm else {"lookup"}),
            lookup_count=count,
            edit_distance=levenshtein(word, norm),
            source_language=d.language,
        )
        for norm, count in d.lookup(word)
    ]


def default_max_dist(word: str) -> int:
    return 2 if len(word) >= 5 else 1


def _partition(length: int, parts: int) -> List[Tuple[int, int]]:
    """(start, size) of parts near-equal segments covering length characters."""
    base, extra = divmod(length, parts)
    segments = []
    start = 0
    for i in range(parts):
        size = base + (1 if i < extra else 0)
        segments.append((start, size))
        start += size
    return segments


class SpellingIndex:
    """Segment index over a lexicon.

    Each entry is cut into depth + 1 segments. An entry within edit distance
    d <= depth of a query keeps at least one segment unedited, and that
    segment occurs in the query shifted by at most d characters. Hits are
    verified with the exact distance.
    """

    def __init__(self, entries: Iterable[str], depth: int = 2):
        self.depth = depth
        self.segments: Dict[Tuple[int, int, str], List[str]] = {}
        for entry in sorted(set(entries)):
            for i, (start, size) in enumerate(_partition(len(entry), depth + 1)):
                key = (len(entry), i, entry[start : start + size])
                self.segments.setdefault(key, []).append(entry)

    def search(self, word: str, max_dist: int) -> List[Tuple[str, int]]:
        if max_dist > self.depth:
            raise ValueError(f"index built for distance {self.depth}, asked for {max_dist}")
        hits: Set[str] = set()
        for length in range(max(1, len(word) - max_dist), len(word) + max_dist + 1):
            for i, (start, size) in enumerate(_partition(length, self.depth + 1)):
                last = min(start + max_dist, len(word) - size)
                for pos in range(max(0, start - max_dist), last + 1):
                    hits.update(self.segments.get((length, i, word[pos : pos + size]), ()))
        found = ((entry, levenshtein(word, entry, max_dist)) for entry in hits)
        return sorted((entry, dist) for entry, dist in found if dist <= max_dist)


@functools.lru_cache(maxsize=8)
def spelling_index(lex: Lexicon) -> SpellingIndex:
    return SpellingIndex(lex.entries)


def gen_spelling(lex: Lexicon, word: str, max_dist: Optional[int] = 2) -> List[Candidate]:
    """Lexicon entries within max_dist edits of word, with their distance."""
    if max_dist is None:
        max_dist = default_max_dist(word)
    if max_dist not in (1, 2):
        raise ValueError(f"max_dist must be 1 or 2, got {max_dist}")
    return [
        Candidate(entry, frozenset({"spelling"}), edit_distance=dist, source_language=lex.language)
        for entry, dist in spelling_index(lex).search(word, max_dist)
    ]


def gen_embedding(s: EmbeddingStore, word: str, k: int = 10) -> List[Candidate]:
    return [
        Candidate(
            neighbour,
            frozenset({"embedding"}),
            edit_distance=levenshtein(word, neighbour),
            embedding_rank=rank,
            embedding_cosine=cosine,
            embedding_language=s.language,
            source_language=s.language,
        )
        for rank, (neighbour, cosine) in enumerate(s.knn(word, k), 1)
    ]


def gen_split(lex: Lexicon, word: str, min_part: int = 2) -> List[Candidate]:
    """Two-word splits of word whose parts are both in the lexicon."""
    candidates = []
    for i in range(min_part, len(word) - min_part + 1):
        left, right = word[:i], word[i:]
        if left in lex and right in lex:
            form = f"{left} {right}"
            candidates.append(
                Candidate(
                    form,
                    frozenset({"split"}),
                    edit_distance=1,
                    source_language=lex.language,
                )
            )
    return candidates


def gen_case_variants(word: str, sentence_initial: bool, language: Optional[str] = None) -> List[Candidate]:
    """The word, its lowercase form and, at sentence start, the word with a
    capital first letter. Turkish casing maps i<->İ and ı<->I."""
    forms = [word, lower(word, language)]
    if sentence_initial:
        forms.append(capitalize_first(word, language))
    return [
        Candidate(
            form,
            frozenset({"case"}),
            edit_distance=levenshtein(word, form),
            source_language=language,
        )
        for form in dict.fromkeys(forms)
    ]


def merge_candidates(a: Candidate, b: Candidate) -> Candidate:
    """Combines two candidates for the same form, keeping the best value per source."""
    if a.form != b.form:
        raise ValueError(f"cannot merge candidates {a.form!r} and {b.form!r}")
    ranked = [c for c in (a, b) if c.embedding_rank is not None]
    best = min(ranked, key=lambda c: (c.embedding_rank, -c.embedding_cosine)) if ranked else None
    return Candidate(
        a.form,
        a.sources | b.sources,
        lookup_count=max(a.lookup_count, b.lookup_count),
        edit_distance=min(a.edit_distance, b.edit_distance),
        embedding_rank=best.embedding_rank if best else None,
        embedding_cosine=best.embedding_cosine if best else None,
        embedding_language=best.embedding_language if best else None,
        source_language=a.source_language if a.source_language is not None else b.source_language,
    )


def generate_all(
    word: str,
    position: int,
    resources: Sequence[LanguageResources],
    cfg: GeneratorConfig = GeneratorConfig(),
) -> List[Candidate]:
    """All candidates for the word at position of its sentence.

    Every generator runs on every resource bundle, for the word and its
    lowercase form. When the word is capitalized or sentence-initial, the
    candidates also get a capitalized variant. Duplicates are merged. The
    original comes first, the rest in lexicographic order.
    """
    sentence_initial = position == 0
    found: List[Candidate] = [gen_original(word)]
    bundles: Sequence[Optional[LanguageResources]] = resources or [None]
    for bundle in bundles:
        language = bundle.language if bundle else None
        found += [c for c in gen_case_variants(word, sentence_initial, language) if c.form != word]
        if bundle is None:
            continue
        for query in dict.fromkeys([word, lower(word, language)]):
            found += gen_lookup(bundle.replacements, query)
            found += gen_spelling(bundle.lexicon, query, cfg.max_dist or default_max_dist(query))
            if bundle.embeddings is not None:
                found += gen_embedding(bundle.embeddings, query, cfg.embedding_k)
            found += gen_split(bundle.lexicon, query, cfg.min_split_part)

    if sentence_initial or starts_capital(word):
        language = bundles[0].language if bundles[0] else None
        # a capitalized variant is not itself a lexicon, lookup or embedding hit
        found += [
            Candidate(
                capitalize_first(c.form, c.source_language or language),
                frozenset({"case"}),
                source_language=c.source_language,
            )
            for c in found
            if not c.is_original and not starts_capital(c.form)
        ]

    merged: Dict[str, Candidate] = {}
    for c in found:
        c = replace(c, edit_distance=levenshtein(word, c.form))
        merged[c.form] = merge_candidates(merged[c.form], c) if c.form in merged else c

    original = merged.pop(word)
    return [original] + [merged[form] for form in sorted(merged)]
