"""Candidate features, the four normalization strategies, training and
greedy sentence normalization, and model persistence.

Strategies:

``monolingual``
    One language's resources generate and describe all candidates.
``fragments``
    Sentences are cut at every language switch and each fragment is
    normalized by a monolingual model of its language.
``multilingual``
    Both languages generate candidates, and every language specific feature
    appears once per language.
``language-aware``
    Each word uses the resources of its LID label, plus the label as a feature.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .candidates import INJECTED, SOURCES, Candidate, GeneratorConfig, generate_all
from .constants import *
from .corpus import Dataset, Sentence, Token, map_labels_coarse
from .forest import RandomForest, train_forest
from .lid import fragment_split, rewrite_unknown
from .resources import (
    LanguageResources,
    ReplacementDict,
    build_replacement_dict,
    load_resources,
    verify_resource_table,
)
from .utils import DataError, decode_model, encode_model, levenshtein, read_input, write_output

STRATEGIES = ("monolingual", "fragments", "multilingual", "language-aware")
# strategies that need an LID label per token
LABELED_STRATEGIES = ("fragments", "language-aware")

AGNOSTIC_FEATURES = (
    ["is_original"]
    + [f"source_{s}" for s in SOURCES]
    + [
        "edit_distance",
        "length_ratio",
        "has_alpha",
        "starts_capital",
        "sentence_initial",
        "has_space",
        "lookup_count",
    ]
)
LANGUAGE_FEATURES = [
    "unigram",
    "bigram_prev",
    "bigram_next",
    "in_lexicon",
    "emb_cosine",
    "emb_rank",
]
MISSING = -1.0
# the original candidate's probability never drops below this before the bias
MIN_ORIGINAL_PROBABILITY = 1e-6
# forest key of strategies with a single forest
ALL = "*"


@dataclass(frozen=True)
class Context:
    position: int
    prev: str = BOUNDARY
    next: str = BOUNDARY


def schema(strategy: str, languages: Sequence[str]) -> List[str]:
    """Feature names of a strategy. languages are the languages whose
    resources fill the language blocks: one, or two for multilingual."""
    if strategy == "language-aware":
        return AGNOSTIC_FEATURES + [f"lid.{f}" for f in LANGUAGE_FEATURES] + ["language_id"]
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    return AGNOSTIC_FEATURES + [f"{l}.{f}" for l in languages for f in LANGUAGE_FEATURES]


def agnostic_features(word: str, candidate: Candidate, context: Context) -> List[float]:
    form = candidate.form
    return (
        [float(form == word)]
        + [float(s in candidate.sources) for s in SOURCES]
        + [
            float(candidate.edit_distance),
            len(form) / len(word),
            float(any(c.isalpha() for c in form)),
            float(form[:1].isupper()),
            float(context.position == 0),
            float(" " in form),
            math.log1p(candidate.lookup_count),
        ]
    )


def language_features(
    word: str, candidate: Candidate, context: Context, bundle: LanguageResources
) -> List[float]:
    form = candidate.form
    parts = form.split(" ")
    ngrams = bundle.ngrams

    cosine = rank = MISSING
    if candidate.embedding_language == bundle.language:
        cosine, rank = candidate.embedding_cosine, float(candidate.embedding_rank)
    elif bundle.embeddings is not None:
        a, b = bundle.embeddings.vector(word), bundle.embeddings.vector(form)
        if a is not None and b is not None:
            cosine = float(a @ b)

    return [
        ngrams.logprob(form),
        ngrams.logprob(form, context.prev),
        ngrams.logprob(context.next, parts[-1]),
        float(all(p in bundle.lexicon for p in parts)),
        cosine,
        rank,
    ]


def featurize(
    word: str,
    candidate: Candidate,
    context: Context,
    resources: Sequence[LanguageResources],
    strategy: str,
    lid_label: Optional[str] = None,
) -> np.ndarray:
    """Feature vector of a candidate in the strategy's schema.

    For language-aware, resources are both bundles in language order and
    lid_label picks the one that fills the language block.

    Raises:
        DataError: If language-aware features are asked for without a usable LID label
    """
    values = agnostic_features(word, candidate, context)
    if strategy == "language-aware":
        languages = [b.language for b in resources]
        if lid_label not in languages:
            raise DataError(f"language-aware ranking needs a language label for {word!r}, got {lid_label!r}")
        index = languages.index(lid_label)
        values += language_features(word, candidate, context, resources[index])
        values.append(float(index))
    else:
        for bundle in resources:
            values += language_features(word, candidate, context, bundle)
    return np.array(values, dtype=np.float64)


@dataclass
class ModelSettings:
    strategy: str = "multilingual"
    languages: Tuple[str, str] = DEFAULT_LANGUAGES
    monolingual_language: Optional[str] = None
    generator: GeneratorConfig = field(default_factory=GeneratorConfig)
    n_trees: int = 200
    max_depth: Optional[int] = None
    min_leaf: int = 5
    n_jobs: int = 1
    seed: int = DEFAULT_SEED
    bias: float = 1.0

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        self.languages = tuple(self.languages)
        if self.monolingual_language is None:
            self.monolingual_language = self.languages[0]
        if self.monolingual_language not in self.languages:
            raise ValueError(f"{self.monolingual_language!r} is not one of {self.languages}")
        if not self.bias > 0:
            raise ValueError(f"the original word bias must be positive, got {self.bias}")

    @classmethod
    def from_config(cls, config: Mapping[str, Any]) -> "ModelSettings":
        forest = config.get("forest", {})
        return cls(
            strategy=config.get("strategy", "multilingual"),
            languages=tuple(config.get("languages", DEFAULT_LANGUAGES)),
            monolingual_language=config.get("monolingual_language"),
            generator=GeneratorConfig.from_config(config.get("generator", {})),
            n_trees=forest.get("n_trees", 200),
            max_depth=forest.get("max_depth"),
            min_leaf=forest.get("min_leaf", 5),
            n_jobs=forest.get("n_jobs", 1),
            seed=config.get("seed", DEFAULT_SEED),
            bias=config.get("original_bias", 1.0),
        )

    def forest_keys(self) -> List[str]:
        if self.strategy == "fragments":
            return list(self.languages)
        if self.strategy == "monolingual":
            return [self.monolingual_language]
        return [ALL]


@dataclass
class TrainingSet:
    X: np.ndarray
    y: np.ndarray
    # (sentence index, token index) each row ranks within
    groups: List[Tuple[int, int]]
    forms: List[str]


@dataclass
class NormalizationModel:
    settings: ModelSettings
    forests: Dict[str, RandomForest]
    resources: Dict[str, LanguageResources]
    replacements: ReplacementDict = field(default_factory=ReplacementDict)
    resource_refs: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        expected = self.settings.forest_keys()
        if sorted(self.forests) != sorted(expected):
            raise DataError(
                f"a {self.settings.strategy} model needs forests for {expected}, got {sorted(self.forests)}"
            )

    @property
    def strategy(self) -> str:
        return self.settings.strategy

    def schemas(self) -> Dict[str, List[str]]:
        return {
            key: schema(self.strategy, self.settings.languages if key == ALL else [key])
            for key in self.forests
        }

    def bundles(self, key: str) -> List[LanguageResources]:
        """Resource bundles that generate and describe candidates for a forest."""
        if key == ALL:
            return [self.resources[l] for l in self.settings.languages]
        return [self.resources[key]]

    def submodel(self, language: str) -> "NormalizationModel":
        """The monolingual model a fragments model uses for one language."""
        if self.strategy != "fragments":
            raise ValueError("only fragments models consist of monolingual models")
        return NormalizationModel(
            replace(self.settings, strategy="monolingual", monolingual_language=language),
            {language: self.forests[language]},
            self.resources,
            self.replacements,
            self.resource_refs,
        )

    def with_bias(self, bias: float) -> "NormalizationModel":
        return replace(self, settings=replace(self.settings, bias=bias))


def resource_bundles(
    resources: Mapping[str, LanguageResources], replacements: ReplacementDict
) -> Dict[str, LanguageResources]:
    return {l: replace(b, replacements=replacements) for l, b in resources.items()}


def coarse_labels(sentence: Sentence, languages: Sequence[str]) -> List[str]:
    """Gold LID labels of a sentence mapped to the coarse scheme.

    Raises:
        DataError: If a token has no label
    """
    if any(l is None for l in sentence.lids):
        raise DataError("this strategy needs an LID label on every token")
    return [map_labels_coarse(l, languages) for l in sentence.lids]


def _fragments(
    words: Sequence[str], labels: Sequence[str], default: str
) -> List[Tuple[List[int], str]]:
    """Token index runs of one language, as cut by fragment_split."""
    sentence = Sentence(tuple(Token(w, w) for w in words))
    fragments = []
    start = 0
    for tokens, language in fragment_split(sentence, labels, default):
        fragments.append((list(range(start, start + len(tokens))), language))
        start += len(tokens)
    return fragments


def _last_word(output: str) -> str:
    return output.split(" ")[-1]


def _groups(
    sentence: Sentence,
    settings: ModelSettings,
    labels: Optional[Sequence[str]],
) -> List[Tuple[str, List[int]]]:
    """Forest key and token indices of every unit normalized as one sequence."""
    if settings.strategy == "fragments":
        return [
            (language, indices)
            for indices, language in _fragments(sentence.origs, labels, settings.languages[0])
        ]
    return [(settings.forest_keys()[0], list(range(len(sentence))))]


def build_training_instances(
    train: Dataset,
    resources: Mapping[str, LanguageResources],
    settings: ModelSettings,
    lid_labels: Optional[Sequence[Sequence[str]]] = None,
) -> Dict[str, TrainingSet]:
    """Ranking instances per forest key.

    Every token gets the candidates of generate_all, labeled correct iff the
    form equals the gold normalization. A gold form that no generator
    proposes is added as an injected candidate. Merge continuation tokens
    are skipped, and the previous output context is the gold normalization.
    """
    needs_labels = settings.strategy in LABELED_STRATEGIES
    collected: Dict[str, Tuple[List[np.ndarray], List[int], List[Tuple[int, int]], List[str]]] = {
        key: ([], [], [], []) for key in settings.forest_keys()
    }
    languages = list(settings.languages)

    for s, sentence in enumerate(train.sentences):
        labels = None
        if needs_labels:
            raw = lid_labels[s] if lid_labels is not None else coarse_labels(sentence, languages)
            if len(raw) != len(sentence):
                raise DataError(f"{len(raw)} LID labels for a sentence of {len(sentence)} tokens")
            labels = rewrite_unknown(
                [map_labels_coarse(l, languages) for l in raw], languages[0]
            )
        for key, indices in _groups(sentence, settings, labels):
            bundles = (
                [resources[l] for l in languages] if key == ALL else [resources[key]]
            )
            rows, ys, groups, forms = collected[key]
            for n, i in enumerate(indices):
                token = sentence[i]
                if token.is_merge:
                    continue
                context = Context(
                    n,
                    _last_word(sentence[indices[n - 1]].norm) if n else BOUNDARY,
                    sentence[indices[n + 1]].orig if n + 1 < len(indices) else BOUNDARY,
                )
                if n and sentence[indices[n - 1]].is_merge:
                    head = max(j for j in range(indices[n - 1]) if not sentence[j].is_merge)
                    context = replace(context, prev=_last_word(sentence[head].norm))
                label = labels[i] if labels else None
                generating = bundles
                if settings.strategy == "language-aware":
                    generating = [resources[label]]

                candidates = generate_all(token.orig, n, generating, settings.generator)
                if token.norm not in {c.form for c in candidates}:
                    candidates.append(_inject(token.orig, token.norm, generating))
                for c in candidates:
                    rows.append(featurize(token.orig, c, context, bundles, settings.strategy, label))
                    ys.append(int(c.form == token.norm))
                    groups.append((s, i))
                    forms.append(c.form)

    sets = {}
    for key, (rows, ys, groups, forms) in collected.items():
        width = len(schema(settings.strategy, languages if key == ALL else [key]))
        X = np.array(rows, dtype=np.float64).reshape(len(rows), width)
        sets[key] = TrainingSet(X, np.array(ys, dtype=np.int64), groups, forms)
    return sets


def _inject(word: str, gold: str, bundles: Sequence[LanguageResources]) -> Candidate:
    sources = {INJECTED}
    lookup_count = 0
    for bundle in bundles:
        count = bundle.replacements.count(word, gold)
        if count:
            sources.add("lookup")
            lookup_count = max(lookup_count, count)
        if all(p in bundle.lexicon for p in gold.split(" ")):
            sources.add("split" if " " in gold else "spelling")
    return Candidate(
        gold,
        frozenset(sources),
        lookup_count=lookup_count,
        edit_distance=levenshtein(word, gold),
    )


def train_model(
    train: Dataset,
    resources: Mapping[str, LanguageResources],
    settings: ModelSettings,
    lid_labels: Optional[Sequence[Sequence[str]]] = None,
    resource_refs: Optional[Dict[str, Any]] = None,
) -> NormalizationModel:
    """Trains the forests of a strategy on a training set.

    The replacement dictionary is built from train and attached to every
    resource bundle.

    Raises:
        DataError: If a forest gets no training data or a single class
    """
    replacements = build_replacement_dict(train)
    bundles = resource_bundles(resources, replacements)
    missing = [l for l in settings.languages if l not in bundles]
    if missing:
        raise DataError(f"no resources for {', '.join(missing)}")

    instances = build_training_instances(train, bundles, settings, lid_labels)
    forests = {}
    for key, data in instances.items():
        if not len(data.y):
            raise DataError(f"no training tokens for the {key} model")
        forests[key] = train_forest(
            data.X,
            data.y,
            settings.n_trees,
            settings.max_depth,
            settings.min_leaf,
            settings.seed,
            settings.n_jobs,
        )
    return NormalizationModel(settings, forests, bundles, replacements, resource_refs or {})


def choose(candidates: Sequence[Candidate], scores: Sequence[float]) -> Candidate:
    """Highest scoring candidate; ties go to the original, then the higher
    lookup count, then the lexicographically smaller form."""
    return min(
        zip(candidates, scores),
        key=lambda cs: (-cs[1], not cs[0].is_original, -cs[0].lookup_count, cs[0].form),
    )[0]


def _normalize_unit(
    model: NormalizationModel,
    key: str,
    words: Sequence[str],
    labels: Optional[Sequence[str]],
) -> List[str]:
    settings = model.settings
    bundles = model.bundles(key)
    forest = model.forests[key]
    outputs: List[str] = []
    for i, word in enumerate(words):
        label = labels[i] if labels else None
        generating = bundles
        if settings.strategy == "language-aware":
            generating = [model.resources[label]]
        context = Context(
            i,
            _last_word(outputs[-1]) if outputs else BOUNDARY,
            words[i + 1] if i + 1 < len(words) else BOUNDARY,
        )
        candidates = generate_all(word, i, generating, settings.generator)
        X = np.stack(
            [featurize(word, c, context, bundles, settings.strategy, label) for c in candidates]
        )
        scores = forest.predict_proba_batch(X)
        scores[0] = max(scores[0], MIN_ORIGINAL_PROBABILITY) * settings.bias
        outputs.append(choose(candidates, scores).form)
    return outputs


def normalize_sentence(
    model: NormalizationModel,
    sentence: Sequence[str],
    lid_labels: Optional[Sequence[str]] = None,
) -> List[str]:
    """Greedy left to right normalization; one output per input word.

    An output containing spaces is a split. The previous output word and the
    next input word are the bigram contexts.

    Raises:
        DataError: If the strategy needs LID labels and none are given
    """
    words = list(sentence)
    if not words:
        return []
    settings = model.settings
    labels = None
    if settings.strategy in LABELED_STRATEGIES:
        if lid_labels is None or any(l is None for l in lid_labels):
            raise DataError(f"the {settings.strategy} strategy needs LID labels")
        if len(lid_labels) != len(words):
            raise DataError(f"{len(lid_labels)} LID labels for {len(words)} words")
        labels = rewrite_unknown(
            [map_labels_coarse(l, settings.languages) for l in lid_labels],
            settings.languages[0],
        )

    if settings.strategy != "fragments":
        return _normalize_unit(model, settings.forest_keys()[0], words, labels)

    outputs: List[str] = []
    for indices, language in _fragments(words, labels, settings.languages[0]):
        if language not in model.forests:
            raise DataError(f"no model for fragments labeled {language!r}")
        outputs += _normalize_unit(model, language, [words[i] for i in indices], None)
    return outputs


def normalize_dataset(
    model: NormalizationModel,
    d: Dataset,
    lid_labels: Optional[Sequence[Sequence[str]]] = None,
    n_jobs: int = 1,
) -> List[List[str]]:
    """Normalizes every sentence of d. LID labels default to d's LID column
    for strategies that need them. Output does not depend on n_jobs."""
    labels: List[Optional[Sequence[str]]] = [None] * len(d.sentences)
    if model.strategy in LABELED_STRATEGIES:
        labels = list(lid_labels) if lid_labels is not None else [s.lids for s in d.sentences]

    def run(k: int) -> List[str]:
        return normalize_sentence(model, d.sentences[k].origs, labels[k])

    with ThreadPoolExecutor(max_workers=max(1, n_jobs)) as pool:
        return list(pool.map(run, range(len(d.sentences))))


### persistence


def model_payload(model: NormalizationModel) -> Dict[str, Any]:
    s = model.settings
    return {
        "kind": "normalization",
        "strategy": s.strategy,
        "languages": list(s.languages),
        "monolingual_language": s.monolingual_language,
        "schema": model.schemas(),
        "forests": {key: f.to_json() for key, f in model.forests.items()},
        "resources": model.resource_refs,
        "generator": s.generator.to_json(),
        "forest": {
            "n_trees": s.n_trees,
            "max_depth": s.max_depth,
            "min_leaf": s.min_leaf,
            "n_jobs": s.n_jobs,
        },
        "seed": s.seed,
        "original_bias": s.bias,
        "replacements": model.replacements.to_json(),
    }


def save_model(model: NormalizationModel, path: Optional[Union[str, Path]]) -> None:
    write_output(path, encode_model(model_payload(model)))


def model_from_payload(
    payload: Mapping[str, Any],
    resources: Optional[Mapping[str, LanguageResources]] = None,
    verify: bool = True,
) -> NormalizationModel:
    """Rebuilds a model. Without preloaded resources they are loaded from
    the recorded paths after their digests are checked."""
    try:
        settings = ModelSettings(
            strategy=payload["strategy"],
            languages=tuple(payload["languages"]),
            monolingual_language=payload["monolingual_language"],
            generator=GeneratorConfig.from_config(payload["generator"]),
            n_trees=payload["forest"]["n_trees"],
            max_depth=payload["forest"]["max_depth"],
            min_leaf=payload["forest"]["min_leaf"],
            n_jobs=payload["forest"]["n_jobs"],
            seed=payload["seed"],
            bias=payload["original_bias"],
        )
        refs = payload["resources"]
        replacements = ReplacementDict.from_json(payload["replacements"])
        forests = {key: RandomForest.from_json(f) for key, f in payload["forests"].items()}
        schemas = payload["schema"]
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"malformed normalization model: {e}")

    if resources is None:
        if verify:
            verify_resource_table(refs.get("files", {}))
        resources = {
            l: load_resources(reference_config(refs), l) for l in settings.languages
        }
    model = NormalizationModel(
        settings, forests, resource_bundles(resources, replacements), replacements, refs
    )
    if model.schemas() != schemas:
        raise DataError("the model's feature schema does not match this version of csnorm")
    for key, forest in forests.items():
        if forest.n_features != len(schemas[key]):
            raise DataError(f"the {key} forest does not match its feature schema")
    return model


def reference_config(refs: Mapping[str, Any]) -> Dict[str, Any]:
    """Resource configuration recorded in a model's resource references."""
    return {
        "resources": {
            language: dict(
                {kind: ref["path"] for kind, ref in kinds.items()},
                alpha=refs.get("alpha", {}).get(language, 1.0),
            )
            for language, kinds in refs.get("files", {}).items()
        }
    }


def load_model(
    path: Union[str, Path],
    resources: Optional[Mapping[str, LanguageResources]] = None,
    verify: bool = True,
) -> NormalizationModel:
    """Raises:
    DataError: For a corrupted, truncated or foreign file, a version
        mismatch or changed resource files
    """
    return model_from_payload(decode_model(read_input(path), "normalization"), resources, verify)
