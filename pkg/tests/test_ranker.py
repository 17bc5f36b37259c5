from dataclasses import replace
from pathlib import Path
from typing import Dict

import pytest

from csnorm.candidates import Candidate, gen_original
from csnorm.cli import resource_refs
from csnorm.corpus import Dataset
from csnorm.evaluation import accuracy, lai, precision_recall_dataset
from csnorm.ranker import (
    AGNOSTIC_FEATURES,
    Context,
    ModelSettings,
    build_training_instances,
    choose,
    featurize,
    load_model,
    normalize_dataset,
    normalize_sentence,
    save_model,
    schema,
    train_model,
)
from csnorm.resources import LanguageResources, Lexicon, build_replacement_dict
from csnorm.utils import DataError
from utils import make_dataset


def settings(strategy: str, **kwargs) -> ModelSettings:
    return ModelSettings(**{"strategy": strategy, "n_trees": 3, "min_leaf": 1, "seed": 5, **kwargs})


class Test_schema:
    def test_widths(self) -> None:
        assert len(AGNOSTIC_FEATURES) == 14
        assert len(schema("monolingual", ["TR"])) == 20
        assert len(schema("multilingual", ["TR", "DE"])) == 26
        assert len(schema("language-aware", ["TR", "DE"])) == 21

    def test_names(self) -> None:
        names = schema("multilingual", ["TR", "DE"])
        assert "TR.unigram" in names and "DE.emb_rank" in names
        assert schema("language-aware", ["TR", "DE"])[-1] == "language_id"

    def test_unknown(self) -> None:
        with pytest.raises(ValueError):
            schema("bilingual", ["TR"])


class Test_featurize:
    def test_width(self, toy_resources: Dict[str, LanguageResources]) -> None:
        bundles = [toy_resources["TR"], toy_resources["DE"]]
        c = Candidate("çok", frozenset({"spelling"}), edit_distance=1)
        fv = featurize("cok", c, Context(0), bundles, "multilingual")
        assert fv.shape == (26,)
        names = schema("multilingual", ["TR", "DE"])
        assert fv[names.index("is_original")] == 0.0
        assert fv[names.index("source_spelling")] == 1.0
        assert fv[names.index("TR.in_lexicon")] == 1.0
        assert fv[names.index("DE.in_lexicon")] == 0.0
        assert fv[names.index("sentence_initial")] == 1.0

    def test_embedding_cosine(self, toy_resources: Dict[str, LanguageResources]) -> None:
        names = schema("monolingual", ["TR"])
        fv = featurize("cok", gen_original("cok"), Context(1), [toy_resources["TR"]], "monolingual")
        assert fv[names.index("TR.emb_cosine")] == pytest.approx(1.0)
        assert fv[names.index("TR.emb_rank")] == -1.0
        fv = featurize("xyz", gen_original("xyz"), Context(1), [toy_resources["TR"]], "monolingual")
        assert fv[names.index("TR.emb_cosine")] == -1.0

    def test_language_aware(self, toy_resources: Dict[str, LanguageResources]) -> None:
        bundles = [toy_resources["TR"], toy_resources["DE"]]
        fv = featurize("zeit", gen_original("zeit"), Context(1), bundles, "language-aware", "DE")
        assert fv.shape == (21,)
        assert fv[-1] == 1.0
        with pytest.raises(DataError):
            featurize("zeit", gen_original("zeit"), Context(1), bundles, "language-aware", "UN")


class Test_ModelSettings:
    def test_validation(self) -> None:
        with pytest.raises(ValueError):
            ModelSettings(strategy="bilingual")
        with pytest.raises(ValueError):
            ModelSettings(bias=0)
        with pytest.raises(ValueError):
            ModelSettings(monolingual_language="EN")

    def test_forest_keys(self) -> None:
        assert ModelSettings(strategy="fragments").forest_keys() == ["TR", "DE"]
        assert ModelSettings(strategy="monolingual", monolingual_language="DE").forest_keys() == ["DE"]
        assert ModelSettings(strategy="multilingual").forest_keys() == ["*"]

    def test_from_config(self, toy_config: Dict) -> None:
        s = ModelSettings.from_config(toy_config)
        assert s.strategy == "multilingual"
        assert s.n_trees == 5
        assert s.min_leaf == 1
        assert s.seed == 7
        assert s.monolingual_language == "TR"


class Test_choose:
    def test_ties(self) -> None:
        original = gen_original("abi")
        a = Candidate("abim", frozenset({"lookup"}), lookup_count=1)
        b = Candidate("abiy", frozenset({"lookup"}), lookup_count=3)
        assert choose([original, a, b], [0.5, 0.5, 0.5]) == original
        assert choose([original, a, b], [0.1, 0.5, 0.5]) == b
        assert choose([original, a, b], [0.1, 0.9, 0.5]) == a


class Test_build_training_instances:
    @pytest.mark.parametrize("strategy", ["monolingual", "multilingual", "language-aware"])
    def test_one_positive_per_token(
        self, strategy: str, toy_data: Dataset, toy_resources: Dict[str, LanguageResources]
    ) -> None:
        s = settings(strategy)
        sets = build_training_instances(toy_data, toy_resources, s)
        (data,) = sets.values()
        groups = {}
        for group, label in zip(data.groups, data.y):
            groups[group] = groups.get(group, 0) + label
        # the merge continuation token is skipped
        assert len(groups) == toy_data.n_tokens - 1
        assert set(groups.values()) == {1}
        assert data.X.shape[1] == len(schema(strategy, ["TR"] if strategy == "monolingual" else ["TR", "DE"]))

    def test_fragments(self, toy_data: Dataset, toy_resources: Dict[str, LanguageResources]) -> None:
        sets = build_training_instances(toy_data, toy_resources, settings("fragments"))
        assert set(sets) == {"TR", "DE"}
        tokens = {group for data in sets.values() for group in data.groups}
        assert len(tokens) == toy_data.n_tokens - 1

    def test_gold_injected(self, toy_data: Dataset, toy_resources: Dict[str, LanguageResources]) -> None:
        (data,) = build_training_instances(toy_data, toy_resources, settings("multilingual")).values()
        positives = {form for form, label in zip(data.forms, data.y) if label}
        assert "bir şey" in positives
        assert "yapacak" in positives

    def test_labels_needed(self, toy_resources: Dict[str, LanguageResources]) -> None:
        unlabeled = make_dataset([("ich", "ich"), ("hab", "habe")])
        with pytest.raises(DataError):
            build_training_instances(unlabeled, toy_resources, settings("fragments"))


@pytest.mark.slow
class Test_train_model:
    @pytest.mark.parametrize("strategy", ["monolingual", "fragments", "multilingual", "language-aware"])
    def test_normalize(
        self, strategy: str, toy_data: Dataset, toy_resources: Dict[str, LanguageResources]
    ) -> None:
        model = train_model(toy_data, toy_resources, settings(strategy))
        assert sorted(model.forests) == sorted(model.settings.forest_keys())
        outputs = normalize_dataset(model, toy_data)
        assert [len(o) for o in outputs] == [len(s) for s in toy_data.sentences]
        assert normalize_dataset(model, toy_data, n_jobs=3) == outputs
        assert normalize_dataset(train_model(toy_data, toy_resources, settings(strategy)), toy_data) == outputs

    def test_bias_keeps_words(self, toy_data: Dataset, toy_resources: Dict[str, LanguageResources]) -> None:
        model = train_model(toy_data, toy_resources, settings("multilingual")).with_bias(1e9)
        assert normalize_dataset(model, toy_data) == [s.origs for s in toy_data.sentences]

    def test_bias_matches_lai(self, toy_data: Dataset, toy_resources: Dict[str, LanguageResources]) -> None:
        model = train_model(toy_data, toy_resources, settings("fragments")).with_bias(1e6)
        outputs = normalize_dataset(model, toy_data)
        assert outputs == lai(toy_data)
        assert precision_recall_dataset(toy_data, outputs) == (0.0, 0.0)
        assert accuracy(toy_data, outputs) == accuracy(toy_data, lai(toy_data))

    def test_worked_examples(self, toy_resources: Dict[str, LanguageResources]) -> None:
        tr = toy_resources["TR"]
        lexicon = Lexicon("TR", frozenset(tr.lexicon.entries | {"daha", "aku", "iyi", "bu"}))
        resources = {"TR": replace(tr, lexicon=lexicon), "DE": toy_resources["DE"]}
        sentences = [
            [
                ("ak", "aku", "TR"),
                (".", ".", "UN"),
                ("luv", "love", "DE"),
                ("u", "you", "DE"),
                (":(", ":(", "UN"),
                ("till", "till", "DE"),
                ("die", "die", "DE"),
            ],
            [("bu", "bu", "TR"), ("dha", "daha", "TR"), ("güzel", "güzel", "TR")],
            [("luv", "love", "DE"), ("u", "you", "DE")],
            [("dha", "daha", "TR"), ("iyi", "iyi", "TR")],
        ]
        train = make_dataset(*(sentences * 3))
        model = train_model(train, resources, settings("multilingual", n_trees=15))
        assert normalize_sentence(model, "ak . luv u :( till die".split()) == "aku . love you :( till die".split()
        assert normalize_sentence(model, ["dha"]) == ["daha"]

    def test_replacements(self, toy_data: Dataset, toy_resources: Dict[str, LanguageResources]) -> None:
        model = train_model(toy_data, toy_resources, settings("multilingual"))
        assert model.replacements.map == build_replacement_dict(toy_data).map
        assert model.resources["TR"].replacements.lookup("cok") == (("çok", 2),)

    def test_labels_needed(self, toy_data: Dataset, toy_resources: Dict[str, LanguageResources]) -> None:
        model = train_model(toy_data, toy_resources, settings("language-aware"))
        with pytest.raises(DataError):
            normalize_sentence(model, ["ich", "hab"])
        with pytest.raises(DataError):
            normalize_sentence(model, ["ich", "hab"], ["DE"])
        assert len(normalize_sentence(model, ["ich", "hab"], ["DE", "DE"])) == 2
        assert normalize_sentence(model, []) == []

    def test_missing_resources(self, toy_data: Dataset, toy_resources: Dict[str, LanguageResources]) -> None:
        with pytest.raises(DataError):
            train_model(toy_data, {"TR": toy_resources["TR"]}, settings("multilingual"))

    def test_fragments_single_language(
        self, toy_data: Dataset, toy_resources: Dict[str, LanguageResources]
    ) -> None:
        model = train_model(toy_data, toy_resources, settings("fragments"))
        words = ["ich", "hab", "keine", "zeit", "abi"]
        expected = normalize_sentence(model.submodel("DE"), words)
        assert normalize_sentence(model, words, ["DE"] * 5) == expected
        assert normalize_sentence(model, words, ["UN"] * 5) == normalize_sentence(model.submodel("TR"), words)
        assert len(normalize_sentence(model, words, ["DE", "TR", "UN", "DE", "TR"])) == 5
        with pytest.raises(ValueError):
            train_model(toy_data, toy_resources, settings("multilingual")).submodel("DE")


@pytest.mark.slow
class Test_model_file:
    def test_reload(self, toy_dir: Path, toy_config: Dict, toy_data: Dataset, toy_resources) -> None:
        model = train_model(toy_data, toy_resources, settings("fragments"), resource_refs=resource_refs(toy_config))
        save_model(model, toy_dir / "model.bin")
        loaded = load_model(toy_dir / "model.bin")
        assert loaded.strategy == "fragments"
        assert normalize_dataset(loaded, toy_data) == normalize_dataset(model, toy_data)

    def test_changed_resource(self, toy_dir: Path, toy_config: Dict, toy_data: Dataset, toy_resources) -> None:
        model = train_model(toy_data, toy_resources, settings("multilingual"), resource_refs=resource_refs(toy_config))
        save_model(model, toy_dir / "model.bin")
        (toy_dir / "tr.lex").write_text("abi\n", encoding="utf-8")
        with pytest.raises(DataError, match="changed"):
            load_model(toy_dir / "model.bin")
        load_model(toy_dir / "model.bin", resources=toy_resources)

    def test_corrupted(self, toy_dir: Path, toy_config: Dict, toy_data: Dataset, toy_resources) -> None:
        model = train_model(toy_data, toy_resources, settings("monolingual"), resource_refs=resource_refs(toy_config))
        save_model(model, toy_dir / "model.bin")
        data = (toy_dir / "model.bin").read_bytes()
        (toy_dir / "model.bin").write_bytes(data[:-10])
        with pytest.raises(DataError):
            load_model(toy_dir / "model.bin")
