import os
from pathlib import Path

import pytest
import yaml

from csnorm.corpus import parse_norm_file
from utils import inittemplatepath, main_wrapper, populate_dir


def write_lai(path: Path) -> None:
    """Writes the leave-as-is predictions of trde.norm."""
    lines = []
    for line in Path("trde.norm").read_text(encoding="utf-8").split("\n"):
        fields = line.split("\t")
        if len(fields) > 1:
            fields[1] = fields[0]
        lines.append("\t".join(fields))
    path.write_text("\n".join(lines), encoding="utf-8")


class Test_init:
    def test_default(self, tmp_path: Path, capsys) -> None:
        os.chdir(tmp_path)
        assert main_wrapper(["init"]) == 0
        assert "Configuration initialized!" in capsys.readouterr().out
        assert yaml.safe_load(Path("config.yml").read_text()) == yaml.safe_load(
            (inittemplatepath / "default" / "config.yml").read_text()
        )
        assert not Path("DESCRIPTION").exists()

    def test_template(self, tmp_path: Path) -> None:
        os.chdir(tmp_path)
        assert main_wrapper(["init", "language-aware"]) == 0
        assert yaml.safe_load(Path("config.yml").read_text())["strategy"] == "language-aware"

    def test_existing(self, tmp_path: Path, capsys) -> None:
        os.chdir(tmp_path)
        assert main_wrapper(["init"]) == 0
        assert main_wrapper(["init", "monolingual"]) == 1
        assert "-f" in capsys.readouterr().err
        assert main_wrapper(["init", "monolingual", "-f"]) == 0
        assert yaml.safe_load(Path("config.yml").read_text())["strategy"] == "monolingual"

    def test_unknown(self, tmp_path: Path) -> None:
        os.chdir(tmp_path)
        assert main_wrapper(["init", "bilingual"]) == 1
        assert not Path("config.yml").exists()

    def test_list(self, tmp_path: Path, capsys) -> None:
        os.chdir(tmp_path)
        assert main_wrapper(["init", "-l"]) == 0
        names = [line.split(" - ")[0] for line in capsys.readouterr().out.splitlines()]
        assert names == ["default", "fragments", "language-aware", "monolingual"]

    def test_validates(self, tmp_path: Path) -> None:
        os.chdir(tmp_path)
        for template in ["default", "fragments", "language-aware", "monolingual"]:
            assert main_wrapper(["init", template, "-f"]) == 0
            assert main_wrapper(["validate"]) == 0


class Test_validate:
    def test_ok(self, tmp_path: Path, capsys) -> None:
        populate_dir(tmp_path, "minimal_valid")
        assert main_wrapper(["validate"]) == 0
        assert "Validation succeeded. No issues detected!" in capsys.readouterr().out

    def test_ok_subdir(self, tmp_path: Path) -> None:
        populate_dir(tmp_path, "subdir")
        os.chdir("nested")
        assert main_wrapper(["validate"]) == 0

    def test_explicit_path(self, tmp_path: Path) -> None:
        populate_dir(tmp_path, "minimal_valid")
        os.chdir(tmp_path.parent)
        assert main_wrapper(["validate", "-c", str(tmp_path / "config.yml")]) == 0

    def test_schema_violation(self, tmp_path: Path, capsys) -> None:
        populate_dir(tmp_path, "schema_violation")
        assert main_wrapper(["validate"]) == 1
        assert "A001" in capsys.readouterr().out

    def test_missing_resource(self, tmp_path: Path, capsys) -> None:
        populate_dir(tmp_path, "missing_resource")
        assert main_wrapper(["validate", "-v"]) == 1
        out = capsys.readouterr().out
        assert "A002" in out
        assert "does_not_exist.lex" in out

    def test_error_level(self, tmp_path: Path) -> None:
        populate_dir(tmp_path, "minimal_valid")
        Path("config.yml").write_text("languages: [TR, DE]\n")
        assert main_wrapper(["validate"]) == 0
        assert main_wrapper(["validate", "-e", "3"]) == 1


class Test_stats:
    def test_table(self, toy_dir: Path, capsys) -> None:
        assert main_wrapper(["stats", "--data", "trde.norm", "--no-cmi"]) == 0
        assert capsys.readouterr().out == (
            "#words\t%norm\t%split\t%merge\tCMI\n38\t34.21\t2.63\t2.63\t-\n"
        )

    def test_details(self, toy_dir: Path, capsys) -> None:
        assert main_wrapper(["stats", "--data", "trde.norm", "--details"]) == 0
        lines = capsys.readouterr().out.split("\n")
        assert lines[1].startswith("38\t34.21\t2.63\t2.63\t")
        assert lines[1].split("\t")[4] != "-"
        assert lines[2:5] == [
            "",
            "#sentences\t#unnormalized\t#over70%norm\t#split\t#merge",
            "12\t2\t0\t1\t1",
        ]

    def test_aligned(self, toy_dir: Path, capsys) -> None:
        assert main_wrapper(["stats", "--data", "trde.norm", "--no-cmi", "-a"]) == 0
        assert capsys.readouterr().out.split("\n")[0] == "#words  %norm  %split  %merge  CMI"

    def test_malformed(self, toy_dir: Path, capsys) -> None:
        Path("bad.norm").write_text("abi\tabi\nnerde\n", encoding="utf-8")
        assert main_wrapper(["stats", "--data", "bad.norm"]) == 2
        assert "line 2" in capsys.readouterr().err

    def test_missing_file(self, toy_dir: Path) -> None:
        assert main_wrapper(["stats", "--data", "nothing.norm"]) == 1


class Test_usage:
    def test_no_command(self, toy_dir: Path) -> None:
        assert main_wrapper([]) == 1

    def test_no_action(self, toy_dir: Path) -> None:
        assert main_wrapper(["norm"]) == 1

    def test_missing_argument(self, toy_dir: Path) -> None:
        assert main_wrapper(["stats"]) == 1

    def test_bad_choice(self, toy_dir: Path) -> None:
        assert main_wrapper(["norm", "cv", "--data", "trde.norm", "--strategy", "bilingual"]) == 1

    def test_bad_bias(self, toy_dir: Path) -> None:
        assert main_wrapper(["norm", "cv", "--data", "trde.norm", "--bias", "0"]) == 1


class Test_norm_eval:
    def test_gold(self, toy_dir: Path, capsys) -> None:
        assert main_wrapper(["norm", "eval", "--gold", "trde.norm", "--pred", "trde.norm", "--lai"]) == 0
        assert capsys.readouterr().out.split("\n")[:9] == [
            "metric\tvalue",
            "accuracy\t100.00",
            "precision\t100.00",
            "recall\t100.00",
            "ERR\t100.00",
            "lai.accuracy\t65.79",
            "lai.precision\t0.00",
            "lai.recall\t0.00",
            "lai.ERR\t0.00",
        ]

    def test_per_language(self, toy_dir: Path, capsys) -> None:
        write_lai(toy_dir / "lai.norm")
        assert main_wrapper(["norm", "eval", "--gold", "trde.norm", "--pred", "lai.norm", "--per-language"]) == 0
        lines = capsys.readouterr().out.split("\n")
        assert lines[1] == "accuracy\t65.79"
        assert lines[5:8] == ["accuracy.DE\t68.42", "accuracy.TR\t58.82", "accuracy.UN\t100.00"]

    def test_compare(self, toy_dir: Path, capsys) -> None:
        write_lai(toy_dir / "lai.norm")
        assert main_wrapper(
            ["norm", "eval", "--gold", "trde.norm", "--pred", "trde.norm", "--compare", "lai.norm"]
        ) == 0
        lines = capsys.readouterr().out.split("\n")
        assert lines[5] == "compare.accuracy\t65.79"
        assert lines[6] == "p_value\t0.00"

    def test_different_words(self, toy_dir: Path) -> None:
        Path("other.norm").write_text("abi\tabi\n", encoding="utf-8")
        assert main_wrapper(["norm", "eval", "--gold", "trde.norm", "--pred", "other.norm"]) == 2


class Test_compare:
    def test_p_value(self, toy_dir: Path, capsys) -> None:
        write_lai(toy_dir / "lai.norm")
        assert main_wrapper(["compare", "--gold", "trde.norm", "--a", "trde.norm", "--b", "lai.norm"]) == 0
        assert capsys.readouterr().out == "accuracy_a\taccuracy_b\tp_value\n100.00\t65.79\t0.0010\n"

    def test_same(self, toy_dir: Path, capsys) -> None:
        assert main_wrapper(["compare", "--gold", "trde.norm", "--a", "trde.norm", "--b", "trde.norm", "--samples", "50"]) == 0
        assert capsys.readouterr().out.split("\n")[1] == "100.00\t100.00\t1.0000"


class Test_norm_cv:
    def test_lai(self, toy_dir: Path, capsys) -> None:
        assert main_wrapper(["norm", "cv", "--data", "trde.norm", "--folds", "3", "--strategy", "lai"]) == 0
        rows = [line.split("\t") for line in capsys.readouterr().out.strip("\n").split("\n")]
        assert rows[0] == ["fold", "sentences", "tokens", "accuracy", "LAI", "ERR"]
        assert [r[0] for r in rows[1:]] == ["1", "2", "3", "mean"]
        assert sum(int(r[1]) for r in rows[1:4]) == 12
        assert sum(int(r[2]) for r in rows[1:4]) == 38
        assert rows[4][:3] == ["mean", "12", "38"]
        for row in rows[1:]:
            assert row[3] == row[4]
            assert row[5] == "0.00"

    def test_mfr(self, toy_dir: Path, capsys) -> None:
        args = ["norm", "cv", "--data", "trde.norm", "--folds", "3", "--strategy", "mfr", "--per-language", "-o", "cv.norm"]
        assert main_wrapper(args) == 0
        lines = capsys.readouterr().out.split("\n")
        assert lines[5:7] == ["", "label\ttokens\taccuracy"]
        assert [line.split("\t")[:2] for line in lines[7:10]] == [["DE", "19"], ["TR", "17"], ["UN", "2"]]
        predicted = parse_norm_file(Path("cv.norm").read_bytes())
        gold = parse_norm_file(Path("trde.norm").read_bytes())
        assert [s.origs for s in predicted.sentences] == [s.origs for s in gold.sentences]

    def test_deterministic(self, toy_dir: Path, capsys) -> None:
        args = ["norm", "cv", "--data", "trde.norm", "--folds", "4", "--strategy", "mfr"]
        assert main_wrapper(args) == 0
        first = capsys.readouterr().out
        assert main_wrapper(args) == 0
        assert capsys.readouterr().out == first

    @pytest.mark.slow
    def test_multilingual(self, toy_dir: Path, capsys) -> None:
        assert main_wrapper(["norm", "cv", "--data", "trde.norm", "--folds", "2", "--n-trees", "2"]) == 0
        assert capsys.readouterr().out.split("\n")[3].startswith("mean\t12\t38\t")

    @pytest.mark.slow
    def test_predicted_lid(self, toy_dir: Path, capsys) -> None:
        args = ["norm", "cv", "--data", "trde.norm", "--folds", "2", "--n-trees", "2", "--strategy", "fragments", "--lid", "predicted"]
        assert main_wrapper(args) == 0


@pytest.mark.slow
class Test_norm_train_run:
    def test_roundtrip(self, toy_dir: Path) -> None:
        assert main_wrapper(["norm", "train", "--data", "trde.norm", "--model", "m.bin", "--n-trees", "3"]) == 0
        assert Path("m.bin").read_bytes().startswith(b"CSNORM\n1\n")
        assert main_wrapper(["norm", "run", "--model", "m.bin", "--data", "trde.norm", "-o", "out.norm", "-j", "2"]) == 0
        out = parse_norm_file(Path("out.norm").read_bytes())
        gold = parse_norm_file(Path("trde.norm").read_bytes())
        assert [s.origs for s in out.sentences] == [s.origs for s in gold.sentences]
        assert [s.lids for s in out.sentences] == [s.lids for s in gold.sentences]

    def test_bias(self, toy_dir: Path) -> None:
        assert main_wrapper(["norm", "train", "--data", "trde.norm", "--model", "m.bin", "--n-trees", "2"]) == 0
        assert main_wrapper(["norm", "run", "--model", "m.bin", "--data", "trde.norm", "--bias", "1e9", "-o", "out.norm"]) == 0
        out = parse_norm_file(Path("out.norm").read_bytes())
        assert all(t.norm == t.orig for t in out.tokens())

    def test_invalid_bias(self, toy_dir: Path) -> None:
        assert main_wrapper(["norm", "train", "--data", "trde.norm", "--model", "m.bin", "--n-trees", "2"]) == 0
        assert main_wrapper(["norm", "run", "--model", "m.bin", "--data", "trde.norm", "--bias", "0"]) == 1

    def test_configured_jobs(self, toy_dir: Path) -> None:
        assert main_wrapper(["norm", "train", "--data", "trde.norm", "--model", "m.bin", "--n-trees", "2"]) == 0
        assert main_wrapper(["norm", "run", "--model", "m.bin", "--data", "trde.norm", "-o", "one.norm", "-j", "1"]) == 0
        config = yaml.safe_load(Path("config.yml").read_text(encoding="utf-8"))
        config["forest"]["n_jobs"] = 4
        Path("config.yml").write_text(yaml.safe_dump(config), encoding="utf-8")
        assert main_wrapper(["norm", "run", "--model", "m.bin", "--data", "trde.norm", "-o", "four.norm"]) == 0
        assert Path("four.norm").read_bytes() == Path("one.norm").read_bytes()

    def test_text(self, toy_dir: Path, capsys) -> None:
        Path("input.txt").write_text("cok güzel\n\nich hab zeit\n", encoding="utf-8")
        assert main_wrapper(["norm", "train", "--data", "trde.norm", "--model", "m.bin", "--n-trees", "2"]) == 0
        capsys.readouterr()
        assert main_wrapper(["norm", "run", "--model", "m.bin", "--data", "input.txt", "--text"]) == 0
        out = parse_norm_file(capsys.readouterr().out.encode("utf-8"))
        assert [s.origs for s in out.sentences] == [["cok", "güzel"], ["ich", "hab", "zeit"]]

    def test_language_aware_needs_labels(self, toy_dir: Path) -> None:
        Path("input.txt").write_text("ich hab zeit\n", encoding="utf-8")
        args = ["norm", "train", "--data", "trde.norm", "--model", "la.bin", "--n-trees", "2", "--strategy", "language-aware"]
        assert main_wrapper(args) == 0
        assert main_wrapper(["norm", "run", "--model", "la.bin", "--data", "input.txt", "--text"]) == 2
        assert main_wrapper(["lid", "train", "--data", "trde.norm", "--model", "lid.bin"]) == 0
        args = ["norm", "run", "--model", "la.bin", "--data", "input.txt", "--text", "--lid", "lid.bin", "-o", "out.norm"]
        assert main_wrapper(args) == 0
        assert len(parse_norm_file(Path("out.norm").read_bytes()).sentences) == 1

    def test_changed_resources(self, toy_dir: Path) -> None:
        assert main_wrapper(["norm", "train", "--data", "trde.norm", "--model", "m.bin", "--n-trees", "2"]) == 0
        Path("de.lex").write_text("ich\n", encoding="utf-8")
        assert main_wrapper(["norm", "run", "--model", "m.bin", "--data", "trde.norm"]) == 2


class Test_lid:
    def test_train_tag_eval(self, toy_dir: Path, capsys) -> None:
        assert main_wrapper(["lid", "train", "--data", "trde.norm", "--model", "lid.bin"]) == 0
        assert main_wrapper(["lid", "tag", "--model", "lid.bin", "--data", "trde.norm", "-o", "tagged.norm"]) == 0
        tagged = parse_norm_file(Path("tagged.norm").read_bytes())
        assert len(tagged.sentences) == 12
        assert all(t.lid in ("TR", "DE", "UN") for t in tagged.tokens())

        capsys.readouterr()
        assert main_wrapper(["lid", "eval", "--data", "trde.norm", "--model", "lid.bin"]) == 0
        lines = capsys.readouterr().out.split("\n")
        assert lines[0] == "label\taccuracy"
        assert lines[1].startswith("all\t")
        assert [line.split("\t")[0] for line in lines[2:5]] == ["DE", "TR", "UN"]

    def test_folds(self, toy_dir: Path, capsys) -> None:
        assert main_wrapper(["lid", "eval", "--data", "trde.norm", "--folds", "3", "--epochs", "1"]) == 0
        assert capsys.readouterr().out.startswith("label\taccuracy\nall\t")

    def test_model_or_folds(self, toy_dir: Path) -> None:
        assert main_wrapper(["lid", "eval", "--data", "trde.norm"]) == 1

    def test_wrong_model_kind(self, toy_dir: Path) -> None:
        assert main_wrapper(["pos", "train", "--data", "train.conllu", "--model", "pos.bin"]) == 0
        assert main_wrapper(["lid", "tag", "--model", "pos.bin", "--data", "trde.norm"]) == 2


class Test_pos:
    def test_train_eval(self, toy_dir: Path, capsys) -> None:
        assert main_wrapper(["pos", "train", "--data", "train.conllu", "--model", "pos.bin", "--epochs", "5"]) == 0
        capsys.readouterr()
        assert main_wrapper(["pos", "eval", "--model", "pos.bin", "--gold", "gold.norm", "--confusion", "--top", "2"]) == 0
        lines = capsys.readouterr().out.split("\n")
        assert lines[0] == "metric\tvalue"
        assert lines[1].startswith("accuracy.oracle\t")
        assert lines[2] == ""
        assert lines[3].startswith("gold\\pred\t")

    def test_first_rule_compare(self, toy_dir: Path, capsys) -> None:
        assert main_wrapper(["pos", "train", "--data", "train.conllu", "--model", "pos.bin"]) == 0
        Path("pred.norm").write_text("Nerde\tnerede\nkaldın\tkaldın\nabi\tabi\n?\t?\n\nhab\thabe\nzeit\tZeit\n", encoding="utf-8")
        capsys.readouterr()
        args = ["pos", "eval", "--model", "pos.bin", "--gold", "gold.norm", "--pred", "pred.norm", "--rule", "first", "--top", "3", "--compare", "gold.norm"]
        assert main_wrapper(args) == 0
        lines = capsys.readouterr().out.split("\n")
        assert lines[1].startswith("accuracy.first\t")
        assert lines[3] == "gold\tpred\tcount\tcompare\tdelta"

    def test_tag(self, toy_dir: Path) -> None:
        assert main_wrapper(["pos", "train", "--data", "train.conllu", "--model", "pos.bin"]) == 0
        assert main_wrapper(["pos", "tag", "--model", "pos.bin", "--data", "trde.norm", "-o", "tagged.norm"]) == 0
        tagged = parse_norm_file(Path("tagged.norm").read_bytes())
        assert all(t.pos is not None for t in tagged.tokens())
        assert [s.lids for s in tagged.sentences] == [
            s.lids for s in parse_norm_file(Path("trde.norm").read_bytes()).sentences
        ]


class Test_project:
    def test_merge_range(self, toy_dir: Path) -> None:
        Path("data.norm").write_text(
            "Nerde\tNerede\nkaldın\tkaldın\nabi\tabi\n?\t?\n\nhab\thabe\nzeitist\tZeitist\n",
            encoding="utf-8",
        )
        assert main_wrapper(["project", "--data", "data.norm", "--layer", "layer.conllu", "-o", "out.norm"]) == 0
        assert Path("out.norm").read_text(encoding="utf-8") == (
            "Nerde\tNerede\tTR\tADV\n"
            "kaldın\tkaldın\tTR\tVERB\n"
            "abi\tabi\tTR\tNOUN\n"
            "?\t?\tOther\tPUNCT\n"
            "\n"
            "hab\thabe\tDE\tVERB\n"
            "zeitist\tZeitist\tDE\tNOUN\n"
            "\n"
        )

    def test_sentence_count(self, toy_dir: Path) -> None:
        assert main_wrapper(["project", "--data", "trde.norm", "--layer", "layer.conllu"]) == 2


class Test_align:
    def test_data(self, toy_dir: Path, capsys) -> None:
        assert main_wrapper(["align", "--data", "gold.norm"]) == 0
        assert capsys.readouterr().out == "0:0 1:1 2:2 3:3\n0:0 1:1\n"

    def test_split(self, toy_dir: Path, capsys) -> None:
        Path("src.txt").write_text("nasılsın birsey var\n", encoding="utf-8")
        Path("tgt.txt").write_text("nasılsın bir şey var\n", encoding="utf-8")
        assert main_wrapper(["align", "--src", "src.txt", "--tgt", "tgt.txt"]) == 0
        assert capsys.readouterr().out == "0:0 1:1-2 2:3\n"
        assert main_wrapper(["align", "--src", "src.txt", "--tgt", "tgt.txt", "--counts"]) == 0
        assert capsys.readouterr().out == "1:1\t1:n\tn:1\n2\t1\t0\n"

    def test_missing_target(self, toy_dir: Path) -> None:
        Path("src.txt").write_text("abi\n", encoding="utf-8")
        assert main_wrapper(["align", "--src", "src.txt"]) == 1


class Test_resources_build:
    def test_build(self, toy_dir: Path) -> None:
        args = ["resources", "build", "--corpus", "tr.txt", "--ngrams", "out.ngrams", "--lexicon", "out.lex"]
        assert main_wrapper(args) == 0
        assert Path("out.ngrams").stat().st_size > 0
        assert "abi" in Path("out.lex").read_text(encoding="utf-8").split("\n")

    def test_nothing_to_build(self, toy_dir: Path) -> None:
        assert main_wrapper(["resources", "build", "--corpus", "tr.txt"]) == 1

    def test_language(self, toy_dir: Path, capsys) -> None:
        args = ["resources", "build", "--corpus", "tr.txt", "--lexicon", "out.lex"]
        assert main_wrapper(args + ["--language", "EN"]) == 1
        capsys.readouterr()
        assert main_wrapper(args + ["--language", "DE"]) == 0
        assert "DE lexicon" in capsys.readouterr().err
