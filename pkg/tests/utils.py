import os
from pathlib import Path
from typing import List, Sequence, Tuple, Union

from csnorm.cli import main
from csnorm.corpus import Dataset, Sentence, Token
from csnorm.utils import _copytree

testpath = Path(__file__).parent
templatepath = testpath / "templates"
inittemplatepath = testpath / ".." / "csnorm" / "templates"


def populate_dir(path: Union[str, Path], template: str) -> None:
    os.chdir(path)

    if not template or not isinstance(template, str):
        raise ValueError("template must be a non-empty string")

    if not (templatepath / template).is_dir():
        raise ValueError("Template not found")

    _copytree(templatepath / template, path)


def main_wrapper(args: List[str]) -> int:
    try:
        exit_code = main(args)
    except SystemExit as e:
        exit_code = e.code

    return exit_code


def make_dataset(*sentences: Sequence[Tuple[str, ...]], languages=("TR", "DE")) -> Dataset:
    """Dataset from sentences of (orig, norm[, lid[, pos]]) tuples."""
    return Dataset(
        tuple(Sentence(tuple(Token(*t) for t in s)) for s in sentences), None, languages
    )
