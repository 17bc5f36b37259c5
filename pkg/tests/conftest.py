from pathlib import Path
from typing import Dict

import pytest

from csnorm.corpus import Dataset, parse_norm_file
from csnorm.resources import LanguageResources, load_resources
from csnorm.utils import get_valid_config
from utils import populate_dir, templatepath


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption("--fast", action="store_true", help="Skip tests that train full models")


def pytest_collection_modifyitems(session, config, items) -> None:
    if not config.option.fast:
        return
    skip = pytest.mark.skip(reason="--fast skips model training")
    for item in items:
        if "slow" in set(marker.name for marker in item.iter_markers()):
            item.add_marker(skip)


@pytest.fixture()
def toy_dir(tmp_path: Path) -> Path:
    populate_dir(tmp_path, "toy")
    return tmp_path


@pytest.fixture()
def toy_config(toy_dir: Path) -> Dict:
    return get_valid_config()


@pytest.fixture()
def toy_data() -> Dataset:
    return parse_norm_file((templatepath / "toy" / "trde.norm").read_bytes())


@pytest.fixture()
def toy_resources(toy_config: Dict) -> Dict[str, LanguageResources]:
    return {l: load_resources(toy_config, l) for l in toy_config["languages"]}
