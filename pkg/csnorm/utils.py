import hashlib
import json
import os
import shutil
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Union

import yaml

from .constants import *
from .validator import ConfigValidator, Message


class CriticalException(Exception):
    exit_code = 1


class DataError(CriticalException):
    """Raised for malformed or inconsistent input data. The CLI exits with code 2."""

    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def status(message: str, style: str = BOLD) -> None:
    """Prints a styled status line to stderr, keeping stdout free for tables."""
    print(f"{style}{message}{CLEAR}", file=sys.stderr)


def process_messages(messages: List[Message], verbose: bool = False) -> Dict[str, Any]:
    """Processes a list of messages from validator.ConfigValidator.validate for printing.

    Args:
        messages (list): The list of messages returned by validator.ConfigValidator.validate

    Returns:
        dict: Dictionary with the following keys:

            ``message_strings`` (*list*)
                A list of strings containing formatted messages, with ANSI color codes. Example string: ``[CRITICAL] [A002] Missing resource file``
            ``count_string`` (*str*)
                A string listing the counts of each message level, with ANSI color codes. Example: ``1 MEDIUM and 1 HIGH issue raised.``
            ``highest_level`` (*int*)
                The highest message level in the message list. Always between 0-5, where 0 is no messages and 5 is CRITICAL.
    """
    level_counts = [0, 0, 0, 0, 0]
    highest_level = 0
    message_strings = []
    for message in messages:
        level_counts[message.level - 1] += 1
        highest_level = max(highest_level, message.level)

        message_string = (
            f"[{STYLED_LEVELS[message.level-1]}] [{BOLD}{message.code}{CLEAR}] "
        )
        if message.field:
            message_string += f"{message.field}: "
        message_string += message.name
        if verbose:
            message_string += "\n" + message.message
        message_strings.append(message_string)

    level_name_counts = {i: count for i, count in enumerate(level_counts) if count}

    if not level_name_counts:
        count_string = "No"
    else:
        count_string = "\n" + " and ".join(
            ", ".join(
                f"{count} {STYLED_LEVELS[level]}"
                for level, count in level_name_counts.items()
            ).rsplit(", ", 1)
        )

    count_string += f" issue{'s' if not level_name_counts or list(level_name_counts.values())[-1] > 1 else ''} raised."

    return {
        "message_strings": message_strings,
        "count_string": count_string,
        "highest_level": highest_level,
    }


def get_config_path(search_start: Path = Path(".")) -> Optional[Path]:
    """Locates a configuration file (config.yml) in the given directory or one of its parents.

    Returns:
        pathlib.Path: The path to the config
        None: If there was no config
    """
    p = search_start.absolute()

    for directory in [p, *p.parents]:
        if (directory / "config.yml").exists():
            return directory / "config.yml"
        if (directory / "config.yaml").exists():
            return directory / "config.yaml"

    return None


def load_config(path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """Loads a configuration file without validating it.

    Args:
        path (string): The configuration file. When omitted, config.yml is searched for in the current directory and its parents, and if none exists the empty configuration is returned.

    Returns:
        dict: The raw config, with the ``__path__`` of the file it came from when there was one

    Raises:
        CriticalException: If the file cannot be read or is not valid YAML
    """
    if path is None:
        path = get_config_path()
        if path is None:
            return {}

    path = Path(path)
    if not path.is_file():
        raise CriticalException(f'Could not find the configuration file "{path}".')

    try:
        with open(path, "r", encoding="utf-8") as config_file:
            config = yaml.safe_load(config_file)
    except yaml.YAMLError as e:
        raise CriticalException(f'Failed to parse configuration file "{path}":\n{e}')

    if config is None:
        config = {}
    if not isinstance(config, dict):
        raise CriticalException(
            f'The configuration file "{path}" must contain a mapping at the top level.'
        )

    config["__path__"] = str(path.absolute())
    return config


def get_valid_config(path: Optional[Union[str, Path]] = None, verbose: bool = False) -> Dict[str, Any]:
    """Loads a configuration file and makes sure its valid.

    Args:
        path (string): The configuration file, see load_config
        verbose (bool): Print message details for high severity issues

    Returns:
        dict: The normalized config, with all defaults filled in and resource paths made absolute

    Raises:
        CriticalException: If there are critical validation errors
    """
    config = load_config(path)
    config_path = config.pop("__path__", None)
    basedir = Path(config_path).parent if config_path else Path(".").absolute()

    validator = ConfigValidator(config, basedir=basedir)
    messages = validator.validate()[1]
    highest_level = process_messages(messages)["highest_level"]

    if highest_level == 5:
        print(
            "\n".join(
                process_messages([m for m in messages if m.level == 5], verbose=True)[
                    "message_strings"
                ]
            ),
            file=sys.stderr,
        )
        raise CriticalException(
            "There are critical config validation errors. Please fix them before continuing."
        )
    elif highest_level == 4:
        print(
            "\n".join(
                process_messages([m for m in messages if m.level == 4], verbose=verbose)[
                    "message_strings"
                ]
            ),
            file=sys.stderr,
        )
        status(
            "There are config validation issues of high severity. You probably want to fix them.",
            HIGH,
        )

    return validator.normalized_config


def file_digest(path: Union[str, Path]) -> str:
    """Returns the hex SHA-256 digest of a file's contents."""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def read_input(path: Union[str, Path]) -> bytes:
    """Reads a whole input file, ``-`` meaning stdin.

    Raises:
        CriticalException: If the path cannot be read
    """
    if str(path) == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise CriticalException(f'Could not read "{path}": {e.strerror}')


def write_output(path: Optional[Union[str, Path]], data: bytes) -> None:
    """Writes output bytes to a file, or to stdout when path is None or ``-``."""
    if path is None or str(path) == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    try:
        Path(path).write_bytes(data)
    except OSError as e:
        raise CriticalException(f'Could not write "{path}": {e.strerror}')


def format_tsv(rows: Iterable[Iterable[Any]]) -> str:
    """Formats rows as TSV. Floats are written with two decimals."""

    def cell(value: Any) -> str:
        if isinstance(value, float):
            return f"{value:.2f}"
        return str(value)

    return "".join("\t".join(cell(v) for v in row) + "\n" for row in rows)


def align_columns(text: str) -> str:
    """Pads TSV text into space aligned columns for human reading."""
    rows = [line.split("\t") for line in text.splitlines()]
    if not rows:
        return text
    widths: Dict[int, int] = {}
    for row in rows:
        for i, value in enumerate(row):
            widths[i] = max(widths.get(i, 0), len(value))
    return "".join(
        "  ".join(value.ljust(widths[i]) for i, value in enumerate(row)).rstrip() + "\n"
        for row in rows
    )


# shutil.copytree only gained dirs_exist_ok in python 3.8
def _copytree(src: Union[str, Path], dst: Union[str, Path], ignore: Callable = lambda dir, content: list()) -> None:
    if not os.path.exists(dst):
        os.makedirs(dst)
    dirlist = os.listdir(src)
    for item in sorted(set(dirlist).difference(ignore(src, dirlist))):
        s = os.path.join(src, item)
        d = os.path.join(dst, item)
        if os.path.isdir(s):
            _copytree(s, d, ignore=ignore)
        else:
            shutil.copy(s, d)


def levenshtein(a: str, b: str, max_dist: Optional[int] = None) -> int:
    """Character level edit distance (insertions, deletions, substitutions).

    When max_dist is given, the computation stops early and returns
    ``max_dist + 1`` as soon as the distance is known to exceed it.
    """
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if max_dist is not None and len(a) - len(b) > max_dist:
        return max_dist + 1
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        current = [i]
        for j, cb in enumerate(b, 1):
            current.append(
                min(
                    previous[j] + 1,
                    current[j - 1] + 1,
                    previous[j - 1] + (ca != cb),
                )
            )
        if max_dist is not None and min(current) > max_dist:
            return max_dist + 1
        previous = current
    return previous[-1]


def encode_model(payload: Dict[str, Any]) -> bytes:
    """Serializes a model payload into the versioned model file format.

    The file is three header lines, the magic string ``CSNORM``, the format
    version and the hex SHA-256 digest of the body, followed by the body: the
    payload as UTF-8 JSON with sorted keys.
    """
    body = json.dumps(
        payload, sort_keys=True, ensure_ascii=False, separators=(",", ":")
    ).encode("utf-8")
    header = f"{MODEL_MAGIC}\n{MODEL_VERSION}\n{hashlib.sha256(body).hexdigest()}\n"
    return header.encode("ascii") + body


def decode_model(data: bytes, kind: Optional[str] = None) -> Dict[str, Any]:
    """Reads a model file written by encode_model.

    Raises:
        DataError: For a foreign or truncated file, an unsupported version, a
            digest mismatch or a model of another kind
    """
    parts = data.split(b"\n", 3)
    if parts[0] != MODEL_MAGIC.encode("ascii"):
        raise DataError("not a csnorm model file")
    if len(parts) < 4:
        raise DataError("the model file is truncated")
    try:
        version = int(parts[1])
    except ValueError:
        raise DataError("the model file has no valid format version")
    if version != MODEL_VERSION:
        raise DataError(
            f"model format version {version} is not supported, expected {MODEL_VERSION}"
        )
    if hashlib.sha256(parts[3]).hexdigest() != parts[2].decode("ascii", "replace"):
        raise DataError("the model file is corrupted or truncated (digest mismatch)")
    try:
        payload = json.loads(parts[3].decode("utf-8"))
    except ValueError:
        raise DataError("the model body is not valid JSON")
    if kind is not None and payload.get("kind") != kind:
        raise DataError(f"expected a {kind} model, got {payload.get('kind')!r}")
    return payload
