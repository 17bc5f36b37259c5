import json
import pkg_resources
import yaml
from copy import deepcopy
from jsonschema import validate, ValidationError, Draft7Validator, validators
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

with pkg_resources.resource_stream("csnorm", "codes.yml") as f:
    codes = yaml.safe_load(f)

with pkg_resources.resource_stream("csnorm", "config.schema.json") as f:
    schema = json.load(f)

RESOURCE_KINDS = ["lexicon", "ngrams", "corpus", "embeddings"]


def extend_with_default(validator_class):
    validate_properties = validator_class.VALIDATORS["properties"]

    def set_defaults(validator, properties, instance, schema2):
        if isinstance(instance, dict):
            for property2, subschema in properties.items():
                if "default" in subschema:
                    # copied so nested defaults never write into the schema itself
                    instance.setdefault(property2, deepcopy(subschema["default"]))

        for error in validate_properties(
            validator,
            properties,
            instance,
            schema2,
        ):
            yield error

    return validators.extend(
        validator_class,
        {"properties": set_defaults},
    )


DefaultValidatingDraft7Validator = extend_with_default(Draft7Validator)


class Message(object):
    def __init__(self, code: str, field: Optional[str], name: str, level: int, message: str):
        self.code = code
        self.field = field
        self.name = name
        self.level = level
        self.message = message

    def __repr__(self) -> str:
        return f"Message({self.code!r}, {self.field!r}, level={self.level})"


class ConfigValidator:
    def __init__(self, config: Dict[str, Any], basedir: Optional[Path] = None):
        if not isinstance(config, dict):
            raise ValueError("Config parameter needs to be a dict")
        self.messages: List[Message] = []
        self.config = config
        self.normalized_config: Dict[str, Any] = {}
        self.basedir = basedir

    def validate(self) -> Tuple[bool, List[Message]]:
        """Checks the configuration against the schema and the resource files it
        names, filling in defaults into ``normalized_config``.

        Resource paths are resolved against ``basedir`` when it is given.

        Returns:
            tuple: Whether no level 5 message was raised, and the raised Messages
                (see codes.yml for the codes)
        """

        # A001, validating schema
        try:
            validate(instance=self.config, schema=schema)
        except ValidationError as e:
            path = ""
            if e.absolute_path:
                for part in e.absolute_path:
                    if isinstance(part, int):
                        path += f"[{part}]."
                        continue
                    path += part + "."
                path = path[:-1]
            else:
                path = "root"

            self._raise_code("A001", path, message=e.message)
            return False, self.messages

        ### normalizing config
        self.normalized_config = deepcopy(self.config)
        DefaultValidatingDraft7Validator(schema).validate(self.normalized_config)
        languages = self.normalized_config["languages"]
        if self.normalized_config["monolingual_language"] is None:
            self.normalized_config["monolingual_language"] = languages[0]
        # resource paths are relative to the configuration file
        for resources in self.normalized_config["resources"].values():
            for kind in RESOURCE_KINDS:
                if kind in resources and self.basedir is not None:
                    resources[kind] = str((self.basedir / resources[kind]).absolute())
        # normalization done

        # A003
        if languages[0] == languages[1]:
            self._raise_code("A003", "languages", language=languages[0])

        # A006
        if self.normalized_config["monolingual_language"] not in languages:
            self._raise_code(
                "A006",
                "monolingual_language",
                language=self.normalized_config["monolingual_language"],
                languages=", ".join(languages),
            )

        for language, resources in self.normalized_config["resources"].items():
            # A004
            if language not in languages:
                self._raise_code(
                    "A004",
                    f"resources.{language}",
                    language=language,
                    languages=", ".join(languages),
                )

            # A002
            for kind in RESOURCE_KINDS:
                if kind in resources and not Path(resources[kind]).is_file():
                    self._raise_code(
                        "A002",
                        f"resources.{language}.{kind}",
                        kind=kind,
                        file=resources[kind],
                        language=language,
                    )

            # A007, A008
            if "ngrams" in resources and "corpus" in resources:
                self._raise_code("A008", f"resources.{language}", language=language)
            elif not ({"ngrams", "corpus"} & set(resources)) and set(resources) & set(RESOURCE_KINDS):
                self._raise_code("A007", f"resources.{language}", language=language)

        # A005
        for language in languages:
            if not set(self.normalized_config["resources"].get(language, {})) & set(RESOURCE_KINDS):
                self._raise_code("A005", "resources", language=language)

        valid = not any(message.level == 5 for message in self.messages)
        return valid, self.messages

    def _raise_code(self, code: str, field: Optional[str] = None, **formatting) -> None:
        """Adds a formatted message entry into the messages array.

        Args:
            code (*str*): The code to raise
            field (*str, None*): The exact name of the field to associate with this message if it exists, else None
            **formatting: Arguments used to format the ``formatted_message`` from codes.yml using pythons ``str.format()``. ``field_name`` is always formatted using the value from the field argument.
        """

        if code not in codes:
            raise ValueError("The specified code doesn't exist")

        self.messages.append(
            Message(
                code=code,
                field=field,
                name=codes[code]["name"],
                level=codes[code]["level"],
                message=codes[code]["formatted_message"].format(
                    field_name=field, **formatting
                ),
            )
        )
