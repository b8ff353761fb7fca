"""JSON schemas of the --format json output, one per command."""

import json
from functools import cache
from importlib.resources import files
from typing import Any

from ..errors import InputError


def schema_names() -> list[str]:
    """Commands that ship a schema, sorted."""
    return sorted(
        entry.name.removesuffix(".schema.json")
        for entry in files(__name__).iterdir()
        if entry.name.endswith(".schema.json")
    )


@cache
def load_schema(command: str) -> dict[str, Any]:
    resource = files(__name__).joinpath(f"{command}.schema.json")
    if not resource.is_file():
        raise InputError(f"no output schema for command {command!r}")
    return json.loads(resource.read_text())
