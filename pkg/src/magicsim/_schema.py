"""Minimal JSON schema loading and validation for CLI documents.

Supports the subset the shipped schemas use: type (scalar or list),
enum, object properties with required and additionalProperties, and
homogeneous array items.  Booleans are not accepted where a number is
required.
"""

from __future__ import annotations

import json
from importlib import resources

_TYPE_CHECKS = {
    "object": lambda v: isinstance(v, dict),
    "array": lambda v: isinstance(v, list),
    "string": lambda v: isinstance(v, str),
    "boolean": lambda v: isinstance(v, bool),
    "null": lambda v: v is None,
    "integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "number": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
}


def load_schema(name: str) -> dict:
    """Load a schema shipped with the package by bare name."""
    text = resources.files("magicsim.schemas").joinpath(f"{name}.json").read_text("utf-8")
    return json.loads(text)


def _type_ok(value, t: str) -> bool:
    check = _TYPE_CHECKS.get(t)
    if check is None:
        raise ValueError(f"unsupported schema type {t!r}")
    return check(value)


def validate(obj, schema: dict, path: str = "$") -> list[str]:
    """Return a list of human-readable violations; empty means valid."""
    errs: list[str] = []
    t = schema.get("type")
    if t is not None:
        types = t if isinstance(t, list) else [t]
        if not any(_type_ok(obj, ti) for ti in types):
            errs.append(f"{path}: expected {'/'.join(types)}, got {type(obj).__name__}")
            return errs
    if "enum" in schema and obj not in schema["enum"]:
        errs.append(f"{path}: {obj!r} not one of {schema['enum']}")
    if isinstance(obj, dict):
        props = schema.get("properties", {})
        for key in schema.get("required", []):
            if key not in obj:
                errs.append(f"{path}: missing required key {key!r}")
        if schema.get("additionalProperties") is False:
            for key in obj:
                if key not in props:
                    errs.append(f"{path}: unknown key {key!r}")
        for key, sub in props.items():
            if key in obj:
                errs.extend(validate(obj[key], sub, f"{path}.{key}"))
    if isinstance(obj, list) and "items" in schema:
        for i, item in enumerate(obj):
            errs.extend(validate(item, schema["items"], f"{path}[{i}]"))
    return errs
