"""Response schema language and validation.

A response schema maps field names to types. A type is either one of the
scalar names ("string", "integer", "number", "boolean"), or a nested
container written as {"list": <type>} / {"record": {field: <type>}}.
Validation is strict: booleans are not integers, integers are accepted
where numbers are required, nothing else is coerced.
"""

from __future__ import annotations

from typing import Any

SCALAR_TYPES = ("string", "integer", "number", "boolean")

FieldType = Any  # str scalar name, {"list": FieldType}, or {"record": {name: FieldType}}
ResponseSchema = dict[str, FieldType]


def check_schema(schema: ResponseSchema) -> None:
    """Raise ValueError if the schema itself is malformed or empty."""
    if not isinstance(schema, dict) or not schema:
        raise ValueError("response_schema must be a non-empty field mapping")
    for name, ftype in schema.items():
        _check_field_type(name, ftype)


def _check_field_type(path: str, ftype: FieldType) -> None:
    if isinstance(ftype, str):
        if ftype not in SCALAR_TYPES:
            raise ValueError(f"{path}: unknown type {ftype!r}")
        return
    if isinstance(ftype, dict) and len(ftype) == 1:
        if "list" in ftype:
            _check_field_type(f"{path}[]", ftype["list"])
            return
        if "record" in ftype:
            fields = ftype["record"]
            if not isinstance(fields, dict) or not fields:
                raise ValueError(f"{path}: record must have at least one field")
            for sub, subtype in fields.items():
                _check_field_type(f"{path}.{sub}", subtype)
            return
    raise ValueError(f"{path}: malformed type {ftype!r}")


def validate_content(content: Any, schema: ResponseSchema) -> list[str]:
    """Return a list of violation messages; empty means the content conforms."""
    errors: list[str] = []
    if not isinstance(content, dict):
        return [f"content must be a record, got {type(content).__name__}"]
    _validate_record(content, schema, "", errors)
    return errors


def _validate_record(value: dict, fields: dict[str, FieldType], path: str, errors: list[str]) -> None:
    for name, ftype in fields.items():
        sub = f"{path}.{name}" if path else name
        if name not in value:
            errors.append(f"{sub}: missing")
            continue
        _validate_value(value[name], ftype, sub, errors)
    for name in value:
        if name not in fields:
            sub = f"{path}.{name}" if path else name
            errors.append(f"{sub}: unexpected field")


def _validate_value(value: Any, ftype: FieldType, path: str, errors: list[str]) -> None:
    if isinstance(ftype, str):
        if ftype == "string":
            if not isinstance(value, str):
                errors.append(f"{path}: expected string, got {type(value).__name__}")
        elif ftype == "integer":
            if isinstance(value, bool) or not isinstance(value, int):
                errors.append(f"{path}: expected integer, got {type(value).__name__}")
        elif ftype == "number":
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                errors.append(f"{path}: expected number, got {type(value).__name__}")
        elif ftype == "boolean":
            if not isinstance(value, bool):
                errors.append(f"{path}: expected boolean, got {type(value).__name__}")
        return
    if "list" in ftype:
        if not isinstance(value, list):
            errors.append(f"{path}: expected list, got {type(value).__name__}")
            return
        for i, item in enumerate(value):
            _validate_value(item, ftype["list"], f"{path}[{i}]", errors)
        return
    if "record" in ftype:
        if not isinstance(value, dict):
            errors.append(f"{path}: expected record, got {type(value).__name__}")
            return
        _validate_record(value, ftype["record"], path, errors)
