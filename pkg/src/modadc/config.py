"""Flat ``key=value`` text for (nested) dataclass configs.

Top-level fields are addressed by name, fields of a nested dataclass by
``section.field``. Sequences are comma separated; ``none`` clears an
optional field.
"""

import dataclasses
import typing
from typing import Any, get_args, get_origin, get_type_hints

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


class ConfigError(ValueError):
    pass


def _is_optional(tp):
    return get_origin(tp) is typing.Union and type(None) in get_args(tp)


def _strip_optional(tp):
    args = [a for a in get_args(tp) if a is not type(None)]
    return args[0] if len(args) == 1 else Any


def parse_value(text: str, tp, default=None):
    """Convert ``text`` to type ``tp`` (falls back on the default's type)."""
    text = text.strip()
    if _is_optional(tp):
        if text.lower() in ("none", ""):
            return None
        tp = _strip_optional(tp)
    if tp is Any or tp is None:
        tp = type(default) if default is not None else str
    if tp is bool:
        low = text.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ConfigError(f"not a boolean: {text!r}")
    if tp is int:
        try:
            return int(text)
        except ValueError:
            as_float = float(text)
            if as_float != int(as_float):
                raise ConfigError(f"not an integer: {text!r}") from None
            return int(as_float)
    if tp is float:
        return float(text)
    if tp is str:
        return text
    if tp is tuple or get_origin(tp) is tuple:
        args = get_args(tp)
        item = args[0] if args else None
        if item is None and isinstance(default, tuple) and default:
            item = type(default[0])
        parts = [p for p in (s.strip() for s in text.split(",")) if p]
        return tuple(parse_value(p, item or str) for p in parts)
    raise ConfigError(f"unsupported field type {tp!r}")


def format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ",".join(format_value(v) for v in value)
    return str(value)


def to_flat(cfg) -> dict:
    """Every leaf field of ``cfg`` as ``{dotted_key: value}``, in field order."""
    out = {}
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if dataclasses.is_dataclass(value):
            for key, sub in to_flat(value).items():
                out[f"{f.name}.{key}"] = sub
        else:
            out[f.name] = value
    return out


def dumps(cfg) -> str:
    return "".join(f"{k}={format_value(v)}\n" for k, v in to_flat(cfg).items())


def apply(cfg, pairs: dict):
    """Return a copy of ``cfg`` with the textual ``{dotted_key: text}`` overrides."""
    hints = get_type_hints(type(cfg))
    by_name = {f.name: f for f in dataclasses.fields(cfg)}
    top, nested = {}, {}
    for key, text in pairs.items():
        head, _, rest = key.partition(".")
        if head not in by_name:
            raise ConfigError(f"unknown config key {key!r}")
        current = getattr(cfg, head)
        if rest:
            if not dataclasses.is_dataclass(current):
                raise ConfigError(f"{head!r} has no sub-fields (key {key!r})")
            nested.setdefault(head, {})[rest] = text
        else:
            if dataclasses.is_dataclass(current):
                raise ConfigError(f"{key!r} is a section; address its fields as {key}.<field>")
            try:
                top[head] = parse_value(text, hints[head], current)
            except (ValueError, ConfigError) as exc:
                raise ConfigError(f"{key}: {exc}") from None
    for head, sub in nested.items():
        top[head] = apply(getattr(cfg, head), sub)
    try:
        return dataclasses.replace(cfg, **top)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def parse_pairs(lines, source="<config>") -> dict:
    """Read ``key=value`` lines; ``#`` starts a comment, blank lines are skipped."""
    pairs = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        pairs[key.strip()] = value.strip()
    return pairs


def loads(text: str, base, source="<config>"):
    return apply(base, parse_pairs(text.splitlines(), source))


def load(path, base):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), base, source=str(path))
