from __future__ import annotations

import re
from pathlib import Path
from typing import TYPE_CHECKING, Any, TypeVar

from msgspec import DecodeError, ValidationError, json, toml, yaml

from ..errors import FlexlabParseError, SourceSpan
from ..utils import Enum

if TYPE_CHECKING:
    from collections.abc import Callable

__all__ = (
    "DocumentFormat",
    "decode_document",
    "dump_document",
    "encode_document",
    "load_document",
)

T = TypeVar("T")

_BYTE_OFFSET = re.compile(r"\(byte (\d+)\)")


class DocumentFormat(Enum):
    json = "json"
    yaml = "yaml"
    toml = "toml"

    @classmethod
    def for_path(cls, path: str | Path) -> DocumentFormat:
        match Path(path).suffix.lower():
            case ".yaml" | ".yml":
                return cls.yaml
            case ".toml":
                return cls.toml
            case _:
                return cls.json


def _codec(fmt: DocumentFormat) -> tuple[Callable[..., Any], Callable[..., bytes]]:
    match fmt:
        case DocumentFormat.json:
            return json.decode, json.encode
        case DocumentFormat.yaml:
            return yaml.decode, yaml.encode
        case DocumentFormat.toml:
            return toml.decode, toml.encode


def decode_document(
    content: bytes | str,
    type: type[T],
    *,
    fmt: DocumentFormat = DocumentFormat.json,
    filename: str | None = None,
) -> T:
    """Decode ``content`` into ``type``; failures become parse errors pointing into the source."""

    decode, _ = _codec(fmt)
    try:
        return decode(content, type=type)
    except (DecodeError, ValidationError) as e:
        source = content.decode(errors="replace") if isinstance(content, bytes) else content
        error = FlexlabParseError(str(e))
        match = _BYTE_OFFSET.search(str(e))
        if match:
            error._add_span(SourceSpan(int(match.group(1))), source=source, filename=filename)
        raise error from None


def encode_document(obj: Any, *, fmt: DocumentFormat = DocumentFormat.json) -> bytes:
    _, encode = _codec(fmt)
    data = encode(obj)
    if fmt is DocumentFormat.json:
        return json.format(data, indent=2) + b"\n"
    return data


def load_document(path: str | Path, type: type[T]) -> T:
    path = Path(path)
    try:
        content = path.read_bytes()
    except OSError as e:
        raise FlexlabParseError(f"cannot read {str(path)!r}: {e.strerror}") from None
    return decode_document(content, type, fmt=DocumentFormat.for_path(path), filename=str(path))


def dump_document(obj: Any, path: str | Path) -> None:
    path = Path(path)
    path.write_bytes(encode_document(obj, fmt=DocumentFormat.for_path(path)))
