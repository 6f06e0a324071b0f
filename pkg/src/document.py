"""
Annotation document model and its on-disk JSON format (.rfg.json).

The file holds three top-level keys: "nodes" (ordered; file order is the
node ordinal), "edges" and "meta". Only structure is checked here; schema
rules belong to graph construction.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, StrictStr, ValidationError

from .errors import DocumentError

DOCUMENT_SUFFIX = ".rfg.json"


class NodeRecord(BaseModel):
    """A node as written in the document."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    id: StrictStr = Field(min_length=1)
    label: StrictStr
    text: StrictStr


class EdgeRecord(BaseModel):
    """An edge as written in the document."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    src: StrictStr = Field(min_length=1)
    dst: StrictStr = Field(min_length=1)
    label: StrictStr


class AnnotationDocument(BaseModel):
    """
    Raw parsed annotation file, before schema validation.

    Attributes:
        nodes: Node records in document order
        edges: Edge records
        meta: Free-form string metadata (domain, model, source id)
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    nodes: List[NodeRecord] = Field(default_factory=list)
    edges: List[EdgeRecord] = Field(default_factory=list)
    meta: Dict[StrictStr, StrictStr] = Field(default_factory=dict)


def _reject_duplicate_keys(pairs: List[Tuple[str, Any]]) -> Dict[str, Any]:
    """object_pairs_hook that refuses repeated keys in a JSON object."""
    result: Dict[str, Any] = {}
    for key, value in pairs:
        if key in result:
            raise DocumentError(f"Duplicate key in document: {key!r}")
        result[key] = value
    return result


def load_document(data: Union[str, bytes]) -> AnnotationDocument:
    """
    Parse an annotation document.

    Args:
        data: UTF-8 encoded bytes or already decoded text

    Returns:
        The parsed AnnotationDocument, node order preserved

    Raises:
        DocumentError: On invalid encoding, malformed JSON, duplicate keys,
            missing required fields or wrongly typed values
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise DocumentError(f"Document is not valid UTF-8: {e}") from None

    try:
        raw = json.loads(data, object_pairs_hook=_reject_duplicate_keys)
    except json.JSONDecodeError as e:
        raise DocumentError(
            f"Malformed document at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from None

    if not isinstance(raw, dict):
        raise DocumentError("Document must be a JSON object")

    try:
        return AnnotationDocument.model_validate(raw)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or '<root>'}: {err['msg']}"
            for err in e.errors()
        )
        raise DocumentError(f"Invalid document structure: {problems}") from None


def read_document(path: Union[str, Path]) -> AnnotationDocument:
    """
    Read and parse an annotation file.

    Args:
        path: Path to the .rfg.json file

    Returns:
        The parsed AnnotationDocument

    Raises:
        OSError: If the file cannot be read
        DocumentError: If the content does not parse
    """
    return load_document(Path(path).read_bytes())


def dump_document(doc: AnnotationDocument) -> str:
    """Serialize a document to its JSON text (LF line endings, trailing newline)."""
    return json.dumps(doc.model_dump(), indent=2, ensure_ascii=False) + "\n"


def save_document(doc: AnnotationDocument, path: Union[str, Path]) -> None:
    """
    Write a document to disk.

    Args:
        doc: Document to write
        path: Destination file path
    """
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dump_document(doc))
