"""Corpus data model and the JSON / JSON-lines reader and writer."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import CorpusFormatError, ValidationError
from ..labels import DOMAINS, ENTITY_TYPES, RELATION_TYPES


@dataclass(frozen=True, order=True)
class CharSpan:
    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ValidationError(f"invalid character span [{self.start}, {self.end})")


@dataclass(frozen=True)
class EntityAnnotation:
    id: str
    type: str
    span: CharSpan

    @property
    def start(self):
        return self.span.start

    @property
    def end(self):
        return self.span.end


@dataclass(frozen=True)
class RelationAnnotation:
    type: str
    head: str
    tail: str


@dataclass
class RawDocument:
    id: str
    text: str
    domain: str = "unknown"
    entities: list[EntityAnnotation] = field(default_factory=list)
    relations: list[RelationAnnotation] = field(default_factory=list)

    def __post_init__(self):
        self.validate()

    def entity(self, entity_id: str) -> EntityAnnotation:
        for ent in self.entities:
            if ent.id == entity_id:
                return ent
        raise KeyError(entity_id)

    def validate(self):
        if self.domain not in DOMAINS:
            raise ValidationError(f"document {self.id!r}: unknown domain {self.domain!r}")
        seen = set()
        for ent in self.entities:
            if ent.id in seen:
                raise ValidationError(f"document {self.id!r}: duplicate entity id {ent.id!r}")
            seen.add(ent.id)
            if ent.type not in ENTITY_TYPES:
                raise ValidationError(
                    f"document {self.id!r}: entity {ent.id!r} has unknown type {ent.type!r}"
                )
            if ent.span.end > len(self.text):
                raise ValidationError(
                    f"document {self.id!r}: entity {ent.id!r} span "
                    f"[{ent.start}, {ent.end}) exceeds text length {len(self.text)}"
                )
        for rel in self.relations:
            if rel.type not in RELATION_TYPES:
                raise ValidationError(
                    f"document {self.id!r}: unknown relation type {rel.type!r}"
                )
            for endpoint in (rel.head, rel.tail):
                if endpoint not in seen:
                    raise ValidationError(
                        f"document {self.id!r}: relation references missing entity id {endpoint!r}"
                    )
            if rel.head == rel.tail:
                raise ValidationError(
                    f"document {self.id!r}: relation {rel.type} links {rel.head!r} to itself"
                )

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "domain": self.domain,
            "text": self.text,
            "entities": [
                {"id": e.id, "type": e.type, "start": e.start, "end": e.end}
                for e in self.entities
            ],
            "relations": [
                {"type": r.type, "head": r.head, "tail": r.tail} for r in self.relations
            ],
        }


def _require(record, key, kind, where):
    if key not in record:
        raise CorpusFormatError(f"{where}: missing field {key!r}")
    value = record[key]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise CorpusFormatError(
            f"{where}: field {key!r} must be {kind.__name__}, got {type(value).__name__}"
        )
    return value


def document_from_record(record, where="record") -> RawDocument:
    if not isinstance(record, dict):
        raise CorpusFormatError(f"{where}: expected an object, got {type(record).__name__}")
    doc_id = _require(record, "id", str, where)
    text = _require(record, "text", str, where)
    domain = record.get("domain", "unknown")
    if not isinstance(domain, str):
        raise CorpusFormatError(f"{where}: field 'domain' must be str")
    entities = []
    for i, ent in enumerate(record.get("entities", [])):
        loc = f"{where}.entities[{i}]"
        if not isinstance(ent, dict):
            raise CorpusFormatError(f"{loc}: expected an object")
        start = _require(ent, "start", int, loc)
        end = _require(ent, "end", int, loc)
        if not 0 <= start < end:
            raise ValidationError(f"{loc}: invalid span [{start}, {end})")
        entities.append(
            EntityAnnotation(_require(ent, "id", str, loc), _require(ent, "type", str, loc),
                             CharSpan(start, end))
        )
    relations = []
    for i, rel in enumerate(record.get("relations", [])):
        loc = f"{where}.relations[{i}]"
        if not isinstance(rel, dict):
            raise CorpusFormatError(f"{loc}: expected an object")
        relations.append(
            RelationAnnotation(
                _require(rel, "type", str, loc),
                _require(rel, "head", str, loc),
                _require(rel, "tail", str, loc),
            )
        )
    return RawDocument(id=doc_id, text=text, domain=domain, entities=entities,
                       relations=relations)


def load_corpus(path) -> list[RawDocument]:
    """Read a corpus file.

    Accepts either a JSON array of document records or JSON lines with one
    record per line.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    raw = path.read_text(encoding="utf-8")
    if raw.lstrip().startswith("["):
        try:
            records = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(
                f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from exc
        return [document_from_record(r, f"{path}[{i}]") for i, r in enumerate(records)]

    docs = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusFormatError(f"{path}: line {lineno}: {exc.msg}") from exc
        docs.append(document_from_record(record, f"{path}:{lineno}"))
    return docs


def save_corpus(docs, path):
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc.to_record(), ensure_ascii=False))
            fh.write("\n")
    os.replace(tmp, path)


def convert_brat(directory, domain="unknown") -> list[RawDocument]:
    """Convert a brat-standoff directory (``*.txt`` + ``*.ann``) into documents.

    Only ``T`` (text-bound) and ``R`` (relation) lines are read; discontinuous
    text-bound annotations are collapsed to their outer extent. ``Arg1`` is the
    head and ``Arg2`` the tail.
    """
    directory = Path(directory)
    docs = []
    for txt in sorted(directory.glob("*.txt")):
        ann = txt.with_suffix(".ann")
        text = txt.read_text(encoding="utf-8")
        entities, relations = [], []
        if ann.exists():
            for lineno, line in enumerate(ann.read_text(encoding="utf-8").splitlines(), 1):
                if not line.strip():
                    continue
                parts = line.split("\t")
                try:
                    if line.startswith("T"):
                        label, *ranges = parts[1].replace(";", " ").split()
                        offsets = [int(x) for x in ranges]
                        entities.append(EntityAnnotation(
                            parts[0], label, CharSpan(min(offsets), max(offsets))))
                    elif line.startswith("R"):
                        label, arg1, arg2 = parts[1].split()
                        relations.append(RelationAnnotation(
                            label, arg1.split(":", 1)[1], arg2.split(":", 1)[1]))
                except (IndexError, ValueError) as exc:
                    raise CorpusFormatError(f"{ann}: line {lineno}: {exc}") from exc
        docs.append(RawDocument(id=txt.stem, text=text, domain=domain,
                                entities=entities, relations=relations))
    return docs
