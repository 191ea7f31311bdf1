"""Reading and writing chord algebra spec files.

The on-disk format is JSON:

    {
      "name": "two_fiber_L2",
      "chords": [
        {"id": "a", "from": [0, "pt"], "to": [1, "pt"], "action": "2"}
      ],
      "differential": {"A": [["a"]]},
      "note": "optional free text"
    }

Actions are exact rationals written as strings ("3/2", "2") or integers.
Each chord record may carry an optional integer "degree", parsed and
ignored by every computation. The schema is strict: unknown fields at any
level, duplicate chord ids, and duplicate words inside one differential
entry are rejected, since a silent typo in a differential would corrupt
results downstream.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .dga import Chord, DGASpec, Polynomial, Word
from .rationals import format_rational, parse_rational

__all__ = ["ParseError", "dump_spec", "load_spec", "parse_spec", "save_spec"]

_TOP_FIELDS = {"name", "chords", "differential", "note"}
_CHORD_FIELDS = {"id", "from", "to", "action", "degree"}


class ParseError(ValueError):
    """Malformed spec file; carries a location when one is known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"line {line}, column {col}: {message}"
        super().__init__(message)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParseError(message)


def _parse_endpoint(value: object, where: str) -> tuple[int, str]:
    _require(
        isinstance(value, list) and len(value) == 2,
        f"{where}: endpoint must be a [part, component] pair",
    )
    part, component = value
    _require(
        isinstance(part, int) and not isinstance(part, bool) and part in (0, 1),
        f"{where}: part must be 0 or 1",
    )
    _require(isinstance(component, str), f"{where}: component must be a string")
    return (part, component)


def _parse_action(value: object, where: str) -> Fraction:
    try:
        return parse_rational(value)
    except (ValueError, TypeError) as exc:
        raise ParseError(f"{where}: {exc}") from None


def parse_spec(text: str) -> DGASpec:
    """Parse spec file text into a DGASpec, enforcing the strict schema."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, col=exc.colno) from None

    _require(isinstance(doc, dict), "top level must be an object")
    unknown = set(doc) - _TOP_FIELDS
    _require(not unknown, f"unknown top-level fields: {sorted(unknown)}")
    _require("chords" in doc, "missing required field 'chords'")

    name = doc.get("name", "")
    _require(isinstance(name, str), "'name' must be a string")
    note = doc.get("note", "")
    _require(isinstance(note, str), "'note' must be a string")

    raw_chords = doc["chords"]
    _require(isinstance(raw_chords, list), "'chords' must be a list")
    chords: list[Chord] = []
    seen: set[str] = set()
    for idx, rec in enumerate(raw_chords):
        where = f"chords[{idx}]"
        _require(isinstance(rec, dict), f"{where}: must be an object")
        unknown = set(rec) - _CHORD_FIELDS
        _require(not unknown, f"{where}: unknown fields: {sorted(unknown)}")
        for required in ("id", "from", "to", "action"):
            _require(required in rec, f"{where}: missing field '{required}'")
        cid = rec["id"]
        _require(isinstance(cid, str) and cid != "", f"{where}: id must be a non-empty string")
        _require(cid not in seen, f"{where}: duplicate chord id {cid!r}")
        seen.add(cid)
        if "degree" in rec:
            _require(
                isinstance(rec["degree"], int) and not isinstance(rec["degree"], bool),
                f"{where}: degree must be an integer",
            )
        chords.append(Chord(
            id=cid,
            source=_parse_endpoint(rec["from"], f"{where}.from"),
            target=_parse_endpoint(rec["to"], f"{where}.to"),
            action=_parse_action(rec["action"], f"{where}.action"),
        ))

    raw_diff = doc.get("differential", {})
    _require(isinstance(raw_diff, dict), "'differential' must be an object")
    differential: dict[str, Polynomial] = {}
    for gen, raw_words in raw_diff.items():
        where = f"differential[{gen!r}]"
        _require(isinstance(raw_words, list), f"{where}: must be a list of words")
        words: set[Word] = set()
        for widx, raw_word in enumerate(raw_words):
            _require(
                isinstance(raw_word, list)
                and all(isinstance(c, str) for c in raw_word),
                f"{where}[{widx}]: a word is a list of chord ids",
            )
            word = tuple(raw_word)
            _require(word not in words, f"{where}[{widx}]: duplicate word {word!r}")
            words.add(word)
        differential[gen] = Polynomial(frozenset(words))

    try:
        return DGASpec(name=name, chords=chords, differential=differential, note=note)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def dump_spec(spec: DGASpec) -> str:
    """Canonical text form: sorted chords and differential keys, sorted words."""
    doc: dict[str, object] = {"name": spec.name}
    if spec.note:
        doc["note"] = spec.note
    doc["chords"] = [
        {
            "id": chord.id,
            "from": [chord.source[0], chord.source[1]],
            "to": [chord.target[0], chord.target[1]],
            "action": format_rational(chord.action),
        }
        for chord in sorted(spec.chords.values(), key=lambda c: c.id)
    ]
    doc["differential"] = {
        gen: [list(w) for w in spec.differential[gen].sorted_words()]
        for gen in sorted(spec.differential)
    }
    return json.dumps(doc, indent=2) + "\n"


def load_spec(path: str | Path) -> DGASpec:
    return parse_spec(Path(path).read_text())


def save_spec(spec: DGASpec, path: str | Path) -> None:
    Path(path).write_text(dump_spec(spec))
