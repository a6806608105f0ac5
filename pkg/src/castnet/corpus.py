"""Story ingestion: unit segmentation and alias-based character mention detection.

A story is a UTF-8 plain text file. It is cut into units (paragraphs or
sentences) and each unit is scanned for occurrences of character aliases
listed in a :class:`CharacterRegistry`. Matching is case-sensitive and
whole-word, with longer aliases consuming their text before shorter ones,
so "George Willard" is never double-counted as "George".
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError, RegistryError

# Single-period tokens that do not end a sentence. Case-sensitive,
# replaceable via the `abbreviations` argument of segment_sentences.
DEFAULT_ABBREVIATIONS = frozenset({
    "Mr.", "Mrs.", "Ms.", "Dr.", "St.", "Prof.", "Rev.", "Hon.",
    "Jr.", "Sr.", "Capt.", "Col.", "Gen.", "Lt.", "vs.", "e.g.", "i.e.",
})

_CLOSERS = "\"'’”)]"  # quotes/brackets that attach to the sentence they close
_OPENERS = "\"'‘“(["


@dataclass(frozen=True)
class TextUnit:
    """One segmentation unit, positioned within its source text."""

    index: int
    kind: str  # "sentence" or "paragraph"
    text: str
    word_count: int
    char_offset: int


@dataclass(frozen=True)
class MentionCounts:
    """Alias occurrence frequencies for one unit; zero-count characters are absent."""

    unit_index: int
    counts: dict[str, int]


@dataclass(frozen=True)
class Character:
    """A canonical character name plus every surface form that refers to it.

    `aliases` always contains the canonical name itself.
    """

    name: str
    aliases: tuple[str, ...]


class CharacterRegistry:
    """Canonical character names and their alias lists for one story.

    Invariants enforced at construction: canonical names are unique and
    non-empty, and no alias string belongs to two characters.
    """

    def __init__(self, story_id: str, characters: list[tuple[str, list[str]]]):
        if not story_id or not story_id.strip():
            raise RegistryError("story_id must be non-empty")
        self.story_id = story_id
        self.characters: list[Character] = []
        alias_owner: dict[str, str] = {}
        seen_names: set[str] = set()
        for name, aliases in characters:
            name = self._clean(name, "canonical name")
            if name in seen_names:
                raise RegistryError(f"duplicate canonical name {name!r}")
            seen_names.add(name)
            full: list[str] = []
            for alias in [name, *aliases]:
                alias = self._clean(alias, f"alias of {name!r}")
                if alias in full:
                    continue
                owner = alias_owner.get(alias)
                if owner is not None and owner != name:
                    raise RegistryError(
                        f"alias {alias!r} is assigned to both {owner!r} and {name!r}"
                    )
                alias_owner[alias] = name
                full.append(alias)
            self.characters.append(Character(name, tuple(full)))
        self._alias_to_name = alias_owner
        self._pattern: re.Pattern[str] | None = None

    @staticmethod
    def _clean(value: str, what: str) -> str:
        if not isinstance(value, str) or not value.strip():
            raise RegistryError(f"{what} must be a non-empty string, got {value!r}")
        if "\t" in value or "\n" in value:
            raise RegistryError(f"{what} {value!r} may not contain tabs or newlines")
        return " ".join(value.split())

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.characters]

    def canonical_for(self, alias: str) -> str:
        return self._alias_to_name[" ".join(alias.split())]

    def alias_pattern(self) -> re.Pattern[str]:
        """Compiled scanner over all aliases, longest first, whole words only.

        Alias tokens may be separated by any whitespace in the text (a name
        wrapped across a line still matches). A possessive apostrophe sits at
        a word boundary, so "Helen's" matches the alias "Helen".
        """
        if self._pattern is None:
            aliases = sorted(self._alias_to_name, key=lambda a: (-len(a), a))
            parts = [
                r"\s+".join(re.escape(tok) for tok in alias.split())
                for alias in aliases
            ]
            joined = "|".join(parts) if parts else r"(?!)"
            self._pattern = re.compile(r"(?<!\w)(?:" + joined + r")(?!\w)")
        return self._pattern

    def to_dict(self) -> dict:
        return {
            "story_id": self.story_id,
            "characters": [
                {"name": c.name, "aliases": [a for a in c.aliases if a != c.name]}
                for c in self.characters
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CharacterRegistry":
        try:
            story_id = data["story_id"]
            records = data["characters"]
            characters = [(r["name"], list(r.get("aliases", []))) for r in records]
        except (KeyError, TypeError) as exc:
            raise RegistryError(f"malformed registry document: {exc}") from exc
        return cls(story_id, characters)

    @classmethod
    def load(cls, path: str | Path) -> "CharacterRegistry":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise FormatError(path, exc.lineno, f"invalid JSON: {exc.msg}") from exc
        return cls.from_dict(data)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )

    def __len__(self) -> int:
        return len(self.characters)

    def __repr__(self) -> str:
        return f"CharacterRegistry({self.story_id!r}, {len(self.characters)} characters)"


def _make_unit(index: int, kind: str, text: str, offset: int) -> TextUnit:
    return TextUnit(index, kind, text, len(text.split()), offset)


def segment_paragraphs(text: str) -> list[TextUnit]:
    """Split text into paragraphs: maximal runs separated by blank lines.

    A blank line contains only whitespace. Paragraph text is trimmed; empty
    paragraphs are dropped, so whitespace-only input yields an empty list.
    """
    units: list[TextUnit] = []
    start: int | None = None
    end = 0
    pos = 0
    spans: list[tuple[int, int]] = []
    for line in text.splitlines(keepends=True):
        if line.strip():
            if start is None:
                start = pos
            end = pos + len(line)
        else:
            if start is not None:
                spans.append((start, end))
                start = None
        pos += len(line)
    if start is not None:
        spans.append((start, end))
    for raw_start, raw_end in spans:
        raw = text[raw_start:raw_end]
        stripped = raw.strip()
        offset = raw_start + (len(raw) - len(raw.lstrip()))
        units.append(_make_unit(len(units), "paragraph", stripped, offset))
    return units


def _sentence_spans(text: str, abbreviations: frozenset[str]) -> list[tuple[int, int]]:
    """Boundaries within one paragraph. Returns (start, end) slices covering
    all non-whitespace characters in order."""
    spans: list[tuple[int, int]] = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch not in ".!?":
            i += 1
            continue
        # consume the full terminal run, then any closing quotes/brackets
        run_start = i
        while i < n and text[i] in ".!?":
            i += 1
        run = text[run_start:i]
        while i < n and text[i] in _CLOSERS:
            i += 1
        if i >= n:
            break
        if not text[i].isspace():
            continue
        # find the first non-space character of the candidate next sentence
        j = i
        while j < n and text[j].isspace():
            j += 1
        if j >= n:
            break
        nxt = text[j]
        if not (nxt.isupper() or nxt in _OPENERS):
            continue
        if run == ".":
            t0 = run_start
            while t0 > 0 and not text[t0 - 1].isspace():
                t0 -= 1
            token = text[t0:run_start + 1].lstrip(_OPENERS)
            if token in abbreviations:
                continue
        spans.append((start, i))
        start = j
        i = j
    if start < n and text[start:].strip():
        spans.append((start, n))
    return spans


def segment_sentences(
    text: str, abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS
) -> list[TextUnit]:
    """Split text into sentences with a rule-based splitter.

    A boundary is a run of '.', '!' or '?' (plus any closing quotes or
    brackets, which stay with the sentence they close) followed by whitespace
    and an upper-case letter or opening quote. A single period is suppressed
    when the preceding token is in the abbreviation stop-list. Paragraph
    breaks always end a sentence. Degenerate text yields one unit.
    """
    units: list[TextUnit] = []
    for para in segment_paragraphs(text):
        for s_start, s_end in _sentence_spans(para.text, abbreviations):
            raw = para.text[s_start:s_end]
            stripped = raw.strip()
            if not stripped:
                continue
            offset = para.char_offset + s_start + (len(raw) - len(raw.lstrip()))
            units.append(_make_unit(len(units), "sentence", stripped, offset))
    return units


def count_mentions(unit: TextUnit, registry: CharacterRegistry) -> MentionCounts:
    """Count alias occurrences in one unit, summed per character.

    Occurrences are non-overlapping, case-sensitive and whole-word; at any
    position the longest matching alias wins. Characters with no occurrence
    are absent from the returned map.
    """
    counts: dict[str, int] = {}
    for match in registry.alias_pattern().finditer(unit.text):
        name = registry.canonical_for(match.group(0))
        counts[name] = counts.get(name, 0) + 1
    return MentionCounts(unit.index, counts)
