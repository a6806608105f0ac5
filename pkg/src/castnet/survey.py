"""Reader survey responses: parsing, validation, aggregation, normalization.

Two annotation modes feed this module. Task 1 is a time-ordered list of
interaction entries, each rated 1-10; a pair entered twice sums, so Task 1
link weights can exceed 10. Task 2 is a lower-triangular all-pairs matrix
rated 0-10 where an empty cell means 0.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import CharacterRegistry
from .errors import FormatError, ValidationError
from .extraction import WeightedNetwork, pair_key

TASK1_RANGE = (1.0, 10.0)
TASK2_RANGE = (0.0, 10.0)

ACADEMIC_BACKGROUNDS = ("arts_humanities", "social_science", "science_medical", "other")


@dataclass(frozen=True)
class Task1Entry:
    pair: tuple[str, str]
    importance: float
    entry_order: int


@dataclass
class Task1Response:
    respondent_id: str
    story_id: str
    entries: list[Task1Entry]


@dataclass
class Task2Response:
    respondent_id: str
    story_id: str
    cells: dict[tuple[str, str], float] = field(default_factory=dict)  # absent cell = 0


@dataclass
class RespondentProfile:
    respondent_id: str
    gender: str
    age: int
    education_level: str
    academic_background: str
    contact_email: str | None = None

    def __post_init__(self):
        if self.academic_background not in ACADEMIC_BACKGROUNDS:
            raise ValidationError(
                f"academic_background must be one of {ACADEMIC_BACKGROUNDS}, "
                f"got {self.academic_background!r}"
            )


@dataclass
class SurveyResponse:
    """One reader's complete submission."""

    respondent_id: str
    story_id: str
    task1: Task1Response | None = None
    task2: Task2Response | None = None
    profile: RespondentProfile | None = None


def _check_pair(pair: tuple[str, str], known: set[str], where: str) -> tuple[str, str]:
    a, b = pair
    for name in (a, b):
        if name not in known:
            raise ValidationError(f"{where}: unknown character {name!r}")
    if a == b:
        raise ValidationError(f"{where}: pair members must differ, got {a!r} twice")
    return pair_key(a, b)


def validate_task1(response: Task1Response, registry: CharacterRegistry) -> None:
    known = set(registry.names)
    last_order = None
    for i, entry in enumerate(response.entries):
        where = f"task1 entry {i}"
        _check_pair(entry.pair, known, where)
        lo, hi = TASK1_RANGE
        if not (lo <= entry.importance <= hi):
            raise ValidationError(
                f"{where}: importance {entry.importance} outside [{lo:g}, {hi:g}]"
            )
        if last_order is not None and entry.entry_order <= last_order:
            raise ValidationError(f"{where}: entry_order must be strictly increasing")
        last_order = entry.entry_order


def validate_task2(response: Task2Response, registry: CharacterRegistry) -> None:
    known = set(registry.names)
    for pair, value in response.cells.items():
        where = f"task2 cell {pair[0]}/{pair[1]}"
        _check_pair(pair, known, where)
        lo, hi = TASK2_RANGE
        if not (lo <= value <= hi):
            raise ValidationError(f"{where}: value {value} outside [{lo:g}, {hi:g}]")


def respondent_network(
    response: Task1Response | Task2Response, registry: CharacterRegistry
) -> WeightedNetwork:
    """One respondent's weighted network over the full registry node set.

    Task 1 sums entry importances per pair (which may pass 10); Task 2 maps
    matrix cells directly.
    """
    if isinstance(response, Task1Response):
        validate_task1(response, registry)
        net = WeightedNetwork(registry.names, f"task1:{response.respondent_id}")
        for entry in response.entries:
            net.add_weight(entry.pair[0], entry.pair[1], entry.importance)
    elif isinstance(response, Task2Response):
        validate_task2(response, registry)
        net = WeightedNetwork(registry.names, f"task2:{response.respondent_id}")
        for (a, b), value in response.cells.items():
            if value:
                net.add_weight(a, b, value)
    else:
        raise TypeError(f"expected Task1Response or Task2Response, got {type(response)!r}")
    return net


def democracy_normalize(networks: list[WeightedNetwork]) -> list[WeightedNetwork]:
    """Rescale each network so every respondent contributes the same total.

    Every output network totals the mean of the input totals; the grand
    total is preserved. Zero-total networks pass through unchanged and do
    not enter the mean.
    """
    if not networks:
        raise ValueError("no networks to normalize")
    _require_same_nodes(networks)
    totals = [net.total() for net in networks]
    positive = [t for t in totals if t > 0]
    if not positive:
        warnings.warn("all networks have zero total weight; normalization is a no-op")
        return [net.copy() for net in networks]
    mean_total = sum(positive) / len(positive)
    return [
        net.scaled(mean_total / t) if t > 0 else net.copy()
        for net, t in zip(networks, totals)
    ]


def average_network(networks: list[WeightedNetwork]) -> WeightedNetwork:
    """Per-pair arithmetic mean of the given networks."""
    if not networks:
        raise ValueError("cannot average an empty list of networks")
    _require_same_nodes(networks)
    out = WeightedNetwork(networks[0].nodes, "average")
    k = len(networks)
    for a, b in out.pairs():
        mean = sum(net.weight(a, b) for net in networks) / k
        if mean:
            out.set_weight(a, b, mean)
    return out


def scale_to_pattern(net: WeightedNetwork, pattern_max: float = 10.0) -> WeightedNetwork:
    """Linearly rescale so the strongest link equals `pattern_max` exactly.

    All weight ratios (and hence the ranking and the argmax pair) are
    preserved. Errors on an all-zero network, where no linear factor exists.
    """
    if pattern_max <= 0:
        raise ValueError(f"pattern_max must be positive, got {pattern_max}")
    if net.n_links() == 0:
        raise ValueError("cannot scale an all-zero network: no linear factor exists")
    _, max_w = net.max_link()
    out = net.copy()
    # dividing first guarantees the maximum maps to exactly pattern_max
    out._weights = {k: (w / max_w) * pattern_max for k, w in net._weights.items()}
    return out


def _require_same_nodes(networks: list[WeightedNetwork]) -> None:
    first = networks[0]
    for net in networks[1:]:
        if not first.same_nodes(net):
            raise ValueError("networks must share an identical node list")


# --- file formats ---------------------------------------------------------
#
# Line-oriented single-response files (tab-separated):
#     # castnet-task1<TAB>respondent=r1<TAB>story=the-teacher
#     Kate Swift<TAB>George Willard<TAB>7
# Task 1 entry order is the line order. Task 2 uses the same layout with
# header "# castnet-task2"; omitted cells are 0.
#
# Bulk document (JSON): every completed response for one story, the format
# the collector exports and this module imports:
#     {"format": "castnet-responses", "version": 1, "story_id": ...,
#      "responses": [{"respondent_id": ..., "task1": [...], "task2": [...],
#                     "profile": {...} or null}]}

TASK1_MAGIC = "# castnet-task1"
TASK2_MAGIC = "# castnet-task2"
BULK_FORMAT = "castnet-responses"


def _parse_survey_header(path: Path, line: str, magic: str) -> tuple[str, str]:
    parts = line.rstrip("\n").split("\t")
    if len(parts) != 3 or parts[0] != magic:
        raise FormatError(path, 1, f"expected header {magic!r}")
    if not parts[1].startswith("respondent=") or not parts[2].startswith("story="):
        raise FormatError(path, 1, "header must carry respondent= and story=")
    return parts[1][len("respondent="):], parts[2][len("story="):]


def _read_triples(path: Path, magic: str):
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise FormatError(path, 1, "empty file")
    respondent, story = _parse_survey_header(path, lines[0], magic)
    triples = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise FormatError(path, lineno, f"expected 3 tab-separated fields, got {len(fields)}")
        try:
            value = float(fields[2])
        except ValueError:
            raise FormatError(path, lineno, f"bad value {fields[2]!r}") from None
        triples.append((fields[0], fields[1], value, lineno))
    return respondent, story, triples


def read_task1(path: str | Path) -> Task1Response:
    path = Path(path)
    respondent, story, triples = _read_triples(path, TASK1_MAGIC)
    entries = [
        Task1Entry(pair_key(a, b), value, order)
        for order, (a, b, value, _) in enumerate(triples)
    ]
    return Task1Response(respondent, story, entries)


def write_task1(response: Task1Response, path: str | Path) -> None:
    lines = [f"{TASK1_MAGIC}\trespondent={response.respondent_id}\tstory={response.story_id}"]
    for entry in sorted(response.entries, key=lambda e: e.entry_order):
        lines.append(f"{entry.pair[0]}\t{entry.pair[1]}\t{entry.importance!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_task2(path: str | Path) -> Task2Response:
    path = Path(path)
    respondent, story, triples = _read_triples(path, TASK2_MAGIC)
    cells: dict[tuple[str, str], float] = {}
    for a, b, value, lineno in triples:
        key = pair_key(a, b) if a != b else (a, b)
        if key in cells:
            raise FormatError(path, lineno, f"duplicate cell {a!r}/{b!r}")
        cells[key] = value
    return Task2Response(respondent, story, cells)


def write_task2(response: Task2Response, path: str | Path) -> None:
    lines = [f"{TASK2_MAGIC}\trespondent={response.respondent_id}\tstory={response.story_id}"]
    for (a, b), value in sorted(response.cells.items()):
        if value:
            lines.append(f"{a}\t{b}\t{value!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def response_to_dict(response: SurveyResponse) -> dict:
    doc: dict = {"respondent_id": response.respondent_id}
    if response.task1 is not None:
        doc["task1"] = [
            {"pair": list(e.pair), "importance": e.importance, "entry_order": e.entry_order}
            for e in response.task1.entries
        ]
    if response.task2 is not None:
        doc["task2"] = [
            {"pair": list(pair), "value": value}
            for pair, value in sorted(response.task2.cells.items())
            if value
        ]
    if response.profile is not None:
        p = response.profile
        doc["profile"] = {
            "gender": p.gender,
            "age": p.age,
            "education_level": p.education_level,
            "academic_background": p.academic_background,
        }
    return doc


def response_from_dict(doc: dict, story_id: str) -> SurveyResponse:
    rid = doc["respondent_id"]
    response = SurveyResponse(rid, story_id)
    if "task1" in doc:
        entries = [
            Task1Entry(pair_key(*e["pair"]), float(e["importance"]), int(e["entry_order"]))
            for e in doc["task1"]
        ]
        entries.sort(key=lambda e: e.entry_order)
        response.task1 = Task1Response(rid, story_id, entries)
    if "task2" in doc:
        cells = {pair_key(*c["pair"]): float(c["value"]) for c in doc["task2"]}
        response.task2 = Task2Response(rid, story_id, cells)
    if doc.get("profile"):
        p = doc["profile"]
        response.profile = RespondentProfile(
            rid, p["gender"], int(p["age"]), p["education_level"],
            p["academic_background"], p.get("contact_email"),
        )
    return response


def write_responses(responses: list[SurveyResponse], story_id: str, path: str | Path) -> None:
    doc = {
        "format": BULK_FORMAT,
        "version": 1,
        "story_id": story_id,
        "responses": [response_to_dict(r) for r in responses],
    }
    Path(path).write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def read_responses(path: str | Path) -> tuple[str, list[SurveyResponse]]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(path, exc.lineno, f"invalid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict) or doc.get("format") != BULK_FORMAT:
        raise FormatError(path, None, f"not a {BULK_FORMAT} document")
    if doc.get("version") != 1:
        raise FormatError(path, None, f"unsupported version {doc.get('version')!r}")
    story_id = doc["story_id"]
    try:
        responses = [response_from_dict(r, story_id) for r in doc["responses"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(path, None, f"malformed response record: {exc}") from exc
    return story_id, responses


def validate_responses(responses: list[SurveyResponse], registry: CharacterRegistry) -> None:
    for r in responses:
        if r.story_id != registry.story_id:
            raise ValidationError(
                f"response {r.respondent_id!r} is for story {r.story_id!r}, "
                f"not {registry.story_id!r}"
            )
        if r.task1 is not None:
            validate_task1(r.task1, registry)
        if r.task2 is not None:
            validate_task2(r.task2, registry)
