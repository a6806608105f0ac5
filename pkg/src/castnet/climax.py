"""Climax curves: narrative-time profiles of summed interaction importance.

The computer arm splits the story into n_parts (default 4) balanced by word
count and accrues event weights to the part holding each event's unit. The
human arm splits each respondent's time-ordered entries into n_parts
contiguous blocks, normalizes per respondent, then averages, so prolific
annotators do not dominate.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .corpus import TextUnit
from .errors import FormatError
from .extraction import InteractionEvent
from .survey import Task1Response

DEFAULT_PARTS = 4
DEFAULT_SHAPE_TOL = 0.05


class ClimaxShape(Enum):
    CLIMAX = "climax"
    ANTI_CLIMAX = "anti_climax"
    FLAT = "flat"
    OTHER = "other"


@dataclass(frozen=True)
class ClimaxCurve:
    n_parts: int
    sums: tuple[float, ...]
    normalized: tuple[float, ...]
    source: str  # "computer" or "human"

    def __post_init__(self):
        if len(self.sums) != self.n_parts or len(self.normalized) != self.n_parts:
            raise ValueError("sums and normalized must have n_parts entries")
        if any(s < 0 for s in self.sums):
            raise ValueError("part sums must be non-negative")
        total = sum(self.normalized)
        if self.normalized and any(self.normalized) and abs(total - 1.0) > 1e-9:
            raise ValueError(f"normalized curve sums to {total}, expected 1")


def _normalize(sums: list[float]) -> tuple[float, ...]:
    total = sum(sums)
    if total == 0:
        return tuple(0.0 for _ in sums)
    return tuple(s / total for s in sums)


def partition_units(units: list[TextUnit], n_parts: int) -> list[tuple[int, int]]:
    """Contiguous unit ranges [(start, end), ...] balanced by word count.

    Greedy without splitting units: a part closes once its word count
    reaches an equal share of the words still unassigned; later parts are
    always left at least one unit each.
    """
    if n_parts < 1:
        raise ValueError(f"n_parts must be at least 1, got {n_parts}")
    if n_parts > len(units):
        raise ValueError(f"cannot split {len(units)} units into {n_parts} parts")
    bounds = []
    start = 0
    words_left = sum(u.word_count for u in units)
    for part in range(n_parts):
        parts_left = n_parts - part
        if parts_left == 1:
            bounds.append((start, len(units)))
            break
        target = words_left / parts_left
        last_allowed = len(units) - (parts_left - 1)
        taken = 0
        end = start
        while end < last_allowed:
            taken += units[end].word_count
            end += 1
            if taken >= target:
                break
        end = max(end, start + 1)
        bounds.append((start, end))
        words_left -= sum(u.word_count for u in units[start:end])
        start = end
    return bounds


def computer_climax(
    units: list[TextUnit],
    events: list[InteractionEvent],
    n_parts: int = DEFAULT_PARTS,
) -> ClimaxCurve:
    """Sum event weights per word-balanced story part."""
    bounds = partition_units(units, n_parts)
    part_of = {}
    for part, (start, end) in enumerate(bounds):
        for unit_index in range(start, end):
            part_of[unit_index] = part
    sums = [0.0] * n_parts
    for event in events:
        if event.position not in part_of:
            raise ValueError(
                f"event at position {event.position} outside the {len(units)} units"
            )
        sums[part_of[event.position]] += event.weight
    return ClimaxCurve(n_parts, tuple(sums), _normalize(sums), "computer")


def _block_sizes(n_entries: int, n_parts: int) -> list[int]:
    base, rem = divmod(n_entries, n_parts)
    return [base + 1] * rem + [base] * (n_parts - rem)


def human_climax(
    responses: list[Task1Response], n_parts: int = DEFAULT_PARTS
) -> ClimaxCurve:
    """Average of per-respondent normalized entry-order curves.

    Each respondent's entries, in entry order, are cut into n_parts
    contiguous blocks of as-equal-as-possible length (remainder to the
    earliest blocks; short respondents leave trailing empty blocks).
    """
    if n_parts < 1:
        raise ValueError(f"n_parts must be at least 1, got {n_parts}")
    raw_sums = []
    normalized_curves = []
    for response in responses:
        entries = sorted(response.entries, key=lambda e: e.entry_order)
        total = sum(e.importance for e in entries)
        if not entries or total == 0:
            warnings.warn(
                f"respondent {response.respondent_id!r} has no weighted entries; excluded"
            )
            continue
        sums = []
        cursor = 0
        for size in _block_sizes(len(entries), n_parts):
            sums.append(sum(e.importance for e in entries[cursor:cursor + size]))
            cursor += size
        raw_sums.append(sums)
        normalized_curves.append(_normalize(sums))
    if not normalized_curves:
        raise ValueError("no respondent contributed a usable curve")
    k = len(normalized_curves)
    mean_sums = tuple(sum(c[i] for c in raw_sums) / k for i in range(n_parts))
    mean_norm = [sum(c[i] for c in normalized_curves) / k for i in range(n_parts)]
    # per-respondent curves each sum to 1; renormalize to absorb float drift
    return ClimaxCurve(n_parts, mean_sums, _normalize(mean_norm), "human")


def classify_shape(curve: ClimaxCurve, tol: float = DEFAULT_SHAPE_TOL) -> ClimaxShape:
    """Coarse shape label for a normalized curve.

    Checked in order: flat (range within tol); climax (rise to a peak after
    the first part, never rising by more than tol afterwards, peak clearing
    the endpoint mean by more than tol); anti-climax (never rising by more
    than tol and falling by more than tol overall); otherwise other.
    """
    v = curve.normalized
    if len(v) == 1 or max(v) - min(v) <= tol:
        return ClimaxShape.FLAT
    peak = v.index(max(v))
    if peak >= 1:
        no_rise_after = all(v[i + 1] <= v[i] + tol for i in range(peak, len(v) - 1))
        clears_ends = v[peak] > (v[0] + v[-1]) / 2 + tol
        if no_rise_after and clears_ends:
            return ClimaxShape.CLIMAX
    never_rises = all(v[i + 1] <= v[i] + tol for i in range(len(v) - 1))
    if never_rises and v[0] - v[-1] > tol:
        return ClimaxShape.ANTI_CLIMAX
    return ClimaxShape.OTHER


# --- curve files and charts -------------------------------------------------

CLIMAX_MAGIC = "# castnet-climax"


def write_curve(curve: ClimaxCurve, path: str | Path) -> None:
    lines = [f"{CLIMAX_MAGIC}\tparts={curve.n_parts}\tsource={curve.source}"]
    for i in range(curve.n_parts):
        lines.append(f"{i}\t{curve.sums[i]!r}\t{curve.normalized[i]!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_curve(path: str | Path) -> ClimaxCurve:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise FormatError(path, 1, "empty file")
    head = lines[0].split("\t")
    if len(head) != 3 or head[0] != CLIMAX_MAGIC:
        raise FormatError(path, 1, f"expected header {CLIMAX_MAGIC!r}")
    if not head[1].startswith("parts=") or not head[2].startswith("source="):
        raise FormatError(path, 1, "header must carry parts= and source=")
    n_parts = int(head[1][len("parts="):])
    source = head[2][len("source="):]
    sums = []
    normalized = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise FormatError(path, lineno, "expected part<TAB>sum<TAB>normalized")
        try:
            part = int(fields[0])
            part_sum = float(fields[1])
            part_norm = float(fields[2])
        except ValueError as exc:
            raise FormatError(path, lineno, str(exc)) from None
        if part != len(sums):
            raise FormatError(path, lineno, f"part indices out of order at {fields[0]}")
        sums.append(part_sum)
        normalized.append(part_norm)
    if len(sums) != n_parts:
        raise FormatError(path, len(lines), f"expected {n_parts} parts, got {len(sums)}")
    return ClimaxCurve(n_parts, tuple(sums), tuple(normalized), source)


def write_curve_chart(curve: ClimaxCurve, path: str | Path) -> None:
    """Render the normalized curve as a bar chart image."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.2))
    parts = list(range(1, curve.n_parts + 1))
    ax.bar(parts, curve.normalized, color="#4878a8")
    ax.set_xlabel("story part")
    ax.set_ylabel("share of interaction importance")
    ax.set_title(f"{curve.source} arm, {curve.n_parts} parts")
    ax.set_xticks(parts)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
