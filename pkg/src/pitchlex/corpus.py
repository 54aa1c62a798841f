"""Campaign corpus loading, validation, and control-variable derivation.

Corpus files are CSV (RFC 4180) or JSONL with one record per row/line.
Columns/keys: id, funded, goal_usd, created_count, has_video,
picture_count, duration_days, updates_count, pledged_usd, reward_levels,
team, creativity, then either description (inline) or description_path,
plus any number of subtitle_<source> / subtitle_<source>_path columns.
Side-file paths resolve relative to the corpus file's directory. UTF-8
throughout. Unknown extra columns are ignored.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

from .errors import SchemaError, SideFileError

REQUIRED_FIELDS = (
    "id", "funded", "goal_usd", "created_count", "has_video", "picture_count",
    "duration_days", "updates_count", "pledged_usd", "reward_levels", "team",
    "creativity",
)

_INT_FIELDS = {
    "funded", "created_count", "has_video", "picture_count",
    "updates_count", "reward_levels", "team", "creativity",
}
_FLOAT_FIELDS = {"goal_usd", "duration_days", "pledged_usd"}

CONTROL_NAMES = (
    "goal", "created", "video", "picture", "duration",
    "log_updates", "log_pledged", "reward_levels", "team", "creativity",
)


@dataclass
class CampaignRecord:
    id: str
    funded: int
    goal_usd: float
    created_count: int
    has_video: int
    picture_count: int
    duration_days: float
    updates_count: int
    pledged_usd: float
    reward_levels: int
    team: int
    creativity: int
    description: str = ""
    subtitles: dict[str, str] = field(default_factory=dict)  # source -> raw track


@dataclass
class ControlVector:
    goal: float
    created: float
    video: float
    picture: float
    duration: float
    log_updates: float
    log_pledged: float
    reward_levels: float
    team: float
    creativity: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in CONTROL_NAMES}


class Violation(NamedTuple):
    field: str
    rule: str


def _parse_value(name: str, raw, row: int):
    try:
        if name in _INT_FIELDS:
            if isinstance(raw, bool):
                raise ValueError
            if isinstance(raw, float):
                if not raw.is_integer():
                    raise ValueError
                return int(raw)
            return int(str(raw).strip())
        if name in _FLOAT_FIELDS:
            value = float(str(raw).strip()) if not isinstance(raw, (int, float)) else float(raw)
            if not math.isfinite(value):
                raise ValueError
            return value
    except (TypeError, ValueError):
        raise SchemaError(f"row {row}: field '{name}' has invalid value {raw!r}") from None
    return str(raw)


def _read_side_file(base_dir: Path, rel_path: str, record_id: str, what: str) -> str:
    try:
        return (base_dir / rel_path).read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise SideFileError(
            f"record '{record_id}': cannot read {what} file '{rel_path}': {exc}"
        ) from exc


def _record_from_mapping(mapping: dict, row: int, base_dir: Path) -> CampaignRecord:
    for name in REQUIRED_FIELDS:
        if name not in mapping or mapping[name] is None or str(mapping[name]) == "":
            raise SchemaError(f"row {row}: missing required field '{name}'")
    values = {name: _parse_value(name, mapping[name], row) for name in REQUIRED_FIELDS}
    record_id = str(values["id"])

    inline = mapping.get("description") or ""
    path = mapping.get("description_path") or ""
    if inline and path:
        raise SchemaError(f"row {row}: both 'description' and 'description_path' given")
    description = _read_side_file(base_dir, path, record_id, "description") if path else str(inline)

    subtitles: dict[str, str] = {}
    for key in mapping:
        if not key.startswith("subtitle_"):
            continue
        raw = mapping[key]
        if raw is None or raw == "":
            continue
        if key.endswith("_path"):
            source = key[len("subtitle_"):-len("_path")]
            if not source:
                raise SchemaError(f"row {row}: empty subtitle source name in column '{key}'")
            text = _read_side_file(base_dir, str(raw), record_id, f"subtitle '{source}'")
        else:
            source = key[len("subtitle_"):]
            if not source:
                raise SchemaError(f"row {row}: empty subtitle source name in column '{key}'")
            text = str(raw)
        if source in subtitles:
            raise SchemaError(f"row {row}: subtitle source '{source}' given twice")
        subtitles[source] = text

    return CampaignRecord(id=record_id, description=description, subtitles=subtitles,
                          **{k: v for k, v in values.items() if k != "id"})


def load_corpus(path: str | Path, format: str | None = None) -> list[CampaignRecord]:
    """Load campaign records in file order; fails on duplicate ids.

    ``format`` is "csv" or "jsonl"; inferred from the file suffix when
    omitted.
    """
    path = Path(path)
    if format is None:
        format = "jsonl" if path.suffix.lower() in (".jsonl", ".ndjson") else "csv"
    if format not in ("csv", "jsonl"):
        raise ValueError(f"unknown corpus format '{format}'")
    base_dir = path.parent

    records: list[CampaignRecord] = []
    if format == "csv":
        with open(path, newline="", encoding="utf-8-sig") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                return []
            seen = set()
            for col in header:
                if col in seen:
                    raise SchemaError(f"duplicate column '{col}' in header")
                seen.add(col)
            for name in REQUIRED_FIELDS:
                if name not in seen:
                    raise SchemaError(f"missing required column '{name}'")
            for row_num, row in enumerate(reader, start=1):
                if not row:
                    continue
                if len(row) != len(header):
                    raise SchemaError(f"row {row_num}: expected {len(header)} fields, got {len(row)}")
                records.append(_record_from_mapping(dict(zip(header, row)), row_num, base_dir))
    else:
        with open(path, encoding="utf-8-sig") as fh:
            for row_num, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise SchemaError(f"row {row_num}: invalid JSON: {exc}") from exc
                if not isinstance(obj, dict):
                    raise SchemaError(f"row {row_num}: expected a JSON object")
                records.append(_record_from_mapping(obj, row_num, base_dir))

    seen_ids = set()
    for record in records:
        if record.id in seen_ids:
            raise SchemaError(f"duplicate record id '{record.id}'")
        seen_ids.add(record.id)
    return records


def write_corpus(records: list[CampaignRecord], path: str | Path, format: str | None = None) -> None:
    """Write records with all descriptions/subtitles inline (round-trips load)."""
    path = Path(path)
    if format is None:
        format = "jsonl" if path.suffix.lower() in (".jsonl", ".ndjson") else "csv"
    sources = sorted({s for r in records for s in r.subtitles})
    if format == "csv":
        header = list(REQUIRED_FIELDS) + ["description"] + [f"subtitle_{s}" for s in sources]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for r in records:
                row = [getattr(r, name) for name in REQUIRED_FIELDS]
                row.append(r.description)
                row.extend(r.subtitles.get(s, "") for s in sources)
                writer.writerow(row)
    elif format == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            for r in records:
                obj = {name: getattr(r, name) for name in REQUIRED_FIELDS}
                obj["description"] = r.description
                for s in sources:
                    if s in r.subtitles:
                        obj[f"subtitle_{s}"] = r.subtitles[s]
                fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
    else:
        raise ValueError(f"unknown corpus format '{format}'")


def validate_record(record: CampaignRecord) -> list[Violation]:
    """Check record invariants; returns one violation per broken rule."""
    v: list[Violation] = []
    if not record.id:
        v.append(Violation("id", "must be non-empty"))
    for name in ("funded", "team", "has_video"):
        if getattr(record, name) not in (0, 1):
            v.append(Violation(name, "must be 0 or 1"))
    if not record.goal_usd > 0:
        v.append(Violation("goal_usd", "must be > 0"))
    if not record.duration_days > 0:
        v.append(Violation("duration_days", "must be > 0"))
    if record.created_count < 1:
        v.append(Violation("created_count", "must be >= 1"))
    if record.picture_count < 0:
        v.append(Violation("picture_count", "must be >= 0"))
    if record.updates_count < 0:
        v.append(Violation("updates_count", "must be >= 0"))
    if record.pledged_usd < 0:
        v.append(Violation("pledged_usd", "must be >= 0"))
    if record.reward_levels < 1:
        v.append(Violation("reward_levels", "must be >= 1"))
    if record.creativity not in (1, 2, 3):
        v.append(Violation("creativity", "must be 1, 2, or 3"))
    for source in record.subtitles:
        if not source:
            v.append(Violation("subtitles", "subtitle source names must be non-empty"))
    return v


def derive_controls(record: CampaignRecord) -> ControlVector:
    """Control vector with ln(1+x) applied to updates and pledged amounts."""
    return ControlVector(
        goal=float(record.goal_usd),
        created=float(record.created_count),
        video=float(record.has_video),
        picture=float(record.picture_count),
        duration=float(record.duration_days),
        log_updates=math.log1p(record.updates_count),
        log_pledged=math.log1p(record.pledged_usd),
        reward_levels=float(record.reward_levels),
        team=float(record.team),
        creativity=float(record.creativity),
    )
