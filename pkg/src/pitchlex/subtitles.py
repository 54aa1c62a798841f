"""SRT and WebVTT parsing, plus flattening of cue tracks to transcript text."""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from .errors import ParseError

logger = logging.getLogger(__name__)

_SRT_TS = re.compile(r"^(\d{2,}):(\d{2}):(\d{2}),(\d{3})$")
_VTT_TS = re.compile(r"^(?:(\d{2,}):)?(\d{2}):(\d{2})\.(\d{3})$")
_ARROW = re.compile(r"\s*-->\s*")
_TAG = re.compile(r"<[^>]*>")
_BRACKET = re.compile(r"\[[^\]]*\]")
_SRT_TIMING_HINT = re.compile(r"\d{2,}:\d{2}:\d{2},\d{3}\s*-->")


@dataclass
class SubtitleCue:
    start_ms: int
    end_ms: int
    text: str
    index: int | None = None  # SRT block number; absent for VTT


@dataclass
class SubtitleTrack:
    source: str = ""
    cues: list[SubtitleCue] = field(default_factory=list)


def _decode(data: bytes | str) -> str:
    if isinstance(data, bytes):
        text = data.decode("utf-8-sig")
    else:
        text = data.lstrip("﻿")
    return text.replace("\r\n", "\n").replace("\r", "\n")


def _parse_srt_ts(stamp: str, lineno: int) -> int:
    m = _SRT_TS.match(stamp.strip())
    if not m:
        raise ParseError(f"line {lineno}: malformed SRT timestamp '{stamp.strip()}'")
    h, mi, s, ms = (int(g) for g in m.groups())
    return ((h * 60 + mi) * 60 + s) * 1000 + ms


def _parse_vtt_ts(stamp: str, lineno: int) -> int:
    m = _VTT_TS.match(stamp.strip())
    if not m:
        raise ParseError(f"line {lineno}: malformed WebVTT timestamp '{stamp.strip()}'")
    h = int(m.group(1)) if m.group(1) else 0
    mi, s, ms = int(m.group(2)), int(m.group(3)), int(m.group(4))
    return ((h * 60 + mi) * 60 + s) * 1000 + ms


def _split_timing(line: str, lineno: int) -> tuple[str, str]:
    parts = _ARROW.split(line, maxsplit=1)
    if len(parts) != 2:
        raise ParseError(f"line {lineno}: missing '-->' in timing line")
    return parts[0], parts[1]


def _ensure_order(track: SubtitleTrack, kind: str) -> None:
    starts = [c.start_ms for c in track.cues]
    indices = [c.index for c in track.cues if c.index is not None]
    bad_idx = any(b < a for a, b in zip(indices, indices[1:]))
    bad_start = any(b < a for a, b in zip(starts, starts[1:]))
    if bad_idx or bad_start:
        logger.warning("%s cues out of order; re-sorting by start time", kind)
        track.cues.sort(key=lambda c: c.start_ms)  # stable


def parse_srt(data: bytes | str, source: str = "") -> SubtitleTrack:
    """Parse SRT bytes/text into a cue track.

    Blocks are separated by blank lines: an optional numeric index line, a
    "HH:MM:SS,mmm --> HH:MM:SS,mmm" timing line, then one or more text
    lines (kept verbatim, markup included, so tracks re-serialize exactly).
    """
    lines = _decode(data).split("\n")
    track = SubtitleTrack(source=source)
    i = 0
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        index = None
        if lines[i].strip().isdigit():
            index = int(lines[i].strip())
            i += 1
        if i >= len(lines) or not lines[i].strip():
            raise ParseError(f"line {i + 1}: cue block truncated before timing line")
        lineno = i + 1
        start_s, end_s = _split_timing(lines[i], lineno)
        start = _parse_srt_ts(start_s, lineno)
        end = _parse_srt_ts(end_s, lineno)
        if end <= start:
            raise ParseError(f"line {lineno}: cue end {end_s.strip()} is not after start")
        i += 1
        text_lines = []
        while i < len(lines) and lines[i].strip():
            text_lines.append(lines[i])
            i += 1
        text = "\n".join(text_lines)
        if not text.strip():
            raise ParseError(f"line {lineno}: cue has no text")
        track.cues.append(SubtitleCue(start, end, text, index=index))
    _ensure_order(track, "SRT")
    return track


def parse_vtt(data: bytes | str, source: str = "") -> SubtitleTrack:
    """Parse WebVTT bytes/text into a cue track.

    Requires the WEBVTT magic. Cue identifiers, settings, NOTE/STYLE/REGION
    blocks are ignored; inline markup tags (including timestamps-in-text)
    are stripped from cue text and &amp;/&lt;/&gt; are decoded. Cues left
    empty by markup stripping are dropped.
    """
    lines = _decode(data).split("\n")
    if not lines or not (lines[0] == "WEBVTT" or lines[0].startswith(("WEBVTT ", "WEBVTT\t", "WEBVTT-"))):
        raise ParseError("missing WEBVTT header")
    track = SubtitleTrack(source=source)
    i = 1
    while i < len(lines) and lines[i].strip():  # rest of the header block
        i += 1
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        first = lines[i].strip()
        if first.startswith(("NOTE", "STYLE", "REGION")) and "-->" not in lines[i]:
            while i < len(lines) and lines[i].strip():
                i += 1
            continue
        if "-->" not in lines[i]:  # cue identifier line
            i += 1
            if i >= len(lines) or "-->" not in lines[i]:
                raise ParseError(f"line {i + 1}: expected a timing line after cue identifier")
        lineno = i + 1
        start_s, rest = _split_timing(lines[i], lineno)
        end_s = rest.strip().split(" ")[0].split("\t")[0]  # drop cue settings
        start = _parse_vtt_ts(start_s, lineno)
        end = _parse_vtt_ts(end_s, lineno)
        if end <= start:
            raise ParseError(f"line {lineno}: cue end {end_s} is not after start")
        i += 1
        text_lines = []
        while i < len(lines) and lines[i].strip():
            text_lines.append(lines[i])
            i += 1
        text = _decode_entities(_TAG.sub("", "\n".join(text_lines)))
        if text.strip():
            track.cues.append(SubtitleCue(start, end, text))
    _ensure_order(track, "WebVTT")
    return track


def _decode_entities(text: str) -> str:
    return text.replace("&lt;", "<").replace("&gt;", ">").replace("&amp;", "&")


def _clean_cue_text(text: str, strip_annotations: bool) -> str:
    text = _TAG.sub(" ", text)
    text = _decode_entities(text)
    if strip_annotations:
        text = _BRACKET.sub(" ", text)
    return " ".join(text.split())


def flatten_track(track: SubtitleTrack, strip_annotations: bool = True) -> str:
    """Join cue texts into one transcript string.

    Cue texts are cleaned (markup tags removed, whitespace normalized,
    bracketed caption annotations like "[Music]" dropped unless
    ``strip_annotations`` is off), then exact consecutive duplicates — the
    rolling-caption artifact — collapse to a single occurrence before
    joining with single spaces.
    """
    cleaned = []
    for cue in track.cues:
        text = _clean_cue_text(cue.text, strip_annotations)
        if not text:
            continue
        if cleaned and cleaned[-1] == text:
            continue
        cleaned.append(text)
    return " ".join(cleaned)


def format_srt_timestamp(ms: int) -> str:
    h, rem = divmod(ms, 3600_000)
    mi, rem = divmod(rem, 60_000)
    s, frac = divmod(rem, 1000)
    return f"{h:02d}:{mi:02d}:{s:02d},{frac:03d}"


def serialize_srt(track: SubtitleTrack) -> str:
    """Render a track in canonical SRT form (parse round-trips exactly)."""
    blocks = []
    for pos, cue in enumerate(track.cues, start=1):
        idx = cue.index if cue.index is not None else pos
        blocks.append(
            f"{idx}\n{format_srt_timestamp(cue.start_ms)} --> "
            f"{format_srt_timestamp(cue.end_ms)}\n{cue.text}"
        )
    return "\n\n".join(blocks) + ("\n" if blocks else "")


def detect_format(data: bytes | str) -> str:
    """Best-effort sniff: 'vtt', 'srt', or 'text'."""
    text = _decode(data)
    if text.startswith("WEBVTT"):
        return "vtt"
    if _SRT_TIMING_HINT.search(text):
        return "srt"
    return "text"


def transcript_text(data: bytes | str, source: str = "", strip_annotations: bool = True) -> str:
    """Flatten raw subtitle bytes/text of any supported format to a transcript.

    Plain text passes through the same cleaning as a single cue.
    """
    fmt = detect_format(data)
    if fmt == "vtt":
        return flatten_track(parse_vtt(data, source), strip_annotations)
    if fmt == "srt":
        return flatten_track(parse_srt(data, source), strip_annotations)
    return _clean_cue_text(_decode(data), strip_annotations)
