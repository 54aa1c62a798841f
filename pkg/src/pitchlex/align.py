"""Word-level transcript alignment and the hit-rate accuracy metric."""
from __future__ import annotations

import re
import statistics
from dataclasses import dataclass, field
from typing import Iterable

from . import lexicon
from .corpus import CampaignRecord
from .subtitles import transcript_text

MATCH = "match"
SUB = "sub"
DEL = "del"
INS = "ins"

_BRACKET = re.compile(r"\[[^\]]*\]")


@dataclass
class WordAlignment:
    """Minimum-edit alignment between a reference and hypothesis word list.

    ``ops`` is the full edit script as (kind, ref_word, hyp_word) with None
    on the side an insertion/deletion does not touch; replaying it
    reconstructs both sequences.
    """

    matches: int
    substitutions: int
    insertions: int
    deletions: int
    ref_len: int
    ops: list[tuple[str, str | None, str | None]] = field(default_factory=list)

    @property
    def edit_distance(self) -> int:
        return self.substitutions + self.insertions + self.deletions


def normalize_words(text: str, keep_brackets: bool = False, keep_numbers: bool = True) -> list[str]:
    """Lowercased words for alignment.

    Punctuation is stripped except internal apostrophes; numerals stay as
    digit strings ("3,000"); bracketed caption annotations like "[Music]"
    are removed unless ``keep_brackets``. ``keep_numbers=False`` drops
    number tokens entirely.
    """
    if not keep_brackets:
        text = _BRACKET.sub(" ", text)
    tokens = lexicon.tokenize(text)
    if not keep_numbers:
        tokens = [t for t in tokens if t.kind != lexicon.NUMBER]
    return [t.surface for t in tokens]


def align_words(ref: list[str], hyp: list[str]) -> WordAlignment:
    """Unit-cost minimum-edit alignment of two word sequences.

    Traceback ties break preferring match > substitution > deletion >
    insertion, which fixes the ops sequence; the counts are tie-invariant.
    """
    n, m = len(ref), len(hyp)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dp[i][0] = i
    for j in range(1, m + 1):
        dp[0][j] = j
    for i in range(1, n + 1):
        row, prev = dp[i], dp[i - 1]
        r = ref[i - 1]
        for j in range(1, m + 1):
            best = prev[j - 1] + (0 if r == hyp[j - 1] else 1)
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if row[j - 1] + 1 < best:
                best = row[j - 1] + 1
            row[j] = best

    ops: list[tuple[str, str | None, str | None]] = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and ref[i - 1] == hyp[j - 1] and dp[i][j] == dp[i - 1][j - 1]:
            ops.append((MATCH, ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and dp[i][j] == dp[i - 1][j - 1] + 1:
            ops.append((SUB, ref[i - 1], hyp[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and dp[i][j] == dp[i - 1][j] + 1:
            ops.append((DEL, ref[i - 1], None))
            i -= 1
        else:
            ops.append((INS, None, hyp[j - 1]))
            j -= 1
    ops.reverse()

    counts = {MATCH: 0, SUB: 0, DEL: 0, INS: 0}
    for kind, _, _ in ops:
        counts[kind] += 1
    return WordAlignment(
        matches=counts[MATCH],
        substitutions=counts[SUB],
        insertions=counts[INS],
        deletions=counts[DEL],
        ref_len=n,
        ops=ops,
    )


def hit_rate(alignment: WordAlignment) -> float:
    """Matched reference words over reference length (word recall)."""
    if alignment.ref_len == 0:
        raise ValueError("hit rate is undefined for an empty reference")
    return alignment.matches / alignment.ref_len


@dataclass
class SourceAccuracy:
    source: str
    rates: list[tuple[str, float]]  # (record id, hit rate), in record order

    @property
    def n(self) -> int:
        return len(self.rates)

    @property
    def mean(self) -> float:
        return statistics.fmean(r for _, r in self.rates)

    @property
    def sd(self) -> float:
        values = [r for _, r in self.rates]
        return statistics.stdev(values) if len(values) > 1 else 0.0


@dataclass
class BenchmarkReport:
    sources: list[SourceAccuracy]  # ranked by mean hit rate, descending
    diagnostics: list[str] = field(default_factory=list)


def benchmark_sources(
    records: Iterable[CampaignRecord],
    reference: str = "manual",
    sources: list[str] | None = None,
    keep_brackets: bool = False,
    keep_numbers: bool = True,
) -> BenchmarkReport:
    """Per-source hit rates against each record's reference transcript.

    Records without the reference track are skipped with a diagnostic, as
    are (record, source) pairs lacking the hypothesis track. Sources are
    ranked by mean hit rate (ties by name).
    """
    records = list(records)
    if sources is None:
        sources = []
        for r in records:
            for s in r.subtitles:
                if s != reference and s not in sources:
                    sources.append(s)

    strip = not keep_brackets
    per_source: dict[str, list[tuple[str, float]]] = {s: [] for s in sources}
    diagnostics: list[str] = []
    for r in records:
        raw_ref = r.subtitles.get(reference)
        if raw_ref is None:
            diagnostics.append(f"record '{r.id}': no '{reference}' reference track")
            continue
        ref_words = normalize_words(
            transcript_text(raw_ref, strip_annotations=strip),
            keep_brackets=keep_brackets, keep_numbers=keep_numbers,
        )
        if not ref_words:
            diagnostics.append(f"record '{r.id}': reference transcript is empty")
            continue
        for s in sources:
            raw_hyp = r.subtitles.get(s)
            if raw_hyp is None:
                diagnostics.append(f"record '{r.id}': no '{s}' track, pair skipped")
                continue
            hyp_words = normalize_words(
                transcript_text(raw_hyp, strip_annotations=strip),
                keep_brackets=keep_brackets, keep_numbers=keep_numbers,
            )
            per_source[s].append((r.id, hit_rate(align_words(ref_words, hyp_words))))

    ranked = [SourceAccuracy(s, rates) for s, rates in per_source.items() if rates]
    ranked.sort(key=lambda a: (-a.mean, a.source))
    return BenchmarkReport(sources=ranked, diagnostics=diagnostics)
