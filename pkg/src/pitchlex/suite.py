"""Build, fit, and render the seven-model comparison over a campaign corpus.

Model grid: (1) controls only, (2) description linguistics only,
(3) controls + description linguistics, (4)/(6) linguistics from the first
and second subtitle source, (5)/(7) controls (minus the video dummy,
constant in subtitled subsamples) + those linguistics. Subtitle models
restrict the sample to records carrying that source.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import features as feat
from .corpus import CONTROL_NAMES, CampaignRecord, derive_controls, validate_record
from .errors import FitError, InfiniteVIFError, ParseError
from .features import DescriptiveStats, LinguisticFeatureVector
from .glm import INTERCEPT, DesignMatrix, FitResult, fit_logistic, stars, vif
from .lexicon import CategoryDictionary
from .subtitles import transcript_text

DESCRIPTION = "description"
MODEL_IDS = (1, 2, 3, 4, 5, 6, 7)


@dataclass
class ModelSpec:
    id: int
    label: str
    text_source: str | None      # None, "description", or a subtitle source name
    include_controls: bool
    include_video_dummy: bool
    sample_filter: str           # human-readable description of the subsample


@dataclass
class SuiteResult:
    specs: dict[int, ModelSpec]
    fits: dict[int, FitResult] = field(default_factory=dict)
    skipped: dict[int, str] = field(default_factory=dict)
    observations: dict[int, int] = field(default_factory=dict)
    vifs: dict[int, dict[str, float]] = field(default_factory=dict)
    dropped: dict[int, list[str]] = field(default_factory=dict)
    stats: dict[str, DescriptiveStats] = field(default_factory=dict)
    ranking: list[int] = field(default_factory=list)  # fitted ids by pseudo-R2, desc
    diagnostics: list[str] = field(default_factory=list)


def build_model_spec(model_id: int, sources: tuple[str, ...] = ()) -> ModelSpec:
    """Model definition for ids 1..7; ids >= 4 need the subtitle source pair."""
    if model_id not in MODEL_IDS:
        raise ValueError(f"model id must be 1..7, got {model_id}")
    if model_id <= 3:
        return {
            1: ModelSpec(1, "Controls", None, True, True, "all records"),
            2: ModelSpec(2, "Description", DESCRIPTION, False, False, "all records"),
            3: ModelSpec(3, "Controls + Description", DESCRIPTION, True, True, "all records"),
        }[model_id]
    pos = 0 if model_id in (4, 5) else 1
    if len(sources) <= pos:
        raise ValueError(f"model {model_id} needs subtitle source #{pos + 1}")
    src = sources[pos]
    sample = f"records with '{src}' subtitles"
    if model_id in (4, 6):
        return ModelSpec(model_id, src, src, False, False, sample)
    return ModelSpec(model_id, f"Controls + {src}", src, True, False, sample)


def _extract_record_features(
    record: CampaignRecord,
    dictionary: CategoryDictionary,
    sources: tuple[str, ...],
    mapping: dict[str, str] | None,
    strip_annotations: bool,
) -> tuple[dict[str, LinguisticFeatureVector], list[str]]:
    """Feature vectors per text source for one record, plus diagnostics."""
    out: dict[str, LinguisticFeatureVector] = {}
    notes: list[str] = []
    out[DESCRIPTION] = feat.extract_features(record.description, dictionary, mapping)
    for src in sources:
        raw = record.subtitles.get(src)
        if raw is None:
            continue
        try:
            text = transcript_text(raw, source=src, strip_annotations=strip_annotations)
        except ParseError as exc:
            notes.append(f"record '{record.id}': unparsable '{src}' track ({exc})")
            continue
        out[src] = feat.extract_features(text, dictionary, mapping)
    return out, notes


def run_suite(
    records: list[CampaignRecord],
    dictionary: CategoryDictionary,
    sources: tuple[str, ...] = (),
    mapping: dict[str, str] | None = None,
    standardize: bool = False,
    strip_annotations: bool = True,
    workers: int = 1,
    tol: float = 1e-8,
    max_iter: int = 50,
) -> SuiteResult:
    """Fit the whole model grid and collect diagnostics.

    Invalid records are dropped listwise with a diagnostic. Models whose
    subsample is empty, single-class, or unfittable are reported as skipped;
    the others still run. Output is deterministic and independent of
    ``workers`` (extraction results are keyed by record order).
    """
    if not records:
        raise ValueError("empty corpus")

    result = SuiteResult(specs={})
    valid: list[CampaignRecord] = []
    for r in records:
        violations = validate_record(r)
        if violations:
            rules = "; ".join(f"{v.field}: {v.rule}" for v in violations)
            result.diagnostics.append(f"record '{r.id}' dropped ({rules})")
        else:
            valid.append(r)

    def job(record):
        return _extract_record_features(record, dictionary, sources, mapping, strip_annotations)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            extracted = list(pool.map(job, valid))
    else:
        extracted = [job(r) for r in valid]
    vectors = []
    for vecs, notes in extracted:
        vectors.append(vecs)
        result.diagnostics.extend(notes)
    controls = [derive_controls(r) for r in valid]

    for model_id in MODEL_IDS:
        try:
            spec = build_model_spec(model_id, sources)
        except ValueError as exc:
            result.skipped[model_id] = str(exc)
            continue
        result.specs[model_id] = spec

        rows = [
            i for i in range(len(valid))
            if spec.text_source in (None, DESCRIPTION) or spec.text_source in vectors[i]
        ]
        result.observations[model_id] = len(rows)
        if not rows:
            result.skipped[model_id] = f"empty subsample ({spec.sample_filter})"
            continue

        names: list[str] = [INTERCEPT]
        if spec.include_controls:
            names += [c for c in CONTROL_NAMES if c != "video" or spec.include_video_dummy]
        if spec.text_source is not None:
            names += list(feat.MODEL_FEATURES)

        y = np.array([valid[i].funded for i in rows], dtype=float)
        data = {INTERCEPT: np.ones(len(rows))}
        for name in names[1:]:
            if name in CONTROL_NAMES:
                data[name] = np.array([getattr(controls[i], name) for i in rows])
            else:
                data[name] = np.array(
                    [getattr(vectors[i][spec.text_source], name) for i in rows], dtype=float
                )

        kept, droppedcols = [INTERCEPT], []
        for name in names[1:]:
            col = data[name]
            if col.max() == col.min():
                droppedcols.append(name)
            else:
                kept.append(name)
        if droppedcols:
            result.dropped[model_id] = droppedcols
            result.diagnostics.append(
                f"model {model_id}: dropped constant columns {', '.join(droppedcols)}"
            )

        X = np.column_stack([data[name] for name in kept])
        if standardize:
            for k, name in enumerate(kept):
                if name == INTERCEPT:
                    continue
                col = X[:, k]
                X[:, k] = (col - col.mean()) / col.std(ddof=1)

        if y.min() == y.max():
            result.skipped[model_id] = "single-class outcome in subsample"
            continue
        if len(rows) <= len(kept):
            result.skipped[model_id] = (
                f"too few observations ({len(rows)}) for {len(kept)} parameters"
            )
            continue

        design = DesignMatrix(columns=kept, X=X, y=y)
        try:
            result.fits[model_id] = fit_logistic(design, max_iter=max_iter, tol=tol)
        except FitError as exc:
            result.skipped[model_id] = str(exc)
            continue
        if len(kept) >= 3:  # intercept + >= 2 predictors
            try:
                result.vifs[model_id] = vif(design)
            except InfiniteVIFError as exc:
                result.diagnostics.append(f"model {model_id}: VIF unavailable ({exc})")

    result.ranking = sorted(
        result.fits, key=lambda mid: (-result.fits[mid].pseudo_r2, mid)
    )

    text_sources = [DESCRIPTION] + [s for s in sources]
    for src in text_sources:
        vecs = [v[src] for v in vectors if src in v]
        if vecs:
            result.stats[src] = feat.summarize(vecs)
    return result


# ---------------------------------------------------------------- rendering

ROW_ORDER = tuple(CONTROL_NAMES) + tuple(feat.MODEL_FEATURES)

FOOTNOTE_LEGEND = "*** p < 0.01, ** p < 0.05, * p < 0.1. Standard errors in parentheses."


def _grid(result: SuiteResult) -> tuple[list[str], list[tuple[str, list[str]]], list[str]]:
    """Column labels, labelled cell rows, and footnotes for the results table."""
    labels = []
    for mid in MODEL_IDS:
        spec = result.specs.get(mid)
        labels.append(spec.label if spec else f"Model {mid}")

    def cell(mid: int, name: str) -> str:
        fit = result.fits.get(mid)
        if fit is None or name not in fit.columns:
            return ""
        i = fit.columns.index(name)
        coef = fit.coefficients[i]
        se = fit.standard_errors[i]
        return f"{coef:.3f}{stars(float(fit.p_values[i]))} ({se:.3f})"

    rows = [(name, [cell(mid, name) for mid in MODEL_IDS]) for name in ROW_ORDER]
    rows.append((
        "Obs.",
        [str(result.observations[mid]) if mid in result.fits else "" for mid in MODEL_IDS],
    ))
    rows.append((
        "Pseudo R2",
        [f"{result.fits[mid].pseudo_r2:.3f}" if mid in result.fits else "" for mid in MODEL_IDS],
    ))

    footnotes = [FOOTNOTE_LEGEND]
    for mid in MODEL_IDS:
        if mid in result.skipped:
            footnotes.append(f"Model {mid} skipped: {result.skipped[mid]}")
    for mid, cols in sorted(result.dropped.items()):
        footnotes.append(f"Model {mid}: constant columns dropped: {', '.join(cols)}")
    return labels, rows, footnotes


def render_table(result: SuiteResult, format: str = "markdown") -> bytes:
    """Results grid with "coef<stars> (se)" cells at 3 decimals.

    Formats: markdown (pipe table), csv (footnotes as trailing '#' lines),
    json (grid plus per-model fit payloads).
    """
    labels, rows, footnotes = _grid(result)
    if format == "markdown":
        header = ["variable"] + [f"{mid}: {lab}" for mid, lab in zip(MODEL_IDS, labels)]
        lines = ["| " + " | ".join(header) + " |",
                 "|" + "|".join([" --- "] * len(header)) + "|"]
        for name, cells in rows:
            lines.append("| " + " | ".join([name] + cells) + " |")
        lines.append("")
        lines.extend(footnotes)
        return ("\n".join(lines) + "\n").encode("utf-8")
    if format == "csv":
        import csv as _csv
        import io
        buf = io.StringIO()
        writer = _csv.writer(buf, lineterminator="\n")
        writer.writerow(["variable"] + [f"{mid}: {lab}" for mid, lab in zip(MODEL_IDS, labels)])
        for name, cells in rows:
            writer.writerow([name] + cells)
        for note in footnotes:
            buf.write(f"# {note}\n")
        return buf.getvalue().encode("utf-8")
    if format == "json":
        payload = {
            "columns": [
                {"id": mid, "label": lab} for mid, lab in zip(MODEL_IDS, labels)
            ],
            "rows": [{"variable": name, "cells": cells} for name, cells in rows],
            "footnotes": footnotes,
            "models": {
                str(mid): result.fits[mid].to_dict() for mid in sorted(result.fits)
            },
            "skipped": {str(mid): msg for mid, msg in sorted(result.skipped.items())},
            "ranking": result.ranking,
        }
        return (json.dumps(payload, indent=2, sort_keys=False) + "\n").encode("utf-8")
    raise ValueError(f"unknown table format '{format}'")
