"""Map category profiles to the named linguistic variables and summarize them."""
from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, fields

from .errors import ConfigError
from .lexicon import CategoryDictionary, category_percentages, tokenize

#: Category roles the extractor needs; a mapping wires each role to a
#: category name in whatever dictionary is loaded.
REQUIRED_ROLES = (
    "posemo", "negemo", "sadness", "adjectives", "adverbs",
    "perceptual", "informal", "certainty", "discrepancy", "present_focus",
)

DEFAULT_CATEGORY_MAPPING = {role: role for role in REQUIRED_ROLES}

#: Exported variable names, in output order.
FEATURE_NAMES = (
    "word_count", "sixltr", "dictionary", "numbers", "tone", "sadness",
    "adjectives", "adverbs", "perceptual", "informal", "certainty",
    "discrepancy", "present_focus",
)

#: The twelve variables used as predictors by the standard model suite
#: (present_focus is computed but kept out of the standard models).
MODEL_FEATURES = FEATURE_NAMES[:-1]


@dataclass
class LinguisticFeatureVector:
    word_count: int
    sixltr: float
    dictionary: float
    numbers: float
    tone: float
    sadness: float
    adjectives: float
    adverbs: float
    perceptual: float
    informal: float
    certainty: float
    discrepancy: float
    present_focus: float

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class VariableStats:
    obs: int
    mean: float
    sd: float
    min: float
    max: float


@dataclass
class DescriptiveStats:
    """Per-variable observations/mean/sd/min/max over a feature corpus."""

    variables: dict[str, VariableStats]


def tone_index(posemo_pct: float, negemo_pct: float) -> float:
    """Bounded 0-100 contrast of positive vs negative emotion usage.

    Returns 50 for neutral text (both percentages zero), 100 for purely
    positive, 0 for purely negative. This is a documented stand-in for
    the proprietary standardized tone composite: it preserves ordering
    (higher = more positive) and the 0-100 scale, not published values.
    """
    total = posemo_pct + negemo_pct
    if total == 0:
        return 50.0
    return 50.0 + 50.0 * (posemo_pct - negemo_pct) / total


def extract_features(
    text: str,
    dictionary: CategoryDictionary,
    mapping: dict[str, str] | None = None,
) -> LinguisticFeatureVector:
    """Tokenize, profile, and name the percentages per the variable table.

    ``mapping`` routes each required category role to a category name in
    ``dictionary`` (defaults to identical names, matching the bundled
    demo lexicon).
    """
    if mapping is None:
        mapping = DEFAULT_CATEGORY_MAPPING
    declared = set(dictionary.categories.values())
    for role in REQUIRED_ROLES:
        name = mapping.get(role)
        if not name:
            raise ConfigError(f"category mapping does not cover role '{role}'")
        if name not in declared:
            raise ConfigError(
                f"dictionary declares no category named '{name}' (mapped from role '{role}')"
            )

    tokens = tokenize(text)
    profile = category_percentages(dictionary, tokens)
    if profile.word_count == 0:
        return LinguisticFeatureVector(0, *([0.0] * 3), 50.0, *([0.0] * 8))

    def pct(role: str) -> float:
        return profile.categories[mapping[role]]

    return LinguisticFeatureVector(
        word_count=profile.word_count,
        sixltr=profile.sixltr_pct,
        dictionary=profile.dictionary_pct,
        numbers=profile.numbers_pct,
        tone=tone_index(pct("posemo"), pct("negemo")),
        sadness=pct("sadness"),
        adjectives=pct("adjectives"),
        adverbs=pct("adverbs"),
        perceptual=pct("perceptual"),
        informal=pct("informal"),
        certainty=pct("certainty"),
        discrepancy=pct("discrepancy"),
        present_focus=pct("present_focus"),
    )


def summarize(vectors: list[LinguisticFeatureVector]) -> DescriptiveStats:
    """Obs/mean/sd/min/max per variable with sample (n-1) standard deviation."""
    if not vectors:
        raise ValueError("cannot summarize an empty list of feature vectors")
    out = {}
    for name in FEATURE_NAMES:
        values = [float(getattr(v, name)) for v in vectors]
        n = len(values)
        sd = statistics.stdev(values) if n > 1 else 0.0
        out[name] = VariableStats(
            obs=n,
            mean=math.fsum(values) / n,
            sd=sd,
            min=min(values),
            max=max(values),
        )
    return DescriptiveStats(variables=out)
