"""Tokenizer and stem-wildcard category dictionary engine.

Counts tokens against named word categories and reports usage as
percentages of total words, in the style of LIWC-type content analysis
dictionaries. The engine is dictionary-agnostic: category content is
loaded from a ``.dic``-format file (see ``load_dictionary``).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import DictionaryError

WORD = "word"
NUMBER = "number"

#: Reserved entry pattern matching every number token.
NUMBER_PATTERN = "<number>"
#: Reserved category name whose matches count toward the numbers percentage.
NUMBER_CATEGORY = "number"

# Words are maximal letter runs with internal apostrophes; numbers are
# maximal digit runs with internal comma/period separators. Everything
# else separates tokens (hyphens split: "sub-title" -> two words).
_TOKEN_RE = re.compile(
    r"(?P<number>\d+(?:[.,]\d+)*)|(?P<word>[^\W\d_]+(?:['’][^\W\d_]+)*)",
    re.UNICODE,
)


@dataclass(frozen=True)
class Token:
    surface: str  # lowercase
    kind: str     # WORD or NUMBER


@dataclass
class CategoryDictionary:
    """Category declarations plus exact and stem-wildcard entries.

    ``exact`` maps a full pattern to its category-id set; ``stems`` maps a
    wildcard prefix (the pattern minus its trailing ``*``) likewise. A
    token is matched exact-first, then by its longest matching stem.
    """

    categories: dict[str, str]                      # id -> name
    exact: dict[str, frozenset[str]] = field(default_factory=dict)
    stems: dict[str, frozenset[str]] = field(default_factory=dict)
    number_ids: frozenset[str] = frozenset()        # ids of the <number> entry

    def name_to_id(self) -> dict[str, str]:
        return {name: cid for cid, name in self.categories.items()}

    @property
    def entry_count(self) -> int:
        return len(self.exact) + len(self.stems) + (1 if self.number_ids else 0)


@dataclass
class CategoryProfile:
    """Per-text percentages over the combined word+number token count."""

    word_count: int
    categories: dict[str, float]  # category name -> percent of tokens
    dictionary_pct: float
    sixltr_pct: float
    numbers_pct: float


def tokenize(text: str) -> list[Token]:
    """Split text into lowercase word and number tokens.

    Words keep internal apostrophes (curly quotes normalized to ``'``);
    numbers keep internal ``,``/``.`` separators ("3,000" is one token).
    """
    tokens = []
    for m in _TOKEN_RE.finditer(text.lower()):
        if m.lastgroup == "number":
            tokens.append(Token(m.group(), NUMBER))
        else:
            tokens.append(Token(m.group().replace("’", "'"), WORD))
    return tokens


def load_dictionary(data: bytes | str) -> CategoryDictionary:
    """Parse a ``.dic``-format dictionary.

    Format: a ``%`` line, category declarations ``id<TAB>name``, a second
    ``%`` line, then entries ``pattern<TAB>id[<TAB>id...]``. Lines starting
    with ``#`` are comments. ``*`` is only valid as the final character of
    a pattern. Duplicate patterns merge their category sets.
    """
    if isinstance(data, bytes):
        text = data.decode("utf-8-sig")
    else:
        text = data.lstrip("﻿")

    categories: dict[str, str] = {}
    names_seen: set[str] = set()
    exact: dict[str, set[str]] = {}
    stems: dict[str, set[str]] = {}
    number_ids: set[str] = set()
    section = 0  # 0 = before first %, 1 = categories, 2 = entries

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r").strip()
        if not line or line.startswith("#"):
            continue
        if line == "%":
            section += 1
            if section > 2:
                raise DictionaryError(f"line {lineno}: unexpected extra '%' separator")
            continue
        if section == 0:
            raise DictionaryError(f"line {lineno}: content before the first '%' line")
        parts = [p.strip() for p in line.split("\t") if p.strip()]
        if section == 1:
            if len(parts) != 2:
                raise DictionaryError(f"line {lineno}: expected 'id<TAB>name'")
            cid, name = parts
            if cid in categories:
                raise DictionaryError(f"line {lineno}: duplicate category id '{cid}'")
            if name in names_seen:
                raise DictionaryError(f"line {lineno}: duplicate category name '{name}'")
            categories[cid] = name
            names_seen.add(name)
        else:
            if len(parts) < 2:
                raise DictionaryError(f"line {lineno}: expected 'pattern<TAB>id[<TAB>id...]'")
            pattern, ids = parts[0].lower(), parts[1:]
            for cid in ids:
                if cid not in categories:
                    raise DictionaryError(f"line {lineno}: entry references unknown category id '{cid}'")
            star = pattern.find("*")
            if star != -1 and star != len(pattern) - 1:
                raise DictionaryError(f"line {lineno}: '*' is only allowed as the final character")
            if pattern == "*":
                raise DictionaryError(f"line {lineno}: bare '*' pattern is not allowed")
            if pattern == NUMBER_PATTERN:
                number_ids.update(ids)
            elif pattern.endswith("*"):
                stems.setdefault(pattern[:-1], set()).update(ids)
            else:
                exact.setdefault(pattern, set()).update(ids)

    if section < 2:
        raise DictionaryError("missing '%' section separators")
    return CategoryDictionary(
        categories=categories,
        exact={p: frozenset(ids) for p, ids in exact.items()},
        stems={p: frozenset(ids) for p, ids in stems.items()},
        number_ids=frozenset(number_ids),
    )


def match_token(dictionary: CategoryDictionary, token: Token) -> frozenset[str]:
    """Category ids matching a token.

    Exact entries win outright; otherwise the longest matching stem
    applies. Number tokens match only digit-spelled exact entries and the
    reserved ``<number>`` pattern.
    """
    if token.kind == NUMBER:
        ids = dictionary.exact.get(token.surface, frozenset())
        if dictionary.number_ids:
            ids = ids | dictionary.number_ids
        return ids
    hit = dictionary.exact.get(token.surface)
    if hit is not None:
        return hit
    surface = token.surface
    for k in range(len(surface), 0, -1):  # longest stem wins
        hit = dictionary.stems.get(surface[:k])
        if hit is not None:
            return hit
    return frozenset()


def _letter_count(surface: str) -> int:
    return sum(1 for ch in surface if ch.isalpha())


def category_percentages(dictionary: CategoryDictionary, tokens: list[Token]) -> CategoryProfile:
    """Profile a token list against the dictionary.

    All percentages share one denominator: the combined count of word and
    number tokens. An empty token list yields the zero profile.
    """
    names = list(dictionary.categories.values())
    word_count = len(tokens)
    if word_count == 0:
        return CategoryProfile(0, {n: 0.0 for n in names}, 0.0, 0.0, 0.0)

    number_cat_id = None
    for cid, name in dictionary.categories.items():
        if name == NUMBER_CATEGORY:
            number_cat_id = cid
            break

    counts = {cid: 0 for cid in dictionary.categories}
    dict_hits = 0
    sixltr = 0
    number_hits = 0
    for tok in tokens:
        ids = match_token(dictionary, tok)
        if ids:
            dict_hits += 1
        for cid in ids:
            counts[cid] += 1
        if tok.kind == NUMBER:
            number_hits += 1
        elif number_cat_id is not None and number_cat_id in ids:
            number_hits += 1
        if tok.kind == WORD and _letter_count(tok.surface) >= 7:
            sixltr += 1

    pct = {dictionary.categories[cid]: 100.0 * c / word_count for cid, c in counts.items()}
    return CategoryProfile(
        word_count=word_count,
        categories=pct,
        dictionary_pct=100.0 * dict_hits / word_count,
        sixltr_pct=100.0 * sixltr / word_count,
        numbers_pct=100.0 * number_hits / word_count,
    )
