"""Approximate dictionary matching over character n-gram feature sets.

Terms are normalized (Unicode lowercase, whitespace collapsed), padded
with n-1 boundary markers on each side, and decomposed into the set of
their character n-grams. The index buckets entries by feature-set size
and keeps an inverted map feature -> entry ids per bucket, so a query
only touches the size range in which the threshold is attainable and,
within it, only entries sharing enough features. Results are exactly
those of a full scan: the pruning is an optimization, never a heuristic.

Similarity over feature sets X (query) and Y (entry):

    COSINE  |X & Y| / sqrt(|X| * |Y|)
    JACCARD |X & Y| / |X | Y|
    DICE    2 |X & Y| / (|X| + |Y|)
    OVERLAP |X & Y| / min(|X|, |Y|)
"""

from __future__ import annotations

import hashlib
import math
import pickle
from dataclasses import dataclass
from pathlib import Path

from .docmodel import Document, Entity, Span, span_char_range, span_text, spans_overlap
from .errors import CacheError, RuleLoadError

MEASURES = ("COSINE", "JACCARD", "DICE", "OVERLAP")

PAD = "\x00"

CACHE_VERSION = 1
_CACHE_MAGIC = b"notemill-ngram-index\n"

# Tokens that may not begin or end a candidate span.
STOPWORDS = frozenset(
    """a an the and or of in on at to for with without by from as is are was
    were be been being has have had this that these those it its but if then
    than so no not nor do does did per vs his her their"""
    .split()
)


@dataclass(frozen=True)
class DictEntry:
    term: str
    cui: str
    semtypes: tuple[str, ...] = ()


@dataclass(frozen=True)
class NormalizerParams:
    threshold: float = 0.7
    measure: str = "JACCARD"
    window: int = 6
    best_match_only: bool = True

    def __post_init__(self):
        if not (0.0 < self.threshold <= 1.0):
            raise ValueError("threshold must be in (0, 1]")
        if self.measure not in MEASURES:
            raise ValueError(f"unknown measure {self.measure!r}")
        if self.window < 1:
            raise ValueError("window must be >= 1")


def normalize_term(text: str) -> str:
    """Unicode lowercase plus whitespace collapse; the only folding applied."""
    return " ".join(text.lower().split())


def ngram_features(text: str, n: int) -> frozenset[str]:
    """Distinct character n-grams of ``text`` padded with n-1 markers per side."""
    padded = PAD * (n - 1) + text + PAD * (n - 1)
    return frozenset(padded[i : i + n] for i in range(len(padded) - n + 1))


class NgramIndex:
    """Inverted n-gram index partitioned by feature-set size."""

    def __init__(self, entries: list[DictEntry], n: int):
        self.n = n
        self.entries = list(entries)
        self.features: list[frozenset[str]] = []
        self.buckets: dict[int, dict[str, list[int]]] = {}
        for idx, entry in enumerate(self.entries):
            feats = ngram_features(normalize_term(entry.term), n)
            self.features.append(feats)
            bucket = self.buckets.setdefault(len(feats), {})
            for feat in feats:
                bucket.setdefault(feat, []).append(idx)

    def size_range(self) -> tuple[int, int]:
        sizes = self.buckets.keys()
        return (min(sizes), max(sizes))


def build_index(entries: list[DictEntry], n: int = 3) -> NgramIndex:
    """Index a dictionary; every entry is kept, duplicates included."""
    if n < 2:
        raise ValueError("n-gram length must be >= 2")
    if not entries:
        raise RuleLoadError("cannot build an index from an empty dictionary")
    for i, entry in enumerate(entries):
        if not entry.term:
            raise RuleLoadError(f"dictionary entry {i} has an empty term")
        if not entry.cui:
            raise RuleLoadError(f"dictionary entry {i} ({entry.term!r}) has an empty cui")
    return NgramIndex(entries, n)


def load_dictionary(path: str | Path) -> list[DictEntry]:
    """Read a TSV dictionary: term, cui, pipe-separated semantic types."""
    entries = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise RuleLoadError(f"cannot read dictionary from {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise RuleLoadError(
                f"{path}:{lineno}: expected 3 tab-separated columns, got {len(fields)}"
            )
        term, cui, semtypes = fields
        entries.append(
            DictEntry(
                term=term.strip(),
                cui=cui.strip(),
                semtypes=tuple(s for s in semtypes.strip().split("|") if s),
            )
        )
    return entries


def _similarity(measure: str, c: int, x: int, y: int) -> float:
    if measure == "COSINE":
        return c / math.sqrt(x * y)
    if measure == "JACCARD":
        return c / (x + y - c)
    if measure == "DICE":
        return 2 * c / (x + y)
    return c / min(x, y)  # OVERLAP


_EPS = 1e-9


def _size_bounds(measure: str, x: int, threshold: float) -> tuple[int, int | None]:
    """Entry feature-set sizes that could possibly reach the threshold.

    Bounds are relaxed by a small epsilon so float rounding can only widen
    the candidate range; the exact similarity check does the final cut.
    """
    t = threshold
    if measure == "COSINE":
        return (
            max(1, math.ceil(t * t * x - _EPS)),
            math.floor(x / (t * t) + _EPS),
        )
    if measure == "JACCARD":
        return (max(1, math.ceil(t * x - _EPS)), math.floor(x / t + _EPS))
    if measure == "DICE":
        return (
            max(1, math.ceil(t * x / (2 - t) - _EPS)),
            math.floor(x * (2 - t) / t + _EPS),
        )
    return (1, None)  # OVERLAP: any size can fully overlap


def _min_overlap(measure: str, x: int, y: int, threshold: float) -> int:
    t = threshold
    if measure == "COSINE":
        need = t * math.sqrt(x * y)
    elif measure == "JACCARD":
        need = t * (x + y) / (1 + t)
    elif measure == "DICE":
        need = t * (x + y) / 2
    else:
        need = t * min(x, y)
    return max(1, math.ceil(need - _EPS))


def search(
    index: NgramIndex,
    query: str,
    measure: str = "JACCARD",
    threshold: float = 0.7,
) -> list[tuple[DictEntry, float]]:
    """Entries whose similarity with the query reaches the threshold.

    Equals a naive scan over the whole dictionary, ordered by descending
    similarity then insertion order.
    """
    if measure not in MEASURES:
        raise ValueError(f"unknown measure {measure!r}")
    if not (0.0 < threshold <= 1.0):
        raise ValueError("threshold must be in (0, 1]")
    feats = ngram_features(normalize_term(query), index.n)
    x = len(feats)
    lo, hi = _size_bounds(measure, x, threshold)
    results: list[tuple[float, int]] = []
    for y, inverted in index.buckets.items():
        if y < lo or (hi is not None and y > hi):
            continue
        counts: dict[int, int] = {}
        for feat in feats:
            for idx in inverted.get(feat, ()):
                counts[idx] = counts.get(idx, 0) + 1
        c_min = _min_overlap(measure, x, y, threshold)
        for idx, c in counts.items():
            if c < c_min:
                continue
            sim = _similarity(measure, c, x, y)
            if sim >= threshold:
                results.append((sim, idx))
    results.sort(key=lambda r: (-r[0], r[1]))
    return [(index.entries[idx], sim) for sim, idx in results]


def _is_boundary_token(doc: Document, index: int) -> bool:
    text = doc.token_text(index)
    lower = text.lower()
    if lower in STOPWORDS:
        return True
    return not any(ch.isalnum() for ch in text)


def map_concepts(
    doc: Document, index: NgramIndex, params: NormalizerParams | None = None
) -> Document:
    """Attach concept identifiers to the document's entities.

    Candidate spans are token windows of up to ``params.window`` tokens
    that stay inside one sentence and neither start nor end on a stopword
    or punctuation token. Overlapping hits keep the highest similarity,
    then the longer span, then the earlier start. A hit over the exact
    span of an existing entity annotates that entity in place; any other
    hit becomes a new entity labeled with the entry's first semantic type.
    """
    if params is None:
        params = NormalizerParams()
    candidates = []
    for sentence in doc.sentences:
        for start in range(sentence.start_token, sentence.end_token):
            if _is_boundary_token(doc, start):
                continue
            max_end = min(start + params.window, sentence.end_token)
            for end in range(start + 1, max_end + 1):
                if _is_boundary_token(doc, end - 1):
                    continue
                span = Span(start, end)
                hits = search(
                    index,
                    span_text(doc, span),
                    measure=params.measure,
                    threshold=params.threshold,
                )
                if hits:
                    candidates.append((span, hits))

    def sort_key(cand):
        span, hits = cand
        start_char, end_char = span_char_range(doc, span)
        return (-hits[0][1], -(end_char - start_char), start_char)

    candidates.sort(key=sort_key)
    kept: list[tuple[Span, list[tuple[DictEntry, float]]]] = []
    for span, hits in candidates:
        if any(spans_overlap(span, k) for k, _ in kept):
            continue
        kept.append((span, hits))

    by_span = {
        (e.span.start_token, e.span.end_token): e for e in doc.entities
    }
    new_entities = []
    for span, hits in kept:
        entry, sim = hits[0]
        alts = [] if params.best_match_only else hits[1:]
        target = by_span.get((span.start_token, span.end_token))
        if target is None:
            category = entry.semtypes[0] if entry.semtypes else "concept"
            target = Entity(span=Span(span.start_token, span.end_token, label=category),
                            category=category)
            new_entities.append(target)
        target.cui = entry.cui
        target.similarity = sim
        if alts:
            target.span.attrs["alt_cuis"] = "|".join(e.cui for e, _ in alts)
    doc.entities.extend(new_entities)
    doc.entities.sort(key=lambda e: (e.span.start_token, e.span.end_token))
    return doc


def dictionary_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def save_index(index: NgramIndex, path: str | Path, dict_digest: str) -> None:
    """Persist the index to a versioned binary cache file."""
    payload = {
        "version": CACHE_VERSION,
        "dict_sha256": dict_digest,
        "n": index.n,
        "entries": index.entries,
    }
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        pickle.dump(payload, fh, protocol=pickle.HIGHEST_PROTOCOL)


def load_index(path: str | Path, dict_path: str | Path | None = None) -> NgramIndex:
    """Load a cached index, rejecting stale or incompatible files.

    When ``dict_path`` is given, the cache is additionally validated
    against the current dictionary file hash.
    """
    try:
        with open(path, "rb") as fh:
            magic = fh.read(len(_CACHE_MAGIC))
            if magic != _CACHE_MAGIC:
                raise CacheError(f"{path} is not an index cache file")
            payload = pickle.load(fh)
    except OSError as exc:
        raise CacheError(f"cannot read index cache {path}: {exc}") from exc
    except (pickle.UnpicklingError, EOFError) as exc:
        raise CacheError(f"corrupt index cache {path}: {exc}") from exc
    if payload.get("version") != CACHE_VERSION:
        raise CacheError(
            f"index cache {path} has version {payload.get('version')}, "
            f"expected {CACHE_VERSION}"
        )
    if dict_path is not None:
        current = dictionary_digest(dict_path)
        if current != payload.get("dict_sha256"):
            raise CacheError(
                f"index cache {path} was built from a different dictionary "
                "(hash mismatch); rebuild with build-index"
            )
    return NgramIndex(payload["entries"], payload["n"])
