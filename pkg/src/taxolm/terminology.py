"""Terms, terminologies and taxonomies, plus their file formats.

A terminology is the flat list of domain terms to organize; a taxonomy is a
set of directed (hyponym, hypernym) edges over such terms. Terms are
canonicalized on construction, so "Physics", " physics" and "physics"
compare equal, and TExEval-style underscores compare equal to spaces.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import DataFormatError

logger = logging.getLogger(__name__)

TERMINOLOGY_FORMATS = ("plain", "tsv-id-term")


def canonicalize(text: str) -> str:
    """Lowercase, map underscores to spaces, collapse whitespace, strip ends."""
    return " ".join(text.lower().replace("_", " ").split())


@dataclass(frozen=True, order=True)
class Term:
    """A single domain term, stored in canonical form."""

    surface: str

    def __post_init__(self) -> None:
        canon = canonicalize(self.surface)
        if not canon:
            raise ValueError(f"term is empty after canonicalization: {self.surface!r}")
        object.__setattr__(self, "surface", canon)

    def __str__(self) -> str:
        return self.surface


def as_term(value: "Term | str") -> Term:
    return value if isinstance(value, Term) else Term(value)


class Terminology:
    """An ordered, duplicate-free collection of terms.

    Iteration follows insertion order, so runs over a terminology are
    deterministic for a given input file.
    """

    def __init__(self, terms: Iterable[Term | str] = ()) -> None:
        self._terms: dict[Term, None] = {}
        for term in terms:
            self._terms.setdefault(as_term(term), None)

    @property
    def terms(self) -> tuple[Term, ...]:
        return tuple(self._terms)

    def __iter__(self) -> Iterator[Term]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __contains__(self, term: object) -> bool:
        if isinstance(term, str):
            try:
                term = Term(term)
            except ValueError:
                return False
        return term in self._terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Terminology):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self) -> str:
        return f"Terminology({len(self)} terms)"


@dataclass(frozen=True, order=True)
class TaxonomyEdge:
    """A directed is-a edge: hyponym -> hypernym."""

    hyponym: Term
    hypernym: Term

    def __post_init__(self) -> None:
        object.__setattr__(self, "hyponym", as_term(self.hyponym))
        object.__setattr__(self, "hypernym", as_term(self.hypernym))
        if self.hyponym == self.hypernym:
            raise ValueError(f"self-loop edge: {self.hyponym.surface!r}")


class Taxonomy:
    """An edge set with derived vertices; equality is edge-set equality."""

    def __init__(self, edges: Iterable[TaxonomyEdge | tuple] = ()) -> None:
        seen: dict[TaxonomyEdge, None] = {}
        n_in = 0
        for edge in edges:
            n_in += 1
            if not isinstance(edge, TaxonomyEdge):
                edge = TaxonomyEdge(*edge)
            seen.setdefault(edge, None)
        if n_in != len(seen):
            logger.info("collapsed %d duplicate edge(s)", n_in - len(seen))
        self._edges = frozenset(seen)

    @property
    def edges(self) -> frozenset[TaxonomyEdge]:
        return self._edges

    @property
    def vertices(self) -> frozenset[Term]:
        return frozenset(v for e in self._edges for v in (e.hyponym, e.hypernym))

    def sorted_edges(self) -> list[TaxonomyEdge]:
        return sorted(self._edges)

    def __len__(self) -> int:
        return len(self._edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Taxonomy):
            return NotImplemented
        return self._edges == other._edges

    def __hash__(self) -> int:
        return hash(self._edges)

    def __repr__(self) -> str:
        return f"Taxonomy({len(self.vertices)} vertices, {len(self._edges)} edges)"


def load_terminology(path: str | Path, format: str = "plain") -> Terminology:
    """Read a terminology file.

    "plain" takes one term per non-blank line; "tsv-id-term" takes the
    second column of a tab-separated file. Duplicates after canonicalization
    are collapsed (the count is logged); an empty result is an error.
    """
    if format not in TERMINOLOGY_FORMATS:
        raise ValueError(f"unknown terminology format {format!r}; expected one of {TERMINOLOGY_FORMATS}")
    path = Path(path)
    raw: list[Term] = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        if format == "plain":
            cell = line
        else:
            cols = line.split("\t")
            if len(cols) < 2:
                raise DataFormatError(f"{path}: row {lineno}: expected id<TAB>term, got {len(cols)} column(s)")
            cell = cols[1]
        try:
            raw.append(Term(cell))
        except ValueError as exc:
            raise DataFormatError(f"{path}: row {lineno}: {exc}") from exc
    terminology = Terminology(raw)
    if not len(terminology):
        raise DataFormatError(f"{path}: no terms found")
    collapsed = len(raw) - len(terminology)
    if collapsed:
        logger.info("%s: collapsed %d duplicate term(s)", path, collapsed)
    return terminology


def load_taxonomy(path: str | Path) -> Taxonomy:
    """Read a taxonomy TSV.

    Rows are either  hyponym<TAB>hypernym  or  id<TAB>hyponym<TAB>hypernym
    (TExEval style, detected per row). Rows whose hypernym cell is empty
    declare a root term and contribute no edge. Self-loop rows are an error,
    reported with their row numbers.
    """
    path = Path(path)
    edges: list[TaxonomyEdge] = []
    self_loops: list[int] = []
    n_roots = 0
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) == 2:
            hypo_raw, hyper_raw = cols
        elif len(cols) == 3:
            _, hypo_raw, hyper_raw = cols
        else:
            raise DataFormatError(
                f"{path}: row {lineno}: expected 2 or 3 tab-separated columns, got {len(cols)}")
        if not canonicalize(hyper_raw):
            n_roots += 1
            continue
        if not canonicalize(hypo_raw):
            raise DataFormatError(f"{path}: row {lineno}: empty hyponym")
        hyponym, hypernym = Term(hypo_raw), Term(hyper_raw)
        if hyponym == hypernym:
            self_loops.append(lineno)
            continue
        edges.append(TaxonomyEdge(hyponym, hypernym))
    if self_loops:
        raise DataFormatError(
            f"{path}: self-loop edge(s) at row(s) {', '.join(map(str, self_loops))}")
    taxonomy = Taxonomy(edges)
    if len(taxonomy) < len(edges):
        logger.info("%s: collapsed %d duplicate edge(s)", path, len(edges) - len(taxonomy))
    if n_roots:
        logger.info("%s: %d root row(s) without a hypernym", path, n_roots)
    return taxonomy


def write_taxonomy(taxonomy: Taxonomy, path: str | Path) -> None:
    """Write one  hyponym<TAB>hypernym  line per edge, sorted, LF-terminated."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for edge in taxonomy.sorted_edges():
            fh.write(f"{edge.hyponym.surface}\t{edge.hypernym.surface}\n")
