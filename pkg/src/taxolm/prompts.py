"""Prompt templates mapping a term pair (or term plus mask) to a sentence.

Templates use [X] for the hyponym slot and [Y] for the hypernym slot. The
input term always fills [X], whatever the word order of the template, so
the task is always to find the hypernym.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import DataFormatError
from .terminology import Term

HYPONYM_SLOT = "[X]"
HYPERNYM_SLOT = "[Y]"

_BUILTIN_PATTERNS = (
    # hand-crafted templates encoding the relation in both directions
    ("gen", "[Y] is more general than [X]"),
    ("spec", "[X] is more specific than [Y]"),
    # subclass-of pattern family; "type" is the usual best performer
    ("type", "[X] is a type of [Y]"),
    ("the_type", "[X] is the type of [Y]"),
    ("kind", "[X] is a kind of [Y]"),
    ("form", "[X] is a form of [Y]"),
    ("one_form", "[X] is one form of [Y]"),
    ("is_a", "[X] is a [Y]"),
    ("a_type", "[X] is a type [Y]"),
)


@dataclass(frozen=True)
class PromptTemplate:
    """A named sentence pattern with exactly one [X] and one [Y] slot."""

    name: str
    pattern: str

    def __post_init__(self) -> None:
        for slot in (HYPONYM_SLOT, HYPERNYM_SLOT):
            count = self.pattern.count(slot)
            if count != 1:
                raise DataFormatError(
                    f"template {self.name!r}: pattern must contain exactly one {slot}, "
                    f"got {count}: {self.pattern!r}")

    def with_period(self) -> "PromptTemplate":
        """Copy of this template with a terminal period (builtins have none)."""
        if self.pattern.endswith("."):
            return self
        return PromptTemplate(self.name, self.pattern + ".")


def _surface(term: Term | str) -> str:
    return term.surface if isinstance(term, Term) else str(term)


def _fill(pattern: str, x: str, y: str) -> str:
    # single pass, so slot-like substrings inside the terms are never re-expanded
    out = []
    i = 0
    while i < len(pattern):
        if pattern.startswith(HYPONYM_SLOT, i):
            out.append(x)
            i += len(HYPONYM_SLOT)
        elif pattern.startswith(HYPERNYM_SLOT, i):
            out.append(y)
            i += len(HYPERNYM_SLOT)
        else:
            out.append(pattern[i])
            i += 1
    return "".join(out)


def render(template: PromptTemplate, hyponym: Term | str, hypernym: Term | str) -> str:
    """Fill [X] with the hyponym and [Y] with the hypernym."""
    hypo, hyper = _surface(hyponym), _surface(hypernym)
    if not hypo or not hyper:
        raise ValueError("both terms must be non-empty")
    return _fill(template.pattern, hypo, hyper)


def render_masked(template: PromptTemplate, hyponym: Term | str, mask_token: str) -> str:
    """Fill [X] with the hyponym and [Y] with the backend's mask literal."""
    hypo = _surface(hyponym)
    if not hypo:
        raise ValueError("hyponym must be non-empty")
    if not mask_token:
        raise ValueError("mask_token must be non-empty")
    sentence = _fill(template.pattern, hypo, mask_token)
    occurrences = sentence.count(mask_token)
    if occurrences != 1:
        raise ValueError(
            f"mask literal {mask_token!r} must occur exactly once in the rendered "
            f"sentence, got {occurrences}: {sentence!r}")
    return sentence


def builtin_templates() -> list[PromptTemplate]:
    """The built-in registry: gen, spec, type and the subclass-of variants."""
    return [PromptTemplate(name, pattern) for name, pattern in _BUILTIN_PATTERNS]


def lookup(name: str, extra: tuple[PromptTemplate, ...] | list[PromptTemplate] = ()) -> PromptTemplate:
    """Resolve a template by name, searching `extra` before the builtins."""
    for template in list(extra) + builtin_templates():
        if template.name == name:
            return template
    known = ", ".join(sorted({t.name for t in list(extra) + builtin_templates()}))
    raise KeyError(f"unknown template {name!r}; known: {known}")


def load_templates(path: str | Path) -> list[PromptTemplate]:
    """Load custom templates from a  name<TAB>pattern  file."""
    path = Path(path)
    out = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise DataFormatError(f"{path}: row {lineno}: expected name<TAB>pattern")
        out.append(PromptTemplate(cols[0].strip(), cols[1]))
    return out
