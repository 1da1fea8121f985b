"""Periodic sequences over an abelian group: word problem and bounded membership."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple, Union

from .abelian import AbelianElement, AbelianGroupSpec


@dataclass(frozen=True)
class PeriodicWord:
    """f_u(n*q + r) = u[r] for the tuple u of length q."""

    values: Tuple[AbelianElement, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("a periodic word needs period at least 1")
        object.__setattr__(self, "values", tuple(self.values))

    @property
    def period(self) -> int:
        return len(self.values)

    def __getitem__(self, pos: int) -> AbelianElement:
        return self.values[pos % len(self.values)]


class PeriodicProduct:
    """Pointwise sum of periodic words over one lamp group."""

    def __init__(self, spec: Union[AbelianGroupSpec, str], words: Iterable[PeriodicWord] = ()):
        self.spec = AbelianGroupSpec.parse(spec) if isinstance(spec, str) else spec
        self.words: List[PeriodicWord] = list(words)

    def __repr__(self) -> str:
        return f"PeriodicProduct({self.spec}, {len(self.words)} words)"

    @classmethod
    def from_ints(cls, spec, rows: Sequence[Sequence]) -> "PeriodicProduct":
        """Build from rows of entries, each an int (rank-1 or cyclic groups) or a word string."""
        G = AbelianGroupSpec.parse(spec) if isinstance(spec, str) else spec
        words = []
        for row in rows:
            vals = []
            for v in row:
                if isinstance(v, str):
                    vals.append(G.evaluate_word(v))
                else:
                    vals.append(G.from_vector([int(v)]))
            words.append(PeriodicWord(tuple(vals)))
        return cls(G, words)

    def total_period(self) -> int:
        return sum(w.period for w in self.words)

    def lcm(self) -> int:
        return math.lcm(*(w.period for w in self.words)) if self.words else 1


def value_at(p: PeriodicProduct, pos: int) -> AbelianElement:
    G = p.spec
    acc = G.identity()
    for w in p.words:
        acc = G.add(acc, w[pos])
    return acc


def first_nonzero(p: PeriodicProduct, limit: int):
    for pos in range(limit):
        if not p.spec.is_identity(value_at(p, pos)):
            return pos
    return None


def membership(p: PeriodicProduct, m: int) -> bool:
    """f vanishes on [0, m).

    Only positions below min(m, sum of periods) are inspected: a window of
    that many zeros forces every later value to vanish too.
    """
    if m < 0:
        raise ValueError("cutoff must be non-negative")
    return first_nonzero(p, min(m, p.total_period())) is None


def word_problem(p: PeriodicProduct) -> bool:
    return first_nonzero(p, p.total_period()) is None


def naive_membership(p: PeriodicProduct, m: int) -> bool:
    return first_nonzero(p, m) is None


# -- text syntax: "[(g1),(g1-)]" or "[(g1, g1-), ()]"; entries are words


_TUPLE = re.compile(r"\(([^()]*)\)")


def parse_periodic(spec: Union[AbelianGroupSpec, str], text: str) -> PeriodicProduct:
    G = AbelianGroupSpec.parse(spec) if isinstance(spec, str) else spec
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ValueError(f"expected a bracketed list of tuples, got {text!r}")
    body = body[1:-1].strip()
    words = []
    pos = 0
    while pos < len(body):
        m = _TUPLE.match(body, pos)
        if not m:
            raise ValueError(f"malformed tuple at offset {pos + 1} in {text!r}")
        entries = [s.strip() for s in m.group(1).split(",")]
        if entries == [""]:
            raise ValueError("a periodic word needs period at least 1")
        words.append(PeriodicWord(tuple(G.evaluate_word(s) if s not in ("", "1", "e") else G.identity() for s in entries)))
        pos = m.end()
        rest = body[pos:].lstrip()
        if rest.startswith(","):
            rest = rest[1:].lstrip()
        elif rest:
            raise ValueError(f"expected ',' between tuples in {text!r}")
        pos = len(body) - len(rest)
    return PeriodicProduct(G, words)


def parse_cutoff(text: str) -> int:
    text = text.strip().lower()
    try:
        return int(text, 16) if text.startswith("0x") else int(text, 10)
    except ValueError:
        raise ValueError(f"cutoff must be decimal or 0x hex, got {text!r}") from None
