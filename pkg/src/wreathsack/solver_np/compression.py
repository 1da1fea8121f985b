"""Cycle-compressed words and compressed membership for automata."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Hashable, Iterable, List, Sequence, Tuple

from .automata import NFA, remove_epsilon


@dataclass(frozen=True)
class CycleCompression:
    """Factors (beta, l): the i-th factor is the length-l prefix of beta repeated forever."""

    factors: Tuple[Tuple[Tuple[Hashable, ...], int], ...]

    def __post_init__(self):
        fs = tuple((tuple(b), int(n)) for b, n in self.factors)
        for b, n in fs:
            if n < 0:
                raise ValueError("factor lengths are natural numbers")
            if n > 0 and not b:
                raise ValueError("a non-empty factor needs a non-empty cycle word")
        object.__setattr__(self, "factors", fs)

    @classmethod
    def of_word(cls, word: Sequence) -> "CycleCompression":
        return cls(((tuple(word), len(word)),))

    def __len__(self) -> int:
        return sum(n for _, n in self.factors)

    @property
    def length(self) -> int:
        return len(self)

    def decompress(self, limit: int = 1 << 20) -> List:
        if len(self) > limit:
            raise ValueError(f"decompressed length {len(self)} exceeds {limit}")
        out: List = []
        for b, n in self.factors:
            out += [b[i % len(b)] for i in range(n)]
        return out

    def letter_at(self, p: int):
        if not 0 <= p < len(self):
            raise IndexError(f"position {p} outside [0, {len(self)})")
        for b, n in self.factors:
            if p < n:
                return b[p % len(b)]
            p -= n
        raise AssertionError("unreachable")

    def positions_of(self, pred, cap: int = 1 << 16) -> List[int]:
        """Positions whose letter satisfies pred; raises once more than cap are found."""
        out: List[int] = []
        start = 0
        for b, n in self.factors:
            for j, x in enumerate(b[: min(len(b), n)]):
                if pred(x):
                    count = (n - 1 - j) // len(b) + 1
                    if len(out) + count > cap:
                        raise ValueError("too many matching positions")
                    out += [start + j + k * len(b) for k in range(count)]
            start += n
        return sorted(out)

    def split(self, p: int) -> "CycleCompression":
        """Same word with a factor boundary at position p."""
        if not 0 <= p <= len(self):
            raise IndexError(f"split position {p} outside [0, {len(self)}]")
        out = []
        rest = p
        done = False
        for b, n in self.factors:
            if not done and rest <= n:
                if rest == 0:
                    out.append(((), 0))
                    out.append((b, n))
                elif rest == n:
                    out.append((b, n))
                    out.append(((), 0))
                else:
                    k = rest % len(b)
                    out.append((b, rest))
                    out.append((b[k:] + b[:k], n - rest))
                done = True
            else:
                if not done:
                    rest -= n
                out.append((b, n))
        if not done:
            out.append(((), 0))
        return CycleCompression(tuple(out))

    def remove_positions(self, positions: Iterable[int]) -> "CycleCompression":
        cc = self
        for p in sorted(set(positions), reverse=True):
            if not 0 <= p < len(cc):
                raise IndexError(f"position {p} outside [0, {len(cc)})")
            out, start, removed = [], 0, False
            for b, n in cc.split(p).split(p + 1).factors:
                if not removed and start == p and n == 1:
                    removed = True
                else:
                    out.append((b, n))
                start += n
            cc = CycleCompression(tuple(out)).compact()
        return cc

    def compact(self) -> "CycleCompression":
        return CycleCompression(tuple((b, n) for b, n in self.factors if n > 0))

    def boundaries(self) -> List[int]:
        out, s = [], 0
        for _, n in self.factors:
            out.append(s)
            s += n
        return out

    def aligned(self, cuts: Iterable[int]) -> "CycleCompression":
        """Split at every position in cuts; factors then start exactly at the cut set."""
        cc = self
        for p in sorted(set(cuts)):
            cc = cc.split(p)
        return cc.compact()

    def map(self, fn) -> "CycleCompression":
        return CycleCompression(tuple((tuple(fn(x) for x in b), n) for b, n in self.factors))


# -- boolean matrices as lists of row bitsets ----------------------------------


def _mat_mul(a: List[int], b: List[int]) -> List[int]:
    out = []
    for row in a:
        acc = 0
        j = 0
        while row:
            if row & 1:
                acc |= b[j]
            row >>= 1
            j += 1
        out.append(acc)
    return out


def _identity(n: int) -> List[int]:
    return [1 << i for i in range(n)]


def _mat_pow(m: List[int], k: int) -> List[int]:
    out = _identity(len(m))
    while k:
        if k & 1:
            out = _mat_mul(out, m)
        m = _mat_mul(m, m)
        k >>= 1
    return out


def _apply(vec: int, m: List[int]) -> int:
    out = 0
    j = 0
    while vec:
        if vec & 1:
            out |= m[j]
        vec >>= 1
        j += 1
    return out


class CompressedMatcher:
    """Compressed membership for one automaton, letter matrices cached."""

    def __init__(self, nfa: NFA):
        self.nfa = remove_epsilon(nfa)
        self.index = {q: i for i, q in enumerate(sorted(self.nfa.states, key=repr))}
        self.n = len(self.index)
        self._letters: Dict = {}

    def letter(self, a) -> List[int]:
        if a not in self._letters:
            rows = [0] * self.n
            for p, es in self.nfa.transitions.items():
                for b, q in es:
                    if b == a:
                        rows[self.index[p]] |= 1 << self.index[q]
            self._letters[a] = rows
        return self._letters[a]

    def word_matrix(self, word: Sequence) -> List[int]:
        m = _identity(self.n)
        for a in word:
            m = _mat_mul(m, self.letter(a))
        return m

    def member(self, cc: CycleCompression) -> bool:
        vec = 0
        for q in self.nfa.initial:
            vec |= 1 << self.index[q]
        for b, n in cc.factors:
            if n == 0:
                continue
            k, r = divmod(n, len(b))
            if k:
                vec = _apply(vec, _mat_pow(self.word_matrix(b), k))
            for a in b[:r]:
                vec = _apply(vec, self.letter(a))
            if not vec:
                return False
        fin = 0
        for q in self.nfa.final:
            fin |= 1 << self.index[q]
        return bool(vec & fin)


def compressed_member(nfa: NFA, cc: CycleCompression) -> bool:
    """Is the decompression of cc accepted? Never decompresses."""
    return CompressedMatcher(nfa).member(cc)
